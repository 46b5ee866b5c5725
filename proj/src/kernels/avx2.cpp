// AVX2 + FMA variants. Compiled with -mavx2 -mfma; only reached through the
// runtime dispatch in dispatch.cpp after a CPU feature check.
//
// exp and log follow the Cephes double-precision rational approximations,
// evaluated four lanes at a time. Both stay within a couple of ulp of libm.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace qheng::kernels::avx2 {
namespace {

constexpr double kMinNormal = 0x1p-1022;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// 2^n for integral-valued n in [-1022, 1023], built in the exponent field.
inline __m256d pow2(__m256d n) {
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  return _mm256_castsi256_pd(bits);
}

inline __m256d exp4(__m256d x) {
  const __m256d hi = _mm256_set1_pd(709.782712893384);
  const __m256d lo = _mm256_set1_pd(-745.2);
  const __m256d overflow = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  r = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878E-4);
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(3.02994407707441961300E-2));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(9.99999999999999999910E-1));
  p = _mm256_mul_pd(p, r);

  __m256d q = _mm256_set1_pd(3.00198505138664455042E-6);
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.52448340349684104192E-3));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.27265548208155028766E-1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(2.00000000000000000009E0));

  __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

  // split the scaling so exponents down to the subnormal range stay exact
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(fx, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(fx, n1);
  e = _mm256_mul_pd(_mm256_mul_pd(e, pow2(n1)), pow2(n2));

  return _mm256_blendv_pd(e, _mm256_set1_pd(HUGE_VAL), overflow);
}

// Natural log for positive normal inputs.
inline __m256d log4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256d two52 = _mm256_set1_pd(0x1p52);
  const __m256i biased = _mm256_srli_epi64(bits, 52);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(biased, _mm256_castpd_si256(two52))), two52);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  const __m256d m =
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d sqrth = _mm256_set1_pd(0.70710678118654752440);
  const __m256d small = _mm256_cmp_pd(m, sqrth, _CMP_LT_OQ);
  const __m256d one = _mm256_set1_pd(1.0);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, one));
  // m < sqrt(1/2): t = 2m - 1, otherwise t = m - 1
  const __m256d t = _mm256_sub_pd(_mm256_add_pd(m, _mm256_and_pd(small, m)), one);

  const __m256d z = _mm256_mul_pd(t, t);

  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(7.70838733755885391666E0));

  __m256d q = _mm256_add_pd(t, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(t, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), y);
  __m256d r = _mm256_add_pd(t, y);
  r = _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
  return r;
}

}  // namespace

double boltzmann_weights(const double* levels, std::size_t n, double beta, double* out) {
  const __m256d neg_beta = _mm256_set1_pd(-beta);
  const __m256d min_normal = _mm256_set1_pd(kMinNormal);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d w = exp4(_mm256_mul_pd(neg_beta, _mm256_loadu_pd(levels + i)));
    w = _mm256_and_pd(w, _mm256_cmp_pd(w, min_normal, _CMP_GE_OQ));
    _mm256_storeu_pd(out + i, w);
    acc = _mm256_add_pd(acc, w);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double w = std::exp(-beta * levels[i]);
    out[i] = (w < kMinNormal) ? 0.0 : w;
    total += out[i];
  }
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double sum(const double* values, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(values + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += values[i];
  return total;
}

double entropy_sum(const double* probs, std::size_t n) {
  const __m256d min_normal = _mm256_set1_pd(kMinNormal);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_loadu_pd(probs + i);
    const __m256d live = _mm256_cmp_pd(p, min_normal, _CMP_GE_OQ);
    // dead lanes evaluate log(1) = 0 and are masked out anyway
    const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), p, live);
    const __m256d term = _mm256_and_pd(_mm256_mul_pd(safe, log4(safe)), live);
    acc = _mm256_sub_pd(acc, term);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double p = probs[i];
    if (p >= kMinNormal) total -= p * std::log(p);
  }
  return total;
}

void scale(const double* values, std::size_t n, double factor, double* out) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(values + i), f));
  for (; i < n; ++i) out[i] = values[i] * factor;
}

}  // namespace qheng::kernels::avx2
