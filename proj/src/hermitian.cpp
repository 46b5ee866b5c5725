#include <algorithm>
#include <cmath>
#include <string>

#include "qheng/density_matrix.hpp"
#include "qheng/errors.hpp"

namespace qheng {
namespace {

// Cyclic Jacobi on a dense real symmetric matrix, in place. Returns the
// diagonal once the off-diagonal mass is negligible.
std::vector<double> symmetric_jacobi(std::vector<double>& m, std::size_t n) {
  const auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (off <= 1e-34 * scale * scale || off == 0.0) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0.0;
      }
    }
  }
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
  return d;
}

}  // namespace

double hermitian_defect(const complex* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m = std::max(m, std::abs(a[i * n + j] - std::conj(a[j * n + i])));
  return m;
}

std::vector<double> hermitian_eigenvalues(const complex* a, std::size_t n) {
  const std::size_t m = 2 * n;
  std::vector<double> r(m * m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // symmetrize from the upper triangle
      const complex z = i <= j ? a[i * n + j] : std::conj(a[j * n + i]);
      r[i * m + j] = z.real();
      r[(i + n) * m + (j + n)] = z.real();
      r[(i + n) * m + j] = z.imag();
      r[i * m + (j + n)] = -z.imag();
    }
  }
  std::vector<double> d = symmetric_jacobi(r, m);
  std::sort(d.begin(), d.end());
  // every eigenvalue of the Hermitian matrix appears twice in the embedding
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (d[2 * i] + d[2 * i + 1]);
  return out;
}

template <std::size_t N>
DensityMatrix<N> DensityMatrix<N>::from(const Entries& entries) {
  const double defect = hermitian_defect(entries.data(), N);
  if (defect > kDensityTolerance) throw DomainError("density matrix not Hermitian (defect " + std::to_string(defect) + ")");
  DensityMatrix m(entries);
  const double tr = m.trace();
  if (std::abs(tr - 1.0) > kDensityTolerance) throw DomainError("density matrix trace " + std::to_string(tr) + " != 1");
  const std::array<double, N> ev = m.eigenvalues();
  if (ev.front() < -kDensityTolerance) {
    throw DomainError("density matrix has negative eigenvalue " + std::to_string(ev.front()));
  }
  return m;
}

template <std::size_t N>
DensityMatrix<N> DensityMatrix<N>::diagonal(const std::array<double, N>& d) {
  Entries e{};
  for (std::size_t i = 0; i < N; ++i) e[i * N + i] = d[i];
  return from(e);
}

template <std::size_t N>
double DensityMatrix<N>::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < N; ++i) t += a_[i * N + i].real();
  return t;
}

template <std::size_t N>
std::array<double, N> DensityMatrix<N>::diag() const {
  std::array<double, N> d{};
  for (std::size_t i = 0; i < N; ++i) d[i] = a_[i * N + i].real();
  return d;
}

template <std::size_t N>
std::array<double, N> DensityMatrix<N>::eigenvalues() const {
  const std::vector<double> v = hermitian_eigenvalues(a_.data(), N);
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

template <std::size_t N>
double DensityMatrix<N>::entropy() const {
  bool is_diagonal = true;
  for (std::size_t i = 0; i < N && is_diagonal; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j && a_[i * N + j] != 0.0) {
        is_diagonal = false;
        break;
      }
  const std::array<double, N> ev = is_diagonal ? diag() : eigenvalues();
  double s = 0.0;
  for (double l : ev)
    if (l > 0.0) s -= l * std::log(l);
  return s;
}

template <std::size_t N>
double DensityMatrix<N>::energy(const std::array<double, N>& h) const {
  double e = 0.0;
  for (std::size_t i = 0; i < N; ++i) e += h[i] * a_[i * N + i].real();
  return e;
}

template <std::size_t N>
DensityMatrix<N> DensityMatrix<N>::conjugate(const Entries& u) const {
  Entries tmp{}, out{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      complex acc = 0.0;
      for (std::size_t k = 0; k < N; ++k) acc += u[i * N + k] * a_[k * N + j];
      tmp[i * N + j] = acc;
    }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      complex acc = 0.0;
      for (std::size_t k = 0; k < N; ++k) acc += tmp[i * N + k] * std::conj(u[j * N + k]);
      out[i * N + j] = acc;
    }
  return from(out);
}

template <std::size_t N>
DensityMatrix<N> DensityMatrix<N>::dephased() const {
  Entries e{};
  for (std::size_t i = 0; i < N; ++i) e[i * N + i] = a_[i * N + i];
  return DensityMatrix(e);
}

template <std::size_t N>
double DensityMatrix<N>::distance(const DensityMatrix& other) const {
  double m = 0.0;
  for (std::size_t i = 0; i < N * N; ++i) m = std::max(m, std::abs(a_[i] - other.a_[i]));
  return m;
}

template class DensityMatrix<2>;
template class DensityMatrix<4>;

}  // namespace qheng
