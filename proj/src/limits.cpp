#include "qheng/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qheng/cycles.hpp"
#include "qheng/errors.hpp"
#include "qheng/substance.hpp"

namespace qheng {
namespace {

double log_odds(double p) { return std::log1p(-p) - std::log(p); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

void fill_errors(DecompositionResult& r) {
  r.error.Q_in = std::abs(r.aggregate.Q_in - r.target.Q_in);
  r.error.Q_out = std::abs(r.aggregate.Q_out - r.target.Q_out);
  r.error.W = std::abs(r.aggregate.W - r.target.W);
  r.error.eta = std::abs(r.aggregate.eta - r.target.eta);
}

double grid_point(double lo, double hi, std::size_t k, std::size_t n) {
  if (k == n) return hi;
  return lo + (hi - lo) * (static_cast<double>(k) / static_cast<double>(n));
}

}  // namespace

EntropyIntegral entropy_integral(double p_lo, double p_hi, double quad_tol) {
  if (!(p_lo > 0.0 && p_hi < 1.0 && p_lo <= p_hi)) {
    throw DomainError("entropy integral needs 0 < p_lo <= p_hi < 1");
  }
  EntropyIntegral out;
  out.value = binary_entropy(p_hi) - binary_entropy(p_lo);
  out.quadrature = adaptive_simpson(log_odds, p_lo, p_hi, quad_tol);
  return out;
}

DecompositionResult carnot_as_otto_limit(double T_h, double T_l, double p_l, double p_h, std::size_t N) {
  require_positive(T_h, "T_h");
  require_positive(T_l, "T_l");
  if (!(T_h > T_l)) throw DomainError("Carnot decomposition needs T_h > T_l");
  if (!(p_l > 0.0 && p_l <= p_h && p_h < 0.5)) throw DomainError("Carnot decomposition needs 0 < p_l <= p_h < 0.5");
  if (N == 0) throw DomainError("N must be >= 1");

  DecompositionResult r;
  r.N = N;
  const double ds = binary_entropy(p_h) - binary_entropy(p_l);
  r.target = {T_h * ds, T_l * ds, (T_h - T_l) * ds, 1.0 - T_l / T_h};
  if (p_h == p_l) {
    r.target.eta = r.aggregate.eta = 0.0;
    fill_errors(r);
    return r;
  }

  r.min_strip_eta = std::numeric_limits<double>::infinity();
  r.max_strip_eta = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < N; ++k) {
    const double lo = grid_point(p_l, p_h, k, N), hi = grid_point(p_l, p_h, k + 1, N);
    const double gap_cold = T_l * log_odds(lo);
    const double gap_hot = T_h * log_odds(hi);
    const CycleReport strip = run_otto(OttoSpec{Substance::two_level(gap_cold), T_h, T_l, gap_hot / gap_cold});
    r.aggregate.Q_in += strip.Q_in;
    r.aggregate.Q_out += strip.Q_out;
    r.aggregate.W += strip.W_net;
    r.strip_first_law = std::max(r.strip_first_law, std::abs(strip.W_net - (strip.Q_in - strip.Q_out)));
    if (strip.efficiency) {
      r.min_strip_eta = std::min(r.min_strip_eta, *strip.efficiency);
      r.max_strip_eta = std::max(r.max_strip_eta, *strip.efficiency);
    }
  }
  r.aggregate.eta = r.aggregate.W / r.aggregate.Q_in;
  fill_errors(r);
  return r;
}

DecompositionResult otto_as_carnot_limit(double delta_h, double delta_l, double T_h, double T_l, std::size_t N) {
  require_positive(delta_h, "Delta_h");
  require_positive(delta_l, "Delta_l");
  require_positive(T_h, "T_h");
  require_positive(T_l, "T_l");
  if (delta_h < delta_l) throw DomainError("Otto decomposition needs Delta_h >= Delta_l");
  if (N == 0) throw DomainError("N must be >= 1");

  const double p_h = excited_population(delta_h / T_h);
  const double p_l = excited_population(delta_l / T_l);
  if (!(p_h > p_l) && delta_h != delta_l) {
    throw DomainError("positive-work condition T_h > (Delta_h/Delta_l) T_l violated; empty population interval");
  }

  DecompositionResult r;
  r.N = N;
  const double dp = p_h - p_l;
  r.target = {delta_h * dp, delta_l * dp, (delta_h - delta_l) * dp, 1.0 - delta_l / delta_h};
  if (!(p_h > p_l)) {
    // equal gaps with an inverted or empty interval: nothing to integrate
    r.aggregate.eta = r.target.eta;
    fill_errors(r);
    return r;
  }

  r.min_strip_eta = std::numeric_limits<double>::infinity();
  r.max_strip_eta = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < N; ++k) {
    const double lo = grid_point(p_l, p_h, k, N), hi = grid_point(p_l, p_h, k + 1, N);
    // bath temperatures at which the fixed gaps hold the strip's end populations
    const double th = delta_h / log_odds(hi);
    const double tl = delta_l / log_odds(lo);
    const CarnotSpec spec{Substance::two_level(1.0), th, tl, th * log_odds(lo), delta_h};
    double q_in = 0.0, q_out = 0.0, w = 0.0;
    if (spec.zeta_a > spec.zeta_b && th > tl) {
      const CycleReport strip = run_carnot(spec, 8);
      q_in = strip.Q_in;
      q_out = strip.Q_out;
      w = strip.W_net;
      if (strip.efficiency) {
        r.min_strip_eta = std::min(r.min_strip_eta, *strip.efficiency);
        r.max_strip_eta = std::max(r.max_strip_eta, *strip.efficiency);
      }
    }
    r.aggregate.Q_in += q_in;
    r.aggregate.Q_out += q_out;
    r.aggregate.W += w;
    r.strip_first_law = std::max(r.strip_first_law, std::abs(w - (q_in - q_out)));
  }
  r.aggregate.eta = r.aggregate.Q_in > 0.0 ? r.aggregate.W / r.aggregate.Q_in : 0.0;
  fill_errors(r);
  return r;
}

EntropyBalance entropy_balance(double delta, double T_start, double T_end, double quad_tol) {
  require_positive(delta, "Delta");
  require_positive(T_start, "T_start");
  require_positive(T_end, "T_end");
  if (T_end < T_start) throw DomainError("entropy balance needs T_start <= T_end");
  if (!(quad_tol > 0.0)) throw DomainError("quadrature tolerance must be positive");

  EntropyBalance out;
  out.dS_substance = binary_entropy(excited_population(delta / T_end)) -
                     binary_entropy(excited_population(delta / T_start));
  if (T_start == T_end) return out;

  // (Delta / T) dp with dp/dT = (Delta / T^2) p (1 - p)
  const auto integrand = [delta](double t) {
    const double p = excited_population(delta / t);
    return delta * delta / (t * t * t) * p * (1.0 - p);
  };
  out.quadrature = adaptive_simpson(integrand, T_start, T_end, quad_tol);
  if (!out.quadrature.converged) {
    std::ostringstream os;
    os.precision(17);
    os << "entropy balance quadrature did not converge: intervals=" << out.quadrature.intervals
       << " error_estimate=" << out.quadrature.error_estimate << " tol=" << quad_tol;
    throw NumericalError(os.str());
  }
  out.dS_bath = out.quadrature.value;
  out.residual = std::abs(out.dS_substance - out.dS_bath);
  return out;
}

}  // namespace qheng
