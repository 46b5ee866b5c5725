#pragma once

// Carnot as a stack of thin Otto cycles and Otto as a stack of thin Carnot
// cycles, both for a two-level substance, plus the entropy bookkeeping that
// makes the limits exact.

#include <cstddef>

#include "qheng/quadrature.hpp"

namespace qheng {

struct LimitQuantities {
  double Q_in = 0.0;
  double Q_out = 0.0;
  double W = 0.0;
  double eta = 0.0;
};

struct DecompositionResult {
  std::size_t N = 0;
  /// Aggregates over the N strips.
  LimitQuantities aggregate;
  /// The N -> infinity values.
  LimitQuantities target;
  /// |aggregate - target| per quantity.
  LimitQuantities error;
  /// Extremes of the per-strip efficiencies.
  double min_strip_eta = 0.0;
  double max_strip_eta = 0.0;
  /// max over strips of |W_k - (Q_in_k - Q_out_k)|.
  double strip_first_law = 0.0;
};

struct EntropyIntegral {
  /// S_b(p_hi) - S_b(p_lo).
  double value = 0.0;
  QuadratureResult quadrature;
};

/// Integral of ln(1/p - 1) over [p_lo, p_hi] with 0 < p_lo <= p_hi < 1.
EntropyIntegral entropy_integral(double p_lo, double p_hi, double quad_tol = 1e-10);

/// Partitions [p_l, p_h] uniformly into N strips; strip k is an Otto cycle
/// between the fixed baths with gaps T_h ln(1/p_{k+1} - 1) and
/// T_l ln(1/p_k - 1). Requires 0 < p_l <= p_h < 0.5, T_h > T_l, N >= 1.
DecompositionResult carnot_as_otto_limit(double T_h, double T_l, double p_l, double p_h, std::size_t N);

/// Partitions the Otto population interval uniformly into N strips; strip k
/// is a Carnot cycle whose isotherms end at gaps Delta_h and Delta_l, at the
/// bath temperatures those gaps imply. Requires Delta_h > Delta_l > 0,
/// T_h > (Delta_h / Delta_l) T_l, N >= 1.
DecompositionResult otto_as_carnot_limit(double delta_h, double delta_l, double T_h, double T_l, std::size_t N);

struct EntropyBalance {
  double dS_substance = 0.0;
  double dS_bath = 0.0;
  double residual = 0.0;
  QuadratureResult quadrature;
};

/// Entropy the two-level substance gains while its bath is swept from
/// T_start to T_end at fixed gap, against the entropy drawn from the bath,
/// integral of (Delta / T) dp. Throws NumericalError if the quadrature does
/// not converge.
EntropyBalance entropy_balance(double delta, double T_start, double T_end, double quad_tol = 1e-11);

}  // namespace qheng
