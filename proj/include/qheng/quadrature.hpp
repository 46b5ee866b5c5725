#pragma once

#include <cstddef>
#include <functional>

namespace qheng {

struct QuadratureResult {
  double value = 0.0;
  /// Sum of the local |S2 - S1| / 15 estimates over accepted intervals.
  double error_estimate = 0.0;
  std::size_t intervals = 0;
  std::size_t evaluations = 0;
  bool converged = true;
};

inline constexpr std::size_t kMaxQuadratureIntervals = std::size_t{1} << 20;

/// Adaptive Simpson on [a, b] with an absolute tolerance. The tolerance is
/// distributed over subintervals in proportion to their width. Never throws;
/// when the interval cap is hit the best available estimate is returned with
/// converged == false.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double abs_tol,
                                  std::size_t max_intervals = kMaxQuadratureIntervals);

}  // namespace qheng
