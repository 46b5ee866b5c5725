#include "kernels_impl.hpp"

#include <cmath>

namespace qheng::kernels::scalar {

double boltzmann_weights(const double* levels, std::size_t n, double beta, double* out) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(-beta * levels[i]);
    // flush subnormals so both backends agree on what "underflowed" means
    out[i] = (w < 0x1p-1022) ? 0.0 : w;
    total += out[i];
  }
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum(const double* values, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += values[i];
  return acc;
}

double entropy_sum(const double* probs, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = probs[i];
    if (p >= 0x1p-1022) acc -= p * std::log(p);
  }
  return acc;
}

void scale(const double* values, std::size_t n, double factor, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = values[i] * factor;
}

}  // namespace qheng::kernels::scalar
