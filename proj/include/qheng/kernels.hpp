#pragma once

// Data-parallel inner loops used by the spectral sums (partition functions,
// populations, internal energies, entropies).
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is picked once at startup from the CPU feature bits and
// can be overridden with QHENG_KERNELS=scalar|avx2 or set_backend().

#include <cstddef>
#include <span>
#include <string_view>

namespace qheng::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);

/// True when the variant was compiled in and the running CPU supports it.
bool backend_available(Backend backend);

Backend active_backend();

/// Throws std::invalid_argument if the backend is not available.
void set_backend(Backend backend);

/// out[i] = exp(-beta * levels[i]); returns the sum of out.
/// Weights that underflow are flushed to zero.
double boltzmann_weights(std::span<const double> levels, double beta, std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);

double sum(std::span<const double> values);

/// -sum p ln p with 0 ln 0 = 0. Inputs are expected in [0, 1].
double entropy_sum(std::span<const double> probs);

/// out[i] = values[i] * factor
void scale(std::span<const double> values, double factor, std::span<double> out);

/// Direct access to one backend, bypassing dispatch. Used by the
/// equivalence tests and benchmarks.
struct Table {
  double (*boltzmann_weights)(const double* levels, std::size_t n, double beta, double* out);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* values, std::size_t n);
  double (*entropy_sum)(const double* probs, std::size_t n);
  void (*scale)(const double* values, std::size_t n, double factor, double* out);
};

/// Throws std::invalid_argument if the backend is not available.
const Table& table(Backend backend);

}  // namespace qheng::kernels
