#pragma once

// Raw-pointer kernel entry points. Kept free of standard-library templates so
// the AVX2 translation unit never emits inline code the linker could merge
// into scalar callers.

#include <cstddef>

namespace qheng::kernels::scalar {

double boltzmann_weights(const double* levels, std::size_t n, double beta, double* out);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* values, std::size_t n);
double entropy_sum(const double* probs, std::size_t n);
void scale(const double* values, std::size_t n, double factor, double* out);

}  // namespace qheng::kernels::scalar

namespace qheng::kernels::avx2 {

double boltzmann_weights(const double* levels, std::size_t n, double beta, double* out);
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* values, std::size_t n);
double entropy_sum(const double* probs, std::size_t n);
void scale(const double* values, std::size_t n, double factor, double* out);

}  // namespace qheng::kernels::avx2
