#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qheng {

using complex = std::complex<double>;

/// Eigenvalues (ascending) of an n x n Hermitian matrix stored row-major.
/// Only the upper triangle is trusted. Uses cyclic Jacobi on the real
/// symmetric 2n x 2n embedding [[Re, -Im], [Im, Re]].
std::vector<double> hermitian_eigenvalues(const complex* a, std::size_t n);

/// Largest |a_ij - conj(a_ji)|.
double hermitian_defect(const complex* a, std::size_t n);

inline constexpr double kDensityTolerance = 1e-12;

/// Dense Hermitian, unit-trace, positive semidefinite N x N matrix
/// (N = 2 for one qubit, 4 for the joint system+demon state).
template <std::size_t N>
class DensityMatrix {
 public:
  using Entries = std::array<complex, N * N>;

  /// Validates Hermiticity, trace and positivity to kDensityTolerance.
  static DensityMatrix from(const Entries& entries);
  static DensityMatrix diagonal(const std::array<double, N>& diag);

  complex operator()(std::size_t i, std::size_t j) const { return a_[i * N + j]; }
  const Entries& entries() const { return a_; }

  double trace() const;
  std::array<double, N> diag() const;
  std::array<double, N> eigenvalues() const;
  /// -sum lambda ln lambda over the spectrum; nonpositive eigenvalues count
  /// as zero.
  double entropy() const;
  /// Tr[H rho] for a diagonal Hamiltonian.
  double energy(const std::array<double, N>& h_diag) const;

  /// U rho U^dagger. Re-validated.
  DensityMatrix conjugate(const Entries& u) const;
  /// Off-diagonal entries dropped.
  DensityMatrix dephased() const;

  /// Largest entrywise |difference|.
  double distance(const DensityMatrix& other) const;

 private:
  explicit DensityMatrix(const Entries& a) : a_(a) {}
  Entries a_{};
};

extern template class DensityMatrix<2>;
extern template class DensityMatrix<4>;

using QubitState = DensityMatrix<2>;
using JointState = DensityMatrix<4>;

}  // namespace qheng
