#pragma once

// Dense complex-matrix algebra for finite-dimensional density operators.
//
// Conventions used throughout the library:
//   * Kronecker products put the left factor's index major, so a basis
//     vector |i>|j> of a (da x db) system has linear index i*db + j.
//   * Logarithms are base 2; entropies and rates are in bits.
//   * All values are immutable after construction.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qrelay/error.hpp"

namespace qrelay {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tolerance {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kPsdFloor = -1e-9;
inline constexpr double kTrace = 1e-9;
inline constexpr double kPinvRelativeCutoff = 1e-12;
inline constexpr double kOperatorOrder = -1e-9;
}  // namespace tolerance

/// Matrix known to equal its conjugate transpose (entrywise within 1e-10).
class HermitianOperator {
 public:
  /// Validates Hermiticity; throws Error(NotHermitian) otherwise.
  explicit HermitianOperator(Matrix m);

  /// Wraps a matrix produced by an internal computation that is Hermitian up
  /// to round-off. The stored value is symmetrized, no check is made.
  static HermitianOperator trusted(const Matrix& m);

  static HermitianOperator identity(Eigen::Index dim);
  static HermitianOperator zero(Eigen::Index dim);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  struct TrustedTag {};
  HermitianOperator(Matrix m, TrustedTag) : m_(std::move(m)) {}
  Matrix m_;
};

/// Positive semi-definite unit-trace operator on a declared tensor factorization.
class DensityOperator {
 public:
  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  const std::vector<int>& subsystem_dims() const noexcept { return dims_; }

  /// Builds from a matrix assumed valid (e.g. a convex combination of valid
  /// states). Symmetrizes, but performs no further checks.
  static DensityOperator trusted(const Matrix& m, std::vector<int> dims);
  static DensityOperator trusted(const Matrix& m);

  static DensityOperator maximally_mixed(int dim);
  static DensityOperator pure(const Eigen::VectorXcd& ket);
  static DensityOperator diagonal(std::span<const double> probabilities);

 private:
  DensityOperator(Matrix m, std::vector<int> dims) : m_(std::move(m)), dims_(std::move(dims)) {}
  Matrix m_;
  std::vector<int> dims_;

  friend DensityOperator validate_density(const Matrix&, std::vector<int>);
};

/// Eigenvalues descending; eigenvectors are orthonormal columns with the
/// first component of modulus above 1e-12 made real and positive.
struct EigenDecomposition {
  RealVector eigenvalues;
  Matrix eigenvectors;

  Matrix reconstruct() const;
};

EigenDecomposition eigh(const Matrix& hermitian);
RealVector eigenvalues(const Matrix& hermitian);
double min_eigenvalue(const Matrix& hermitian);

/// Validates without ever renormalizing. Throws DimMismatch, NotHermitian,
/// NotPSD (value = most negative eigenvalue) or TraceNotOne (value = trace).
DensityOperator validate_density(const Matrix& m, std::vector<int> subsystem_dims);

Matrix kron(const Matrix& a, const Matrix& b);
DensityOperator tensor(const DensityOperator& a, const DensityOperator& b);

/// Traces out every subsystem not listed in `keep` (0-based indices).
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);

/// -sum lambda log2 lambda with 0 log 0 = 0; eigenvalues >= -1e-9 are clamped to 0.
double entropy_of_spectrum(const RealVector& eigenvalues);
double von_neumann_entropy(const DensityOperator& rho);
double von_neumann_entropy(const Matrix& rho);

/// Trace norm of a Hermitian operator: sum of |lambda_i|.
double trace_norm(const Matrix& hermitian);
/// Tr|rho - sigma|, in [0, 2].
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

/// A^{-1/2} on the support of A (eigenvalues below 1e-12 * lambda_max map to 0).
HermitianOperator sqrt_pinv(const HermitianOperator& a);
/// Principal square root of a PSD operator (negative round-off clamped).
HermitianOperator sqrt_psd(const HermitianOperator& a);
/// Orthogonal projector onto the support of a PSD operator.
HermitianOperator support_projector(const HermitianOperator& a);

/// true iff lambda_min(b - a) >= -1e-9.
bool operator_leq(const HermitianOperator& a, const HermitianOperator& b);
/// lambda_min(b - a); the margin by which a <= b holds.
double operator_order_margin(const HermitianOperator& a, const HermitianOperator& b);

}  // namespace qrelay
