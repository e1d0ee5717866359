#pragma once

// Weakly typical and conditionally typical projectors on n-fold product
// spaces, stored structurally: a per-slot eigenbasis plus the set of accepted
// eigenvalue-index sequences. Densified only on request.

#include <cstdint>
#include <vector>

#include "qrelay/qops.hpp"

namespace qrelay {

struct TypicalityParams {
  int n = 1;
  double delta = 0.1;

  void validate() const;
};

/// Largest number of index sequences the constructors will enumerate.
inline constexpr std::uint64_t kMaxTypicalEnumeration = std::uint64_t{1} << 24;

/// Slack added to the acceptance test |sample entropy - target| <= delta so
/// that sequences sitting exactly on the boundary are not split by round-off.
inline constexpr double kTypicalitySlack = 1e-12;

class TypicalProjector {
 public:
  int n() const noexcept { return static_cast<int>(bases_.size()); }
  /// Product dimension prod_k d_k.
  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return accepted_.size(); }
  /// Orthonormal eigenbasis (columns, descending eigenvalues) of slot k.
  const Matrix& basis(int k) const { return bases_[static_cast<std::size_t>(k)]; }
  const RealVector& slot_eigenvalues(int k) const { return eigenvalues_[static_cast<std::size_t>(k)]; }
  /// Accepted sequences as linear indices (slot 0 most significant), ascending.
  const std::vector<std::uint32_t>& accepted_indices() const noexcept { return accepted_; }
  /// Accepted sequences as eigenvalue-index n-tuples.
  std::vector<std::vector<int>> accepted_sequences() const;

  /// Dense dim x dim projector.
  Matrix dense() const;
  /// Columns spanning the projector's range (dim x rank, orthonormal).
  Matrix range_basis() const;

 private:
  std::vector<Matrix> bases_;
  std::vector<RealVector> eigenvalues_;
  std::vector<std::uint32_t> accepted_;
  Eigen::Index dim_ = 1;

  friend TypicalProjector build_typical_projector(const std::vector<EigenDecomposition>&, double, double);
};

/// Accepts index sequences whose sample entropy -1/n sum_k log2 lambda_{i_k}
/// lies within delta (+ slack) of `target_entropy`. Zero eigenvalues are never
/// accepted. Throws SizeCap past kMaxTypicalEnumeration sequences.
TypicalProjector build_typical_projector(const std::vector<EigenDecomposition>& slots, double target_entropy,
                                         double delta);

/// Typical projector of rho^{(x)n}, target H(rho).
TypicalProjector average_typical_projector(const DensityOperator& rho, const TypicalityParams& p);

/// Conditionally typical projector of rho_1 (x) ... (x) rho_n, target
/// (1/n) sum_k H(rho_k). `states.size()` must equal p.n.
TypicalProjector conditional_typical_projector(const std::vector<DensityOperator>& states,
                                               const TypicalityParams& p);

/// Dense rho_1 (x) ... (x) rho_n.
Matrix product_state(const std::vector<DensityOperator>& states);

/// Tr[Pi (rho_1 (x) ... (x) rho_n)] computed without densifying.
double projector_overlap(const TypicalProjector& pi, const std::vector<DensityOperator>& states);

struct ProjectorBoundsReport {
  std::size_t rank = 0;
  double rank_bound = 0.0;        // 2^{n(H+delta)}
  bool rank_ok = false;           // (i)   rank <= 2^{n(H+delta)}
  double sandwich_margin = 0.0;   // (ii)  lambda_min(2^{-n(H-delta)} Pi - Pi rho Pi)
  double lower_margin = 0.0;      // (iii) lambda_min(2^{n(H+delta)} rho - Pi)
  double overlap = 0.0;           // Tr[Pi rho]

  bool sandwich_ok() const { return sandwich_margin >= tolerance::kOperatorOrder; }
  bool lower_ok() const { return lower_margin >= tolerance::kOperatorOrder; }
  bool all_ok() const { return rank_ok && sandwich_ok() && lower_ok(); }
  /// Throws InequalityViolated naming the first failing bound and its margin.
  void require() const;
};

/// Checks the three operator bounds of a typical projector against the
/// product state `rho_product` (one state per slot) and entropy rate
/// `entropy`, all as exact operator inequalities on dense matrices.
ProjectorBoundsReport projector_bounds_check(const TypicalProjector& pi,
                                             const std::vector<DensityOperator>& rho_product, double entropy,
                                             const TypicalityParams& p);

}  // namespace qrelay
