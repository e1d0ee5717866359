#include "qrelay/typicality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qrelay {

void TypicalityParams::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "block length n must be at least 1");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidConfig, "typicality width delta must be positive");
}

TypicalProjector build_typical_projector(const std::vector<EigenDecomposition>& slots, double target_entropy,
                                         double delta) {
  TypicalProjector pi;
  const std::size_t n = slots.size();
  std::uint64_t count = 1;
  for (const auto& s : slots) {
    count *= static_cast<std::uint64_t>(s.eigenvalues.size());
    if (count > kMaxTypicalEnumeration) {
      throw Error(ErrorKind::SizeCap, "typical projector would enumerate more than 2^24 sequences",
                  static_cast<double>(count));
    }
    pi.bases_.push_back(s.eigenvectors);
    pi.eigenvalues_.push_back(s.eigenvalues);
  }
  pi.dim_ = static_cast<Eigen::Index>(count);

  // Per-slot surprisal -log2 lambda; +inf for eigenvalues at or below the
  // pseudo-inverse cutoff, which are treated as exact zeros.
  std::vector<std::vector<double>> surprisal(n);
  for (std::size_t k = 0; k < n; ++k) {
    const RealVector& w = slots[k].eigenvalues;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      surprisal[k].push_back(w(i) > tolerance::kPinvRelativeCutoff ? -std::log2(w(i)) : std::numeric_limits<double>::infinity());
    }
  }

  // Odometer over index tuples, slot 0 most significant, so linear indices
  // come out in ascending order.
  std::vector<int> digits(n, 0);
  for (std::uint64_t linear = 0; linear < count; ++linear) {
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) total += surprisal[k][static_cast<std::size_t>(digits[k])];
    if (std::isfinite(total)) {
      const double sample_entropy = total / static_cast<double>(n);
      if (std::abs(sample_entropy - target_entropy) <= delta + kTypicalitySlack) {
        pi.accepted_.push_back(static_cast<std::uint32_t>(linear));
      }
    }
    for (std::size_t k = n; k-- > 0;) {
      if (++digits[k] < static_cast<int>(surprisal[k].size())) break;
      digits[k] = 0;
    }
  }
  return pi;
}

std::vector<std::vector<int>> TypicalProjector::accepted_sequences() const {
  std::vector<std::vector<int>> out;
  out.reserve(accepted_.size());
  for (std::uint32_t linear : accepted_) {
    std::vector<int> seq(bases_.size());
    std::uint64_t rem = linear;
    for (std::size_t k = bases_.size(); k-- > 0;) {
      const auto d = static_cast<std::uint64_t>(bases_[k].cols());
      seq[k] = static_cast<int>(rem % d);
      rem /= d;
    }
    out.push_back(std::move(seq));
  }
  return out;
}

Matrix TypicalProjector::range_basis() const {
  Matrix cols(dim_, static_cast<Eigen::Index>(accepted_.size()));
  const std::size_t n = bases_.size();
  std::vector<int> seq(n);
  for (std::size_t c = 0; c < accepted_.size(); ++c) {
    std::uint64_t rem = accepted_[c];
    for (std::size_t k = n; k-- > 0;) {
      const auto d = static_cast<std::uint64_t>(bases_[k].cols());
      seq[k] = static_cast<int>(rem % d);
      rem /= d;
    }
    Eigen::VectorXcd v = bases_[0].col(seq[0]);
    for (std::size_t k = 1; k < n; ++k) {
      const Eigen::VectorXcd& w = bases_[k].col(seq[k]);
      Eigen::VectorXcd next(v.size() * w.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * w.size(), w.size()) = v(i) * w;
      v = std::move(next);
    }
    cols.col(static_cast<Eigen::Index>(c)) = v;
  }
  return cols;
}

Matrix TypicalProjector::dense() const {
  const Matrix v = range_basis();
  return v * v.adjoint();
}

TypicalProjector average_typical_projector(const DensityOperator& rho, const TypicalityParams& p) {
  p.validate();
  const EigenDecomposition eig = eigh(rho.matrix());
  return build_typical_projector(std::vector<EigenDecomposition>(static_cast<std::size_t>(p.n), eig),
                                 von_neumann_entropy(rho), p.delta);
}

TypicalProjector conditional_typical_projector(const std::vector<DensityOperator>& states,
                                               const TypicalityParams& p) {
  p.validate();
  if (states.size() != static_cast<std::size_t>(p.n)) {
    throw Error(ErrorKind::DimMismatch, "conditional typical projector needs one state per position");
  }
  std::vector<EigenDecomposition> slots;
  slots.reserve(states.size());
  double entropy_sum = 0.0;
  for (const auto& s : states) {
    slots.push_back(eigh(s.matrix()));
    entropy_sum += entropy_of_spectrum(slots.back().eigenvalues);
  }
  return build_typical_projector(slots, entropy_sum / static_cast<double>(p.n), p.delta);
}

Matrix product_state(const std::vector<DensityOperator>& states) {
  Matrix out = Matrix::Ones(1, 1);
  for (const auto& s : states) out = kron(out, s.matrix());
  return out;
}

double projector_overlap(const TypicalProjector& pi, const std::vector<DensityOperator>& states) {
  if (states.size() != static_cast<std::size_t>(pi.n())) {
    throw Error(ErrorKind::DimMismatch, "overlap needs one state per projector slot");
  }
  // <v_i| rho_k |v_i> for every slot and eigen-index.
  std::vector<RealVector> diag;
  for (int k = 0; k < pi.n(); ++k) {
    const Matrix& b = pi.basis(k);
    diag.push_back((b.adjoint() * states[static_cast<std::size_t>(k)].matrix() * b).diagonal().real());
  }
  double total = 0.0;
  for (const auto& seq : pi.accepted_sequences()) {
    double p = 1.0;
    for (std::size_t k = 0; k < seq.size(); ++k) p *= diag[k](seq[k]);
    total += p;
  }
  return total;
}

void ProjectorBoundsReport::require() const {
  std::ostringstream os;
  if (!rank_ok) {
    os << "(i) rank " << rank << " exceeds 2^{n(H+delta)} = " << rank_bound;
    throw Error(ErrorKind::InequalityViolated, os.str(), rank_bound - static_cast<double>(rank));
  }
  if (!sandwich_ok()) {
    os << "(ii) sandwich bound violated, margin " << sandwich_margin;
    throw Error(ErrorKind::InequalityViolated, os.str(), sandwich_margin);
  }
  if (!lower_ok()) {
    os << "(iii) lower operator bound violated, margin " << lower_margin;
    throw Error(ErrorKind::InequalityViolated, os.str(), lower_margin);
  }
}

ProjectorBoundsReport projector_bounds_check(const TypicalProjector& pi,
                                             const std::vector<DensityOperator>& rho_product, double entropy,
                                             const TypicalityParams& p) {
  p.validate();
  if (rho_product.size() != static_cast<std::size_t>(pi.n()) || pi.n() != p.n) {
    throw Error(ErrorKind::DimMismatch, "projector, product state and params disagree on n");
  }
  const Matrix rho = product_state(rho_product);
  if (rho.rows() != pi.dim()) throw Error(ErrorKind::DimMismatch, "product state dimension mismatch");
  const Matrix proj = pi.dense();
  const double n = p.n;

  ProjectorBoundsReport r;
  r.rank = pi.rank();
  r.rank_bound = std::exp2(n * (entropy + p.delta));
  r.rank_ok = static_cast<double>(r.rank) <= r.rank_bound;
  r.sandwich_margin = min_eigenvalue(std::exp2(-n * (entropy - p.delta)) * proj - proj * rho * proj);
  r.lower_margin = min_eigenvalue(std::exp2(n * (entropy + p.delta)) * rho - proj);
  r.overlap = (proj * rho).trace().real();
  return r;
}

}  // namespace qrelay
