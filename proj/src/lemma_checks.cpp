#include "qrelay/lemma_checks.hpp"

#include <algorithm>
#include <cmath>

namespace qrelay {

namespace {

constexpr double kPassFloor = -1e-9;

void require_effect(const HermitianOperator& a, const char* name) {
  const RealVector w = eigenvalues(a.matrix());
  if (w(w.size() - 1) < tolerance::kPsdFloor || w(0) > 1.0 - tolerance::kPsdFloor) {
    throw Error(ErrorKind::PreconditionViolated, std::string(name) + " must satisfy 0 <= . <= I",
                w(w.size() - 1) < tolerance::kPsdFloor ? w(w.size() - 1) : w(0));
  }
}

void require_psd(const HermitianOperator& a, const char* name) {
  const double v = min_eigenvalue(a.matrix());
  if (v < tolerance::kPsdFloor) throw Error(ErrorKind::PreconditionViolated, std::string(name) + " must be PSD", v);
}

void record(SuiteResult& s, double margin) {
  s.worst_margin = s.checks == 0 ? margin : std::min(s.worst_margin, margin);
  ++s.checks;
  if (margin < kPassFloor) ++s.failures;
}

}  // namespace

double check_trace_substitution(const HermitianOperator& lambda, const DensityOperator& rho,
                                const DensityOperator& sigma) {
  require_effect(lambda, "Lambda");
  if (lambda.dim() != rho.dim() || rho.dim() != sigma.dim()) throw Error(ErrorKind::DimMismatch, "operand dimensions");
  const double lr = (lambda.matrix() * rho.matrix()).trace().real();
  const double ls = (lambda.matrix() * sigma.matrix()).trace().real();
  return ls + trace_distance(rho, sigma) - lr;
}

double check_hayashi_nagaoka(const HermitianOperator& s, const HermitianOperator& t, HnCoefficients c) {
  require_effect(s, "S");
  require_psd(t, "T");
  if (s.dim() != t.dim()) throw Error(ErrorKind::DimMismatch, "S and T differ in dimension");
  const Eigen::Index d = s.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix n = sqrt_pinv(HermitianOperator::trusted(s.matrix() + t.matrix())).matrix();
  const Matrix lhs = id - n * s.matrix() * n;
  const Matrix rhs = c.miss * (id - s.matrix()) + c.confusion * t.matrix();
  return min_eigenvalue(rhs - lhs);
}

double check_union_bound(const HermitianOperator& p, const HermitianOperator& q) {
  require_effect(p, "P");
  require_effect(q, "Q");
  const Matrix ip = Matrix::Identity(p.dim(), p.dim()), iq = Matrix::Identity(q.dim(), q.dim());
  const Matrix rhs = kron(ip - p.matrix(), iq) + kron(ip, iq - q.matrix());
  const Matrix lhs = kron(ip, iq) - kron(p.matrix(), q.matrix());
  return min_eigenvalue(rhs - lhs);
}

GentleOperatorReport check_gentle_operator(const std::vector<double>& probs, const std::vector<DensityOperator>& states,
                                           const HermitianOperator& lambda) {
  require_effect(lambda, "Lambda");
  if (probs.size() != states.size() || probs.empty()) throw Error(ErrorKind::DimMismatch, "ensemble size mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw Error(ErrorKind::PreconditionViolated, "negative ensemble weight", p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::PreconditionViolated, "ensemble weights must sum to 1", total);

  const Matrix root = sqrt_psd(lambda).matrix();
  GentleOperatorReport r;
  double overlap = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const Matrix& rho = states[k].matrix();
    if (rho.rows() != lambda.dim()) throw Error(ErrorKind::DimMismatch, "state dimension mismatch");
    overlap += probs[k] * (lambda.matrix() * rho).trace().real();
    const Matrix diff = root * rho * root - rho;
    r.average_distance += probs[k] * trace_norm(0.5 * (diff + diff.adjoint()));
  }
  r.epsilon = std::clamp(1.0 - overlap, 0.0, 1.0);
  r.bound = 2.0 * std::sqrt(r.epsilon);
  return r;
}

namespace random_ops {

Matrix ginibre(std::mt19937_64& gen, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = Complex(normal(gen), normal(gen));
  return g;
}

DensityOperator density(std::mt19937_64& gen, int dim, int rank) {
  const Matrix g = ginibre(gen, dim, rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::trusted(rho);
}

HermitianOperator effect(std::mt19937_64& gen, int dim) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(gen, dim, dim));
  const Matrix u = qr.householderQ();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealVector w(dim);
  for (int i = 0; i < dim; ++i) w(i) = unif(gen);
  return HermitianOperator::trusted(u * w.cast<Complex>().asDiagonal() * u.adjoint());
}

HermitianOperator projector(std::mt19937_64& gen, int dim, int rank) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(gen, dim, dim));
  const Matrix q = Matrix(qr.householderQ()).leftCols(rank);
  return HermitianOperator::trusted(q * q.adjoint());
}

}  // namespace random_ops

void LemmaSuiteConfig::validate() const {
  if (dim_min < 2 || dim_max < dim_min) throw Error(ErrorKind::InvalidConfig, "dimension range must satisfy 2 <= min <= max");
  if (instances < 1) throw Error(ErrorKind::InvalidConfig, "instances must be positive");
  if (max_projector_dim < 2) throw Error(ErrorKind::InvalidConfig, "max_projector_dim must be at least 2");
}

std::vector<SuiteResult> run_lemma_suite(const LemmaSuiteConfig& cfg) {
  cfg.validate();
  std::vector<SuiteResult> out(7);
  const char* names[] = {"trace_substitution", "hayashi_nagaoka", "union_bound", "gentle_operator",
                         "typical_rank",       "typical_sandwich", "typical_lower"};
  for (int k = 0; k < 7; ++k) out[static_cast<std::size_t>(k)].name = names[k];

  const int span = cfg.dim_max - cfg.dim_min + 1;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < cfg.instances; ++i) {
    const int d = cfg.dim_min + i % span;
    std::mt19937_64 gen(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(i));
    std::uniform_int_distribution<int> rank_of(1, d);

    // Trace substitution.
    {
      const HermitianOperator lambda = random_ops::effect(gen, d);
      const DensityOperator rho = random_ops::density(gen, d, rank_of(gen));
      const DensityOperator sigma = random_ops::density(gen, d, rank_of(gen));
      record(out[0], check_trace_substitution(lambda, rho, sigma));
    }

    // Hayashi-Nagaoka: odd instances put a weak T almost inside the range of
    // a projector S, where the inequality is nearly tight.
    {
      HermitianOperator s = HermitianOperator::zero(d), t = HermitianOperator::zero(d);
      if (i % 2 == 0) {
        s = random_ops::effect(gen, d);
        const Matrix g = random_ops::ginibre(gen, d, rank_of(gen));
        t = HermitianOperator::trusted(g * g.adjoint() * (unif(gen) / d));
      } else {
        Eigen::HouseholderQR<Matrix> qr(random_ops::ginibre(gen, d, d));
        const Matrix q = qr.householderQ();
        const int r = std::max(1, d / 2);
        s = HermitianOperator::trusted(q.leftCols(r) * q.leftCols(r).adjoint());
        const double theta = 0.005 + 0.015 * unif(gen);
        const double weight = 0.1 + 0.2 * unif(gen);
        const Eigen::VectorXcd psi = std::cos(theta) * q.col(0) + std::sin(theta) * q.col(r);
        t = HermitianOperator::trusted(weight * psi * psi.adjoint());
      }
      record(out[1], check_hayashi_nagaoka(s, t, cfg.hn));
    }

    // Union bound on a (d, d') pair.
    {
      const int d2 = cfg.dim_min + (i * 7 + 3) % span;
      record(out[2], check_union_bound(random_ops::effect(gen, d), random_ops::effect(gen, d2)));
    }

    // Gentle operator.
    {
      const int size = 2 + i % 4;
      std::vector<double> probs(static_cast<std::size_t>(size));
      std::vector<DensityOperator> states;
      double z = 0.0;
      for (auto& p : probs) z += (p = unif(gen) + 1e-3);
      for (auto& p : probs) p /= z;
      for (int k = 0; k < size; ++k) states.push_back(random_ops::density(gen, d, rank_of(gen)));
      // Mix the identity in so that both small and large epsilon occur.
      const double w = unif(gen);
      const HermitianOperator e = random_ops::effect(gen, d);
      const HermitianOperator lambda =
          HermitianOperator::trusted(w * Matrix::Identity(d, d) + (1.0 - w) * e.matrix());
      record(out[3], check_gentle_operator(probs, states, lambda).margin());
    }

    // Typical projector bounds: n as large as the product cap allows.
    {
      int n = 1;
      while (std::pow(static_cast<double>(d), n + 1) <= cfg.max_projector_dim) ++n;
      const TypicalityParams p{n, 0.05 + 0.45 * unif(gen)};
      std::vector<DensityOperator> states;
      double entropy = 0.0;
      TypicalProjector pi;
      if (i % 2 == 0) {
        const DensityOperator rho = random_ops::density(gen, d, rank_of(gen));
        states.assign(static_cast<std::size_t>(n), rho);
        entropy = von_neumann_entropy(rho);
        pi = average_typical_projector(rho, p);
      } else {
        for (int k = 0; k < n; ++k) {
          states.push_back(random_ops::density(gen, d, rank_of(gen)));
          entropy += von_neumann_entropy(states.back());
        }
        entropy /= n;
        pi = conditional_typical_projector(states, p);
      }
      const ProjectorBoundsReport r = projector_bounds_check(pi, states, entropy, p);
      record(out[4], r.rank_bound - static_cast<double>(r.rank));
      record(out[5], r.sandwich_margin);
      record(out[6], r.lower_margin);
    }
  }
  return out;
}

}  // namespace qrelay
