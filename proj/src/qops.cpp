#include "qrelay/qops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace qrelay {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::BadSubsystemIndex: return "BadSubsystemIndex";
    case ErrorKind::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::InvalidDistribution: return "InvalidDistribution";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::SizeCap: return "SizeCap";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InequalityViolated: return "InequalityViolated";
    case ErrorKind::IncompleteTable: return "IncompleteTable";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

double hermiticity_defect(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Applies f to each eigenvalue and rebuilds V f(D) V^dagger.
Matrix spectral_map(const Matrix& hermitian, const std::function<double(double, double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  const RealVector& w = solver.eigenvalues();
  const double lambda_max = w.size() > 0 ? w.maxCoeff() : 0.0;
  RealVector mapped(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) mapped(i) = f(w(i), lambda_max);
  const Matrix& v = solver.eigenvectors();
  return v * mapped.asDiagonal() * v.adjoint();
}

}  // namespace

HermitianOperator::HermitianOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorKind::DimMismatch, "operator matrix is not square");
  }
  const double defect = hermiticity_defect(m_);
  if (defect > tolerance::kHermitian) {
    std::ostringstream os;
    os << "max |A - A^dagger| = " << defect;
    throw Error(ErrorKind::NotHermitian, os.str(), defect);
  }
}

HermitianOperator HermitianOperator::trusted(const Matrix& m) {
  return HermitianOperator(symmetrize(m), TrustedTag{});
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
  return HermitianOperator(Matrix::Identity(dim, dim), TrustedTag{});
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(Matrix::Zero(dim, dim), TrustedTag{});
}

DensityOperator DensityOperator::trusted(const Matrix& m, std::vector<int> dims) {
  return DensityOperator(symmetrize(m), std::move(dims));
}

DensityOperator DensityOperator::trusted(const Matrix& m) {
  return trusted(m, {static_cast<int>(m.rows())});
}

DensityOperator DensityOperator::maximally_mixed(int dim) {
  return DensityOperator(Matrix::Identity(dim, dim) / static_cast<double>(dim), {dim});
}

DensityOperator DensityOperator::pure(const Eigen::VectorXcd& ket) {
  const Eigen::VectorXcd k = ket.normalized();
  return DensityOperator(k * k.adjoint(), {static_cast<int>(k.size())});
}

DensityOperator DensityOperator::diagonal(std::span<const double> probabilities) {
  const auto d = static_cast<Eigen::Index>(probabilities.size());
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) m(i, i) = probabilities[static_cast<std::size_t>(i)];
  return DensityOperator(std::move(m), {static_cast<int>(d)});
}

Matrix EigenDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EigenDecomposition eigh(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  const Eigen::Index d = hermitian.rows();
  EigenDecomposition out;
  out.eigenvalues.resize(d);
  out.eigenvectors.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index src = d - 1 - i;
    out.eigenvalues(i) = solver.eigenvalues()(src);
    Eigen::VectorXcd v = solver.eigenvectors().col(src);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (std::abs(v(k)) > 1e-12) {
        v *= std::conj(v(k)) / std::abs(v(k));
        v(k) = Complex(v(k).real(), 0.0);
        break;
      }
    }
    out.eigenvectors.col(i) = v;
  }
  return out;
}

RealVector eigenvalues(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

DensityOperator validate_density(const Matrix& m, std::vector<int> subsystem_dims) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::DimMismatch, "matrix is not square");
  }
  long long product = 1;
  for (int d : subsystem_dims) {
    if (d <= 0) throw Error(ErrorKind::DimMismatch, "subsystem dimensions must be positive");
    product *= d;
  }
  if (subsystem_dims.empty() || product != m.rows()) {
    std::ostringstream os;
    os << "subsystem dims multiply to " << product << " but matrix dim is " << m.rows();
    throw Error(ErrorKind::DimMismatch, os.str());
  }
  const double defect = hermiticity_defect(m);
  if (defect > tolerance::kHermitian) {
    std::ostringstream os;
    os << "max |A - A^dagger| = " << defect;
    throw Error(ErrorKind::NotHermitian, os.str(), defect);
  }
  const Matrix h = symmetrize(m);
  const double lambda_min = min_eigenvalue(h);
  if (lambda_min < tolerance::kPsdFloor) {
    std::ostringstream os;
    os << "min eigenvalue " << lambda_min;
    throw Error(ErrorKind::NotPSD, os.str(), lambda_min);
  }
  const double trace = h.trace().real();
  if (std::abs(trace - 1.0) > tolerance::kTrace) {
    std::ostringstream os;
    os.precision(12);
    os << "trace " << trace;
    throw Error(ErrorKind::TraceNotOne, os.str(), trace);
  }
  return DensityOperator(h, std::move(subsystem_dims));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  std::vector<int> dims = a.subsystem_dims();
  dims.insert(dims.end(), b.subsystem_dims().begin(), b.subsystem_dims().end());
  return DensityOperator::trusted(kron(a.matrix(), b.matrix()), std::move(dims));
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
  const auto& dims = rho.subsystem_dims();
  const int k = static_cast<int>(dims.size());
  std::vector<bool> kept(static_cast<std::size_t>(k), false);
  for (int idx : keep) {
    if (idx < 0 || idx >= k) {
      throw Error(ErrorKind::BadSubsystemIndex, "subsystem index " + std::to_string(idx) +
                                                    " out of range for " + std::to_string(k) +
                                                    " subsystems");
    }
    kept[static_cast<std::size_t>(idx)] = true;
  }

  std::vector<int> out_dims;
  Eigen::Index keep_dim = 1;
  Eigen::Index traced_dim = 1;
  for (int s = 0; s < k; ++s) {
    if (kept[static_cast<std::size_t>(s)]) {
      out_dims.push_back(dims[static_cast<std::size_t>(s)]);
      keep_dim *= dims[static_cast<std::size_t>(s)];
    } else {
      traced_dim *= dims[static_cast<std::size_t>(s)];
    }
  }

  // Split every full index into its kept and traced parts (both left-major).
  const Eigen::Index full = rho.dim();
  std::vector<std::vector<Eigen::Index>> by_traced(static_cast<std::size_t>(traced_dim),
                                                   std::vector<Eigen::Index>(static_cast<std::size_t>(keep_dim)));
  for (Eigen::Index i = 0; i < full; ++i) {
    Eigen::Index rem = i;
    Eigen::Index kept_idx = 0, traced_idx = 0, kept_stride = 1, traced_stride = 1;
    for (int s = k - 1; s >= 0; --s) {
      const int d = dims[static_cast<std::size_t>(s)];
      const Eigen::Index digit = rem % d;
      rem /= d;
      if (kept[static_cast<std::size_t>(s)]) {
        kept_idx += digit * kept_stride;
        kept_stride *= d;
      } else {
        traced_idx += digit * traced_stride;
        traced_stride *= d;
      }
    }
    by_traced[static_cast<std::size_t>(traced_idx)][static_cast<std::size_t>(kept_idx)] = i;
  }

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  const Matrix& m = rho.matrix();
  for (const auto& rows : by_traced) {
    for (Eigen::Index a = 0; a < keep_dim; ++a) {
      for (Eigen::Index b = 0; b < keep_dim; ++b) {
        out(a, b) += m(rows[static_cast<std::size_t>(a)], rows[static_cast<std::size_t>(b)]);
      }
    }
  }
  if (out_dims.empty()) out_dims.push_back(1);
  return DensityOperator::trusted(out, std::move(out_dims));
}

double entropy_of_spectrum(const RealVector& eigenvalues) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double lambda = eigenvalues(i);
    if (lambda > 0.0) h -= lambda * std::log2(lambda);
  }
  return h;
}

double von_neumann_entropy(const Matrix& rho) { return entropy_of_spectrum(eigenvalues(rho)); }

double von_neumann_entropy(const DensityOperator& rho) { return von_neumann_entropy(rho.matrix()); }

double trace_norm(const Matrix& hermitian) { return eigenvalues(hermitian).cwiseAbs().sum(); }

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::DimMismatch, "trace distance between states of different dimension");
  }
  return trace_norm(rho.matrix() - sigma.matrix());
}

HermitianOperator sqrt_pinv(const HermitianOperator& a) {
  const double lambda_min = min_eigenvalue(a.matrix());
  if (lambda_min < tolerance::kPsdFloor) {
    throw Error(ErrorKind::NotPSD, "sqrt_pinv of an operator with eigenvalue " + std::to_string(lambda_min),
                lambda_min);
  }
  return HermitianOperator::trusted(spectral_map(a.matrix(), [](double w, double w_max) {
    return (w_max > 0.0 && w > tolerance::kPinvRelativeCutoff * w_max) ? 1.0 / std::sqrt(w) : 0.0;
  }));
}

HermitianOperator sqrt_psd(const HermitianOperator& a) {
  return HermitianOperator::trusted(
      spectral_map(a.matrix(), [](double w, double) { return w > 0.0 ? std::sqrt(w) : 0.0; }));
}

HermitianOperator support_projector(const HermitianOperator& a) {
  return HermitianOperator::trusted(spectral_map(a.matrix(), [](double w, double w_max) {
    return (w_max > 0.0 && w > tolerance::kPinvRelativeCutoff * w_max) ? 1.0 : 0.0;
  }));
}

double operator_order_margin(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimMismatch, "operator comparison across different dimensions");
  }
  return min_eigenvalue(b.matrix() - a.matrix());
}

bool operator_leq(const HermitianOperator& a, const HermitianOperator& b) {
  return operator_order_margin(a, b) >= tolerance::kOperatorOrder;
}

}  // namespace qrelay
