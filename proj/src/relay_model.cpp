#include "qrelay/relay_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qrelay {

RelayChannel::RelayChannel(int x_size, int x1_size, int dim_b1, int dim_b, std::vector<DensityOperator> states) {
  if (x_size <= 0 || x1_size <= 0 || dim_b1 <= 0 || dim_b <= 0) {
    throw Error(ErrorKind::DimMismatch, "alphabet sizes and output dimensions must be positive");
  }
  const auto pairs = static_cast<std::size_t>(x_size) * static_cast<std::size_t>(x1_size);
  if (states.size() != pairs) {
    std::ostringstream os;
    os << "expected " << pairs << " states, got " << states.size();
    throw Error(ErrorKind::IncompleteTable, os.str());
  }
  auto data = std::make_shared<Data>();
  data->x_size = x_size;
  data->x1_size = x1_size;
  data->dim_b1 = dim_b1;
  data->dim_b = dim_b;
  for (const auto& s : states) {
    DensityOperator joint = validate_density(s.matrix(), {dim_b1, dim_b});
    data->b.push_back(partial_trace(joint, {1}));
    data->b1.push_back(partial_trace(joint, {0}));
    data->b_entropy.push_back(von_neumann_entropy(data->b.back()));
    data->b1_entropy.push_back(von_neumann_entropy(data->b1.back()));
    data->joint.push_back(std::move(joint));
  }
  data_ = std::move(data);
}

std::size_t RelayChannel::index(int x, int x1) const {
  if (x < 0 || x >= data_->x_size || x1 < 0 || x1 >= data_->x1_size) {
    throw Error(ErrorKind::AlphabetMismatch, "channel input out of range");
  }
  return static_cast<std::size_t>(x) * data_->x1_size + x1;
}

InputDistribution::InputDistribution(int u_size, int x_size, int x1_size, std::vector<double> probs)
    : u_size_(u_size), x_size_(x_size), x1_size_(x1_size), probs_(std::move(probs)) {
  if (u_size <= 0 || x_size <= 0 || x1_size <= 0) {
    throw Error(ErrorKind::InvalidDistribution, "alphabet sizes must be positive");
  }
  if (probs_.size() != static_cast<std::size_t>(u_size) * x_size * x1_size) {
    throw Error(ErrorKind::InvalidDistribution, "probability table has the wrong size");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw Error(ErrorKind::InvalidDistribution, "negative or NaN probability", p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidDistribution, "probabilities sum to " + std::to_string(total), total);
  }
}

InputDistribution InputDistribution::uniform(int u_size, int x_size, int x1_size) {
  const std::size_t cells = static_cast<std::size_t>(u_size) * x_size * x1_size;
  return {u_size, x_size, x1_size, std::vector<double>(cells, 1.0 / static_cast<double>(cells))};
}

double InputDistribution::p_x1(int x1) const {
  double s = 0.0;
  for (int u = 0; u < u_size_; ++u)
    for (int x = 0; x < x_size_; ++x) s += (*this)(u, x, x1);
  return s;
}

double InputDistribution::p_u_x1(int u, int x1) const {
  double s = 0.0;
  for (int x = 0; x < x_size_; ++x) s += (*this)(u, x, x1);
  return s;
}

double InputDistribution::p_x_x1(int x, int x1) const {
  double s = 0.0;
  for (int u = 0; u < u_size_; ++u) s += (*this)(u, x, x1);
  return s;
}

double InputDistribution::p_u_given_x1(int u, int x1) const {
  const double px1 = p_x1(x1);
  return px1 > 0.0 ? p_u_x1(u, x1) / px1 : 1.0 / u_size_;
}

double InputDistribution::p_x_given_u_x1(int x, int u, int x1) const {
  const double pux1 = p_u_x1(u, x1);
  return pux1 > 0.0 ? (*this)(u, x, x1) / pux1 : 1.0 / x_size_;
}

double InputDistribution::p_x_given_x1(int x, int x1) const {
  const double px1 = p_x1(x1);
  return px1 > 0.0 ? p_x_x1(x, x1) / px1 : 1.0 / x_size_;
}

CodeState::CodeState(RelayChannel channel, InputDistribution dist)
    : channel_(std::move(channel)),
      dist_(std::move(dist)),
      tau_bar_(DensityOperator::maximally_mixed(1)) {}

CodeState build_code_state(const RelayChannel& channel, const InputDistribution& dist) {
  if (channel.x_size() != dist.x_size() || channel.x1_size() != dist.x1_size()) {
    std::ostringstream os;
    os << "distribution over |X|=" << dist.x_size() << ", |X1|=" << dist.x1_size() << " but channel has |X|="
       << channel.x_size() << ", |X1|=" << channel.x1_size();
    throw Error(ErrorKind::AlphabetMismatch, os.str());
  }
  CodeState cs(channel, dist);
  const int nu = dist.u_size(), nx = dist.x_size(), nx1 = dist.x1_size();
  const int db = channel.dim_b(), db1 = channel.dim_b1();

  std::vector<double> px1(static_cast<std::size_t>(nx1));
  for (int x1 = 0; x1 < nx1; ++x1) px1[static_cast<std::size_t>(x1)] = dist.p_x1(x1);

  ConditionalEntropies& h = cs.entropies_;
  Matrix tau_bar = Matrix::Zero(db, db);
  for (int x1 = 0; x1 < nx1; ++x1) {
    Matrix tau = Matrix::Zero(db, db);
    Matrix sigma_bar = Matrix::Zero(db1, db1);
    for (int u = 0; u < nu; ++u) {
      Matrix rho_bar = Matrix::Zero(db, db);
      Matrix sigma = Matrix::Zero(db1, db1);
      for (int x = 0; x < nx; ++x) {
        const double w = dist.p_x_given_u_x1(x, u, x1);
        if (w == 0.0) continue;
        rho_bar += w * channel.b_state(x, x1).matrix();
        sigma += w * channel.b1_state(x, x1).matrix();
      }
      const double pu = dist.p_u_given_x1(u, x1);
      tau += pu * rho_bar;
      sigma_bar += pu * sigma;
      cs.rho_bar_.push_back(DensityOperator::trusted(rho_bar));
      cs.sigma_.push_back(DensityOperator::trusted(sigma));

      const double pux1 = dist.p_u_x1(u, x1);
      if (pux1 > 0.0) {
        h.b_given_ux1 += pux1 * von_neumann_entropy(rho_bar);
        h.b1_given_ux1 += pux1 * von_neumann_entropy(sigma);
      }
    }
    tau_bar += px1[static_cast<std::size_t>(x1)] * tau;
    cs.tau_.push_back(DensityOperator::trusted(tau));
    cs.sigma_bar_.push_back(DensityOperator::trusted(sigma_bar));
    if (px1[static_cast<std::size_t>(x1)] > 0.0) {
      h.b_given_x1 += px1[static_cast<std::size_t>(x1)] * von_neumann_entropy(tau);
      h.b1_given_x1 += px1[static_cast<std::size_t>(x1)] * von_neumann_entropy(sigma_bar);
    }
  }
  // rho_bar_/sigma_ were filled in (x1, u) order; reorder to (u, x1).
  std::vector<DensityOperator> rho_bar_ordered, sigma_ordered;
  rho_bar_ordered.reserve(cs.rho_bar_.size());
  sigma_ordered.reserve(cs.sigma_.size());
  for (int u = 0; u < nu; ++u) {
    for (int x1 = 0; x1 < nx1; ++x1) {
      const auto k = static_cast<std::size_t>(x1) * nu + u;
      rho_bar_ordered.push_back(cs.rho_bar_[k]);
      sigma_ordered.push_back(cs.sigma_[k]);
    }
  }
  cs.rho_bar_ = std::move(rho_bar_ordered);
  cs.sigma_ = std::move(sigma_ordered);

  cs.tau_bar_ = DensityOperator::trusted(tau_bar);
  h.b = von_neumann_entropy(tau_bar);
  for (int x = 0; x < nx; ++x) {
    for (int x1 = 0; x1 < nx1; ++x1) {
      const double p = dist.p_x_x1(x, x1);
      if (p > 0.0) h.b_given_uxx1 += p * channel.b_entropy(x, x1);
    }
  }
  return cs;
}

double mutual_info_xx1_b(const CodeState& cs) {
  return cs.entropies().b - cs.entropies().b_given_uxx1;
}

double cond_mutual_info_u_b1_given_x1(const CodeState& cs) {
  return cs.entropies().b1_given_x1 - cs.entropies().b1_given_ux1;
}

double cond_mutual_info_x_b_given_x1u(const CodeState& cs) {
  // rho^B_{x,x1} does not depend on u, so H(B|U X X1) = H(B|X X1).
  return cs.entropies().b_given_ux1 - cs.entropies().b_given_uxx1;
}

double mutual_info_x1_b(const CodeState& cs) { return cs.entropies().b - cs.entropies().b_given_x1; }

double cond_mutual_info_ux_b_given_x1(const CodeState& cs) {
  return cs.entropies().b_given_x1 - cs.entropies().b_given_uxx1;
}

InfoQuantities pdf_rate(const CodeState& cs) {
  InfoQuantities q;
  q.i_xx1_b = mutual_info_xx1_b(cs);
  q.i_u_b1_given_x1 = cond_mutual_info_u_b1_given_x1(cs);
  q.i_x_b_given_x1u = cond_mutual_info_x_b_given_x1u(cs);
  q.pdf_rate = std::min(q.i_xx1_b, q.i_u_b1_given_x1 + q.i_x_b_given_x1u);
  return q;
}

InfoQuantities evaluate_rate(const RelayChannel& channel, const InputDistribution& dist) {
  return pdf_rate(build_code_state(channel, dist));
}

}  // namespace qrelay
