#include "qrelay/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qrelay {

namespace {

// Tr[A B] for square matrices of equal size.
Complex trace_product(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b.transpose()).sum(); }

Matrix sandwich(const Matrix& outer, const Matrix& inner) { return outer * inner * outer; }

std::vector<DensityOperator> b_states(const RelayChannel& ch, const Word& x, const Word& x1) {
  std::vector<DensityOperator> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(ch.b_state(x[i], x1[i]));
  return out;
}

std::vector<DensityOperator> b1_states(const RelayChannel& ch, const Word& x, const Word& x1) {
  std::vector<DensityOperator> out;
  out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out.push_back(ch.b1_state(x[i], x1[i]));
  return out;
}

TypicalityParams params_for(const CodebookEnsemble& cb, const TypicalityParams& p) {
  TypicalityParams q = p;
  q.n = cb.n;
  q.validate();
  return q;
}

void check_prev(const CodebookEnsemble& cb, std::size_t ell_prev) {
  if (ell_prev >= cb.l_count) {
    throw Error(ErrorKind::AlphabetMismatch, "previous relay message out of range", static_cast<double>(ell_prev));
  }
}

std::size_t label_index(const Povm& povm, std::size_t m, std::size_t l) {
  for (std::size_t k = 0; k < povm.labels.size(); ++k) {
    const auto& lab = povm.labels[k];
    if (!lab.completion && lab.m == m && lab.l == l) return k;
  }
  throw Error(ErrorKind::AlphabetMismatch, "no POVM element for the requested message");
}

// Tr[Lambda (A (x) B)] with Lambda on the D^2-dimensional product space.
double trace_against_product(const Matrix& lambda, const Matrix& a, const Matrix& b) {
  const Eigen::Index d = a.rows();
  Complex total = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (a(j, i) == Complex(0.0)) continue;
      total += a(j, i) * trace_product(lambda.block(i * d, j * d, d, d), b);
    }
  return total.real();
}

}  // namespace

double Povm::closure_defect() const {
  if (elements.empty()) return 0.0;
  Matrix sum = Matrix::Zero(elements.front().dim(), elements.front().dim());
  for (const auto& e : elements) sum += e.matrix();
  sum -= Matrix::Identity(sum.rows(), sum.cols());
  return sum.cwiseAbs().maxCoeff();
}

double Povm::min_element_eigenvalue() const {
  double out = 0.0;
  bool first = true;
  for (const auto& e : elements) {
    const double v = min_eigenvalue(e.matrix());
    out = first ? v : std::min(out, v);
    first = false;
  }
  return out;
}

Povm square_root_measurement(const std::vector<Matrix>& detectors, std::vector<PovmOutcome> labels) {
  if (detectors.empty()) throw Error(ErrorKind::InvalidConfig, "square-root measurement needs at least one detector");
  if (labels.size() != detectors.size()) throw Error(ErrorKind::DimMismatch, "one label per detector required");
  const Eigen::Index d = detectors.front().rows();
  Matrix s = Matrix::Zero(d, d);
  for (const auto& p : detectors) {
    if (p.rows() != d || p.cols() != d) throw Error(ErrorKind::DimMismatch, "detectors differ in dimension");
    s += p;
  }
  const Matrix n = sqrt_pinv(HermitianOperator::trusted(s)).matrix();
  Povm povm;
  povm.labels = std::move(labels);
  Matrix rest = Matrix::Identity(d, d);
  for (const auto& p : detectors) {
    povm.elements.push_back(HermitianOperator::trusted(n * p * n));
    rest -= povm.elements.back().matrix();
  }
  povm.labels.push_back({0, 0, true});
  povm.elements.push_back(HermitianOperator::trusted(rest));
  return povm;
}

BlockOutputs block_outputs(const RelayChannel& channel, const Word& x, const Word& x1) {
  if (x.size() != x1.size()) throw Error(ErrorKind::DimMismatch, "input words differ in length");
  return {b1_states(channel, x, x1), b_states(channel, x, x1)};
}

std::size_t checked_power(int base, int exponent, std::size_t cap, const char* what) {
  double v = 1.0;
  for (int i = 0; i < exponent; ++i) v *= base;
  if (v > static_cast<double>(cap)) {
    std::ostringstream os;
    os << what << " dimension " << v << " exceeds cap " << cap;
    throw Error(ErrorKind::SizeCap, os.str(), v);
  }
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------- Relay ---

std::vector<Matrix> relay_detectors(const CodebookEnsemble& cb, const CodeState& cs, std::size_t ell_prev,
                                    const TypicalityParams& p, DimensionCap cap) {
  const TypicalityParams q = params_for(cb, p);
  check_prev(cb, ell_prev);
  checked_power(cs.channel().dim_b1(), cb.n, cap.max_dim, "relay B1^n");
  const Word& x1 = cb.x1_word(ell_prev);

  std::vector<DensityOperator> avg;
  for (int s : x1) avg.push_back(cs.sigma_bar(s));
  const Matrix outer = conditional_typical_projector(avg, q).dense();

  std::vector<Matrix> out;
  out.reserve(cb.l_count);
  for (std::size_t l = 0; l < cb.l_count; ++l) {
    const Word& u = cb.u_word(ell_prev, l);
    std::vector<DensityOperator> cond;
    for (std::size_t i = 0; i < u.size(); ++i) cond.push_back(cs.sigma(u[i], x1[i]));
    out.push_back(sandwich(outer, conditional_typical_projector(cond, q).dense()));
  }
  return out;
}

std::vector<double> RelayMeasurement::outcome_probabilities(const Matrix& rho) const {
  const Matrix x = normalizer.matrix() * rho * normalizer.matrix();
  std::vector<double> out;
  double sum = 0.0;
  for (const auto& p : detectors) {
    out.push_back(std::max(0.0, trace_product(p, x).real()));
    sum += out.back();
  }
  out.push_back(std::max(0.0, 1.0 - sum));
  return out;
}

Povm RelayMeasurement::povm() const {
  std::vector<PovmOutcome> labels;
  for (std::size_t l = 0; l < detectors.size(); ++l) labels.push_back({0, l, false});
  return square_root_measurement(detectors, std::move(labels));
}

RelayMeasurement relay_measurement(const CodebookEnsemble& cb, const CodeState& cs, std::size_t ell_prev,
                                   const TypicalityParams& p, DimensionCap cap) {
  RelayMeasurement r;
  r.detectors = relay_detectors(cb, cs, ell_prev, p, cap);
  Matrix s = Matrix::Zero(r.detectors.front().rows(), r.detectors.front().cols());
  for (const auto& d : r.detectors) s += d;
  r.normalizer = sqrt_pinv(HermitianOperator::trusted(s));
  return r;
}

Povm build_relay_srm(const CodebookEnsemble& cb, const CodeState& cs, std::size_t ell_prev,
                     const TypicalityParams& p, DimensionCap cap) {
  return relay_measurement(cb, cs, ell_prev, p, cap).povm();
}

double relay_error_exact(const CodebookEnsemble& cb, const CodeState& cs, const Povm& povm, std::size_t ell_prev) {
  check_prev(cb, ell_prev);
  const Word& x1 = cb.x1_word(ell_prev);
  double total = 0.0;
  for (std::size_t l = 0; l < cb.l_count; ++l) {
    const std::size_t k = label_index(povm, 0, l);
    for (std::size_t m = 0; m < cb.m_count; ++m) {
      const Matrix rho = product_state(b1_states(cs.channel(), cb.x_word(ell_prev, l, m), x1));
      total += 1.0 - trace_product(povm.elements[k].matrix(), rho).real();
    }
  }
  return total / static_cast<double>(cb.l_count * cb.m_count);
}

// ---------------------------------------------------------- Destination ---

DestinationDetectors destination_detectors(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next,
                                           const CodeState& cs, std::size_t ell_prev, const TypicalityParams& p,
                                           DimensionCap cap) {
  const TypicalityParams q = params_for(cb_j, p);
  check_prev(cb_j, ell_prev);
  if (cb_next.n != cb_j.n || cb_next.l_count != cb_j.l_count) {
    throw Error(ErrorKind::DimMismatch, "consecutive codebooks disagree on n or |L|");
  }
  checked_power(cs.channel().dim_b(), cb_j.n, cap.max_dim, "destination B^n");
  const RelayChannel& ch = cs.channel();

  DestinationDetectors det;
  det.m_count = cb_j.m_count;
  det.l_count = cb_j.l_count;

  // Block j.
  const Word& x1 = cb_j.x1_word(ell_prev);
  std::vector<DensityOperator> dbar;
  for (int s : x1) dbar.push_back(cs.rho_dbar(s));
  const TypicalProjector tp_dbar = conditional_typical_projector(dbar, q);
  det.range_j = tp_dbar.range_basis();
  const Matrix pi_dbar = det.range_j * det.range_j.adjoint();
  det.current.reserve(det.l_count * det.m_count);
  for (std::size_t l = 0; l < det.l_count; ++l) {
    const Word& u = cb_j.u_word(ell_prev, l);
    std::vector<DensityOperator> bar;
    for (std::size_t i = 0; i < u.size(); ++i) bar.push_back(cs.rho_bar(u[i], x1[i]));
    const Matrix outer = pi_dbar * conditional_typical_projector(bar, q).dense();
    for (std::size_t m = 0; m < det.m_count; ++m) {
      const Matrix inner = conditional_typical_projector(b_states(ch, cb_j.x_word(ell_prev, l, m), x1), q).dense();
      det.current.push_back(outer * inner * outer.adjoint());
    }
  }

  // Block j+1.
  det.range_next = average_typical_projector(cs.tau_bar(), q).range_basis();
  const Matrix pi_taubar = det.range_next * det.range_next.adjoint();
  det.next.reserve(det.l_count);
  for (std::size_t l = 0; l < det.l_count; ++l) {
    std::vector<DensityOperator> tau;
    for (int s : cb_next.x1_word(l)) tau.push_back(cs.tau(s));
    det.next.push_back(sandwich(pi_taubar, conditional_typical_projector(tau, q).dense()));
  }
  return det;
}

std::vector<double> AndMeasurement::outcome_probabilities(const Matrix& rho_j, const Matrix& rho_next) const {
  std::vector<double> out(detectors.l_count * detectors.m_count + 1, 0.0);
  const Eigen::Index r1 = v_j.cols(), r2 = v_next.cols();
  if (r1 == 0 || r2 == 0) {
    out.back() = 1.0;
    return out;
  }
  const Matrix& n = normalizer.matrix();
  const Matrix x = n * kron(v_j.adjoint() * rho_j * v_j, v_next.adjoint() * rho_next * v_next) * n;
  double sum = 0.0;
  Matrix t(r1, r1);
  for (std::size_t l = 0; l < detectors.l_count; ++l) {
    // t = Tr_2[(I (x) next_l) X]
    for (Eigen::Index i = 0; i < r1; ++i)
      for (Eigen::Index j = 0; j < r1; ++j) t(i, j) = trace_product(next_c[l], x.block(i * r2, j * r2, r2, r2));
    for (std::size_t m = 0; m < detectors.m_count; ++m) {
      const double v = std::max(0.0, trace_product(current_c[l * detectors.m_count + m], t).real());
      out[l * detectors.m_count + m] = v;
      sum += v;
    }
  }
  out.back() = std::max(0.0, 1.0 - sum);
  return out;
}

Povm AndMeasurement::povm() const {
  const Eigen::Index d = v_j.rows() * v_next.rows();
  const Matrix w = kron(v_j, v_next);
  const Matrix& n = normalizer.matrix();
  Povm povm;
  Matrix rest = Matrix::Identity(d, d);
  for (std::size_t l = 0; l < detectors.l_count; ++l)
    for (std::size_t m = 0; m < detectors.m_count; ++m) {
      povm.labels.push_back({m, l, false});
      Matrix e = Matrix::Zero(d, d);
      if (w.cols() > 0) e = w * (n * kron(current_c[l * detectors.m_count + m], next_c[l]) * n) * w.adjoint();
      povm.elements.push_back(HermitianOperator::trusted(e));
      rest -= povm.elements.back().matrix();
    }
  povm.labels.push_back({0, 0, true});
  povm.elements.push_back(HermitianOperator::trusted(rest));
  return povm;
}

AndMeasurement and_measurement(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next, const CodeState& cs,
                               std::size_t ell_prev, const TypicalityParams& p, DimensionCap cap) {
  checked_power(cs.channel().dim_b(), 2 * cb_j.n, cap.max_dim, "destination B^n B^n");
  AndMeasurement a;
  a.detectors = destination_detectors(cb_j, cb_next, cs, ell_prev, p, cap);
  a.v_j = a.detectors.range_j;
  a.v_next = a.detectors.range_next;
  for (const auto& c : a.detectors.current) a.current_c.push_back(a.v_j.adjoint() * c * a.v_j);
  for (const auto& c : a.detectors.next) a.next_c.push_back(a.v_next.adjoint() * c * a.v_next);
  const Eigen::Index r1 = a.v_j.cols(), r2 = a.v_next.cols();
  Matrix s = Matrix::Zero(r1 * r2, r1 * r2);
  if (r1 > 0 && r2 > 0) {
    for (std::size_t l = 0; l < a.detectors.l_count; ++l) {
      Matrix cur = Matrix::Zero(r1, r1);
      for (std::size_t m = 0; m < a.detectors.m_count; ++m) cur += a.current_c[l * a.detectors.m_count + m];
      s += kron(cur, a.next_c[l]);
    }
    a.normalizer = sqrt_pinv(HermitianOperator::trusted(s));
  }
  return a;
}

Povm build_destination_and_measurement(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next,
                                       const CodeState& cs, std::size_t ell_prev, const TypicalityParams& p,
                                       DimensionCap cap) {
  return and_measurement(cb_j, cb_next, cs, ell_prev, p, cap).povm();
}

double destination_error_for(const Povm& povm, std::size_t m, std::size_t l, const Matrix& rho_j,
                             const Matrix& rho_next) {
  const Matrix& lambda = povm.elements[label_index(povm, m, l)].matrix();
  if (lambda.rows() != rho_j.rows() * rho_next.rows()) throw Error(ErrorKind::DimMismatch, "POVM dimension mismatch");
  return 1.0 - trace_against_product(lambda, rho_j, rho_next);
}

double destination_error_exact(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next, const CodeState& cs,
                               const Povm& povm, std::size_t ell_prev, std::size_t m_next, std::size_t l_next) {
  check_prev(cb_j, ell_prev);
  const RelayChannel& ch = cs.channel();
  const Word& x1 = cb_j.x1_word(ell_prev);
  double total = 0.0;
  for (std::size_t l = 0; l < cb_j.l_count; ++l) {
    const Matrix rho_next =
        product_state(b_states(ch, cb_next.x_word(l, l_next, m_next), cb_next.x1_word(l)));
    for (std::size_t m = 0; m < cb_j.m_count; ++m) {
      const Matrix rho_j = product_state(b_states(ch, cb_j.x_word(ell_prev, l, m), x1));
      total += destination_error_for(povm, m, l, rho_j, rho_next);
    }
  }
  return total / static_cast<double>(cb_j.l_count * cb_j.m_count);
}

HnComponents hn_bound_components(const DestinationDetectors& det, std::size_t m, std::size_t l,
                                 const Matrix& rho_j, const Matrix& rho_next) {
  if (m >= det.m_count || l >= det.l_count) throw Error(ErrorKind::AlphabetMismatch, "message out of range");
  std::vector<double> a(det.current.size()), b(det.l_count);
  for (std::size_t k = 0; k < det.current.size(); ++k) a[k] = trace_product(det.current[k], rho_j).real();
  for (std::size_t k = 0; k < det.l_count; ++k) b[k] = trace_product(det.next[k], rho_next).real();

  HnComponents c;
  c.alpha = 1.0 - a[l * det.m_count + m];
  c.beta = 1.0 - b[l];
  for (std::size_t mp = 0; mp < det.m_count; ++mp)
    if (mp != m) c.term_a += a[l * det.m_count + mp] * b[l];
  for (std::size_t lp = 0; lp < det.l_count; ++lp) {
    if (lp == l) continue;
    double b1 = 0.0;
    for (std::size_t mp = 0; mp < det.m_count; ++mp) b1 += a[lp * det.m_count + mp];
    c.term_b += b1 * b[lp];
  }
  return c;
}

double term_b_dense(const DestinationDetectors& det, std::size_t l, const Matrix& rho_j, const Matrix& rho_next) {
  const Matrix rho = kron(rho_j, rho_next);
  double total = 0.0;
  for (std::size_t lp = 0; lp < det.l_count; ++lp) {
    if (lp == l) continue;
    for (std::size_t mp = 0; mp < det.m_count; ++mp) {
      total += trace_product(kron(det.current_at(mp, lp), det.next[lp]), rho).real();
    }
  }
  return total;
}

}  // namespace qrelay
