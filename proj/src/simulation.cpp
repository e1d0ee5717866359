#include "qrelay/simulation.hpp"

#include <cmath>
#include <random>

#include "qrelay/parallel.hpp"

namespace qrelay {

const char* to_string(SimMode mode) { return mode == SimMode::Exact ? "exact" : "hn"; }
const char* to_string(WindowMode mode) { return mode == WindowMode::Genie ? "genie" : "chained"; }

void SimulationConfig::validate(const RelayChannel& channel) const {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "n must be at least 1");
  if (blocks < 2) throw Error(ErrorKind::InvalidConfig, "at least two blocks are required", blocks);
  if (trials < 1) throw Error(ErrorKind::InvalidConfig, "trials must be positive");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidConfig, "delta must be positive");
  if (rates.r_m < 0.0 || rates.r_ell < 0.0) throw Error(ErrorKind::InvalidConfig, "rates must be nonnegative");
  if (mode == SimMode::HnBound && window == WindowMode::Chained) {
    throw Error(ErrorKind::InvalidConfig, "chained windows need sampled decisions, which only exact mode produces");
  }
  checked_power(channel.dim_b1(), n, dim_cap, "relay B1^n");
  if (mode == SimMode::Exact) {
    checked_power(channel.dim_b(), 2 * n, dim_cap, "exact-mode B^n B^n");
  } else {
    checked_power(channel.dim_b(), n, dim_cap, "hn-mode B^n");
  }
}

Estimate estimate(const std::vector<double>& samples) {
  Estimate e;
  if (samples.empty()) return e;
  const double t = static_cast<double>(samples.size());
  for (double s : samples) e.mean += s;
  e.mean /= t;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - e.mean) * (s - e.mean);
    e.sd = std::sqrt(ss / (t - 1.0));
  }
  e.half_width = 1.96 * e.sd / std::sqrt(t);
  return e;
}

namespace {

struct TrialResult {
  std::vector<double> relay, dest, alpha, beta, term_a, term_b, total;
  int relay_wrong = 0;
  int propagated = 0;
};

std::size_t sample_outcome(std::mt19937_64& gen, const std::vector<double>& probs) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = unif(gen);
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (r < acc) return k;
  }
  return probs.size() - 1;  // completion
}

Matrix product_b(const RelayChannel& ch, const Word& x, const Word& x1) {
  return product_state(block_outputs(ch, x, x1).b);
}

Matrix product_b1(const RelayChannel& ch, const Word& x, const Word& x1) {
  return product_state(block_outputs(ch, x, x1).b1);
}

TrialResult run_trial(const CodeState& cs, const SimulationConfig& cfg, std::uint64_t trial_seed) {
  const RelayChannel& ch = cs.channel();
  const int b = cfg.blocks;
  const auto ub = static_cast<std::size_t>(b);
  const TypicalityParams p{cfg.n, cfg.delta};
  const DimensionCap cap{cfg.dim_cap};

  // Index 0 is unused so that codebooks[j] serves block j.
  std::vector<CodebookEnsemble> cbs(ub + 1);
  for (int j = 1; j <= b; ++j) cbs[static_cast<std::size_t>(j)] = sample_codebooks(cs, cfg.n, cfg.rates, trial_seed, j, cfg.limits);
  const std::size_t M = cbs[1].m_count, L = cbs[1].l_count;

  std::seed_seq seq{static_cast<std::uint32_t>(trial_seed), static_cast<std::uint32_t>(trial_seed >> 32), 0x6d736773u};
  std::mt19937_64 gen(seq);
  std::uniform_int_distribution<std::size_t> draw_m(0, M - 1), draw_l(0, L - 1);

  // Messages; l[0] = 0 known, block b dummy (0, 0).
  std::vector<std::size_t> m(ub + 1, 0), l(ub + 1, 0);
  for (std::size_t j = 1; j < ub; ++j) {
    m[j] = draw_m(gen);
    l[j] = draw_l(gen);
  }

  TrialResult r;
  // Relay: block j is encoded with the relay's own previous decision.
  std::vector<std::size_t> lhat(ub + 1, 0);
  std::vector<Word> x_in(ub + 1), x1_in(ub + 1);
  for (std::size_t j = 1; j <= ub; ++j) {
    const CodebookEnsemble& cb = cbs[j];
    x1_in[j] = cb.x1_word(lhat[j - 1]);
    x_in[j] = cb.x_word(l[j - 1], l[j], m[j]);
    if (j == ub) break;
    const RelayMeasurement meas = relay_measurement(cb, cs, lhat[j - 1], p, cap);
    const auto probs = meas.outcome_probabilities(product_b1(ch, x_in[j], x1_in[j]));
    r.relay.push_back(std::min(1.0, std::max(0.0, 1.0 - probs[l[j]])));
    const std::size_t k = sample_outcome(gen, probs);
    lhat[j] = k < L ? k : 0;
    if (lhat[j] != l[j]) ++r.relay_wrong;
  }

  // Destination: window j uses blocks j and j + 1.
  std::vector<std::size_t> dhat(ub + 1, 0);
  for (std::size_t j = 1; j < ub; ++j) {
    const std::size_t assumed = cfg.window == WindowMode::Genie ? l[j - 1] : dhat[j - 1];
    if (assumed != l[j - 1]) ++r.propagated;
    const Matrix rho_j = product_b(ch, x_in[j], x1_in[j]);
    const Matrix rho_next = product_b(ch, x_in[j + 1], x1_in[j + 1]);

    DestinationDetectors det;
    if (cfg.mode == SimMode::Exact) {
      AndMeasurement meas = and_measurement(cbs[j], cbs[j + 1], cs, assumed, p, cap);
      const auto probs = meas.outcome_probabilities(rho_j, rho_next);
      r.dest.push_back(std::min(1.0, std::max(0.0, 1.0 - probs[l[j] * M + m[j]])));
      const std::size_t k = sample_outcome(gen, probs);
      dhat[j] = k < L * M ? k / M : 0;
      det = std::move(meas.detectors);
    } else {
      det = destination_detectors(cbs[j], cbs[j + 1], cs, assumed, p, cap);
    }
    const HnComponents c = hn_bound_components(det, m[j], l[j], rho_j, rho_next);
    r.alpha.push_back(c.alpha);
    r.beta.push_back(c.beta);
    r.term_a.push_back(c.term_a);
    r.term_b.push_back(c.term_b);
    r.total.push_back(c.total());
    if (cfg.mode == SimMode::HnBound) r.dest.push_back(std::min(1.0, std::max(0.0, c.total())));
  }
  return r;
}

std::vector<double> column(const std::vector<TrialResult>& rs, std::vector<double> TrialResult::*field,
                           std::size_t block) {
  std::vector<double> out;
  out.reserve(rs.size());
  for (const auto& r : rs) out.push_back((r.*field)[block]);
  return out;
}

std::vector<double> block_average(const std::vector<TrialResult>& rs, std::vector<double> TrialResult::*field) {
  std::vector<double> out;
  out.reserve(rs.size());
  for (const auto& r : rs) {
    const auto& v = r.*field;
    double s = 0.0;
    for (double x : v) s += x;
    out.push_back(v.empty() ? 0.0 : s / static_cast<double>(v.size()));
  }
  return out;
}

}  // namespace

SimulationReport run_simulation(const RelayChannel& channel, const InputDistribution& dist,
                                const SimulationConfig& cfg) {
  cfg.validate(channel);
  const CodeState cs = build_code_state(channel, dist);

  SimulationReport rep;
  rep.config = cfg;
  rep.m_count = cfg.rates.m_count(cfg.n);
  rep.l_count = cfg.rates.l_count(cfg.n);
  if (static_cast<double>(rep.m_count) * static_cast<double>(rep.l_count) > static_cast<double>(cfg.limits.max_messages)) {
    throw Error(ErrorKind::SizeCap, "|M||L| exceeds the message cap", static_cast<double>(rep.m_count * rep.l_count));
  }
  rep.effective_rate = (cfg.blocks - 1.0) / cfg.blocks * cfg.rates.total();
  rep.destination_is_bound = cfg.mode == SimMode::HnBound;

  std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
  detail::parallel_for(results.size(), cfg.threads, [&](std::size_t t) {
    results[t] = run_trial(cs, cfg, cfg.seed + static_cast<std::uint64_t>(t));
  });

  const std::size_t info_blocks = static_cast<std::size_t>(cfg.blocks - 1);
  for (std::size_t j = 0; j < info_blocks; ++j) {
    rep.relay_error.push_back(estimate(column(results, &TrialResult::relay, j)));
    rep.destination_error.push_back(estimate(column(results, &TrialResult::dest, j)));
    rep.hn.push_back({estimate(column(results, &TrialResult::alpha, j)), estimate(column(results, &TrialResult::beta, j)),
                      estimate(column(results, &TrialResult::term_a, j)),
                      estimate(column(results, &TrialResult::term_b, j)),
                      estimate(column(results, &TrialResult::total, j))});
  }
  rep.relay_overall = estimate(block_average(results, &TrialResult::relay));
  rep.destination_overall = estimate(block_average(results, &TrialResult::dest));
  rep.hn_overall = {estimate(block_average(results, &TrialResult::alpha)),
                    estimate(block_average(results, &TrialResult::beta)),
                    estimate(block_average(results, &TrialResult::term_a)),
                    estimate(block_average(results, &TrialResult::term_b)),
                    estimate(block_average(results, &TrialResult::total))};

  double wrong = 0.0, propagated = 0.0;
  for (const auto& r : results) {
    wrong += r.relay_wrong;
    propagated += r.propagated;
  }
  const double windows = static_cast<double>(cfg.trials) * static_cast<double>(info_blocks);
  rep.relay_decision_error_rate = wrong / windows;
  rep.propagated_window_rate = propagated / windows;
  return rep;
}

}  // namespace qrelay
