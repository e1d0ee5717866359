#pragma once

// Monte Carlo simulation of the b-block partial decode-forward scheme.
//
// Conventions: the initial relay message l_0 is index 0 and known to all
// parties; block b carries the dummy pair (m_b, l_b) = (0, 0), so b - 1
// blocks carry information and the effective rate is (b - 1)/b of the
// nominal one.

#include <cstdint>
#include <string>
#include <vector>

#include "qrelay/measurement.hpp"

namespace qrelay {

enum class SimMode { Exact, HnBound };
enum class WindowMode { Genie, Chained };

const char* to_string(SimMode mode);
const char* to_string(WindowMode mode);

struct SimulationConfig {
  int n = 4;
  int blocks = 2;
  RateSplit rates;
  double delta = 0.5;
  int trials = 200;
  std::uint64_t seed = 1;
  SimMode mode = SimMode::Exact;
  WindowMode window = WindowMode::Genie;
  std::size_t dim_cap = 4096;
  CodebookLimits limits;
  int threads = 1;

  /// Throws InvalidConfig or SizeCap (with the offending dimension).
  void validate(const RelayChannel& channel) const;
};

struct Estimate {
  double mean = 0.0;
  double sd = 0.0;          // sample standard deviation over trials
  double half_width = 0.0;  // 1.96 sd / sqrt(trials)
};

Estimate estimate(const std::vector<double>& samples);

struct HnEstimates {
  Estimate alpha, beta, term_a, term_b, total;
};

struct SimulationReport {
  SimulationConfig config;
  std::size_t m_count = 1;
  std::size_t l_count = 1;
  double effective_rate = 0.0;  // (b - 1)/b * (r_m + r_ell)
  bool destination_is_bound = false;
  /// Indexed by information-carrying block j = 1..b-1 (entry j - 1).
  std::vector<Estimate> relay_error;
  std::vector<Estimate> destination_error;
  std::vector<HnEstimates> hn;
  /// Averages over blocks.
  Estimate relay_overall;
  Estimate destination_overall;
  HnEstimates hn_overall;
  /// Fraction of (trial, block) pairs where the sampled relay decision was wrong.
  double relay_decision_error_rate = 0.0;
  /// Chained exact mode only: fraction of windows decoded with a wrong l_{j-1}.
  double propagated_window_rate = 0.0;
};

SimulationReport run_simulation(const RelayChannel& channel, const InputDistribution& dist,
                                const SimulationConfig& cfg);

}  // namespace qrelay
