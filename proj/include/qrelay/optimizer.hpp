#pragma once

// Maximization of the partial decode-forward objective over p(u, x, x1).

#include <cstdint>
#include <vector>

#include "qrelay/relay_model.hpp"

namespace qrelay {

enum class SearchMode { Grid, MultistartLocal };

struct OptimizerConfig {
  int u_size = 0;  // 0 selects |U| = |X|
  int restarts = 8;
  int max_iters = 4000;
  std::uint64_t seed = 1;
  SearchMode mode = SearchMode::MultistartLocal;
  int grid_resolution = 16;
  int threads = 1;

  int effective_u_size(const RelayChannel& channel) const { return u_size > 0 ? u_size : channel.x_size(); }
  /// Throws InvalidConfig on nonpositive fields or grid_resolution < 2 in grid mode.
  void validate() const;
};

struct RestartDiagnostic {
  int index = 0;
  double best_value = 0.0;
  int evaluations = 0;
};

struct RateReport {
  InputDistribution best_dist;
  InfoQuantities quantities;
  double preset_direct = 0.0;
  double preset_df = 0.0;
  std::vector<RestartDiagnostic> diagnostics;
};

/// Best p(u, x, x1) found. quantities are those of best_dist, so the reported
/// rate is attained (a certified lower bound on the maximum). The presets'
/// maximizers are embedded as candidates whenever |U| permits, so
/// pdf_rate >= max(preset_direct, preset_df) under the same |U| budget.
RateReport optimize_rate(const RelayChannel& channel, const OptimizerConfig& cfg);

/// max over p(x, x1) of min{ I(X X1; B), I(X; B | X1) }  (|U| = 1).
double preset_direct(const RelayChannel& channel, const OptimizerConfig& cfg);
/// max over p(x, x1) of min{ I(X X1; B), I(X; B1 | X1) }  (U = X).
double preset_decode_forward(const RelayChannel& channel, const OptimizerConfig& cfg);

/// First composition of `resolution` into `cells` nonnegative parts:
/// (resolution, 0, ..., 0).
std::vector<int> first_composition(int cells, int resolution);
/// Advances to the next composition in reverse-lexicographic order; returns
/// false after the last one (0, ..., 0, resolution).
bool next_composition(std::vector<int>& parts);
/// Number of grid points: C(resolution + cells - 1, cells - 1).
std::uint64_t composition_count(int cells, int resolution);

/// p_i = exp(z_i) / sum_j exp(z_j), computed stably.
std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace qrelay
