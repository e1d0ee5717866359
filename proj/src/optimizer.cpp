#include "qrelay/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include "qrelay/parallel.hpp"

namespace qrelay {

namespace {

constexpr double kTieTolerance = 1e-12;

using Objective = std::function<double(const std::vector<double>&)>;

struct SearchResult {
  std::vector<double> best_point;  // probabilities over the search cells
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<RestartDiagnostic> diagnostics;
};

// Nelder-Mead on unconstrained logits, maximizing `objective(softmax(z))`.
// Re-initializes the simplex around the incumbent when it collapses, until the
// evaluation budget is spent or a restart brings no improvement.
struct LocalResult {
  std::vector<double> logits;
  double value;
  int evaluations;
};

LocalResult nelder_mead(const Objective& objective, std::vector<double> start, int max_evals) {
  const std::size_t dim = start.size();
  int evals = 0;
  auto f = [&](const std::vector<double>& z) {
    ++evals;
    return -objective(softmax(z));
  };

  std::vector<double> incumbent = std::move(start);
  double incumbent_cost = f(incumbent);
  if (dim <= 1) return {incumbent, -incumbent_cost, evals};

  double step = 1.0;
  while (evals < max_evals) {
    std::vector<std::vector<double>> simplex(dim + 1, incumbent);
    std::vector<double> cost(dim + 1, incumbent_cost);
    for (std::size_t i = 0; i < dim; ++i) {
      simplex[i + 1][i] += step;
      cost[i + 1] = f(simplex[i + 1]);
    }
    const double round_start = incumbent_cost;

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim), trial(dim), trial2(dim);
    while (evals < max_evals) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];

      double size = 0.0;
      for (std::size_t v = 0; v <= dim; ++v)
        for (std::size_t i = 0; i < dim; ++i) size = std::max(size, std::abs(simplex[v][i] - simplex[best][i]));
      if (cost[worst] - cost[best] < 1e-14 && size < 1e-7) break;
      if (size < 1e-10) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t v = 0; v <= dim; ++v) {
        if (v == worst) continue;
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v][i] / static_cast<double>(dim);
      }
      for (std::size_t i = 0; i < dim; ++i) trial[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
      const double reflected = f(trial);
      if (reflected < cost[best]) {
        for (std::size_t i = 0; i < dim; ++i) trial2[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
        const double expanded = f(trial2);
        if (expanded < reflected) {
          simplex[worst] = trial2;
          cost[worst] = expanded;
        } else {
          simplex[worst] = trial;
          cost[worst] = reflected;
        }
        continue;
      }
      if (reflected < cost[second]) {
        simplex[worst] = trial;
        cost[worst] = reflected;
        continue;
      }
      const bool outside = reflected < cost[worst];
      for (std::size_t i = 0; i < dim; ++i) {
        trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                            : centroid[i] + 0.5 * (simplex[worst][i] - centroid[i]);
      }
      const double contracted = f(trial2);
      if (contracted < std::min(reflected, cost[worst])) {
        simplex[worst] = trial2;
        cost[worst] = contracted;
        continue;
      }
      for (std::size_t v = 0; v <= dim; ++v) {
        if (v == best) continue;
        for (std::size_t i = 0; i < dim; ++i) simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
        cost[v] = f(simplex[v]);
      }
    }
    const auto best_it = std::min_element(cost.begin(), cost.end());
    if (*best_it < incumbent_cost) {
      incumbent_cost = *best_it;
      incumbent = simplex[static_cast<std::size_t>(best_it - cost.begin())];
    }
    if (round_start - incumbent_cost < 1e-13) break;
    step = 0.25;
  }
  return {incumbent, -incumbent_cost, evals};
}

SearchResult multistart(const Objective& objective, std::size_t cells, const OptimizerConfig& cfg) {
  std::vector<LocalResult> results(static_cast<std::size_t>(cfg.restarts));
  detail::parallel_for(results.size(), cfg.threads, [&](std::size_t r) {
    std::vector<double> start(cells, 0.0);
    if (r > 0) {
      std::mt19937_64 gen(cfg.seed + r);
      std::normal_distribution<double> normal(0.0, 1.5);
      for (auto& z : start) z = normal(gen);
    }
    results[r] = nelder_mead(objective, std::move(start), cfg.max_iters);
  });

  SearchResult out;
  for (std::size_t r = 0; r < results.size(); ++r) {
    out.diagnostics.push_back({static_cast<int>(r), results[r].value, results[r].evaluations});
    if (results[r].value > out.best_value + kTieTolerance) {
      out.best_value = results[r].value;
      out.best_point = softmax(results[r].logits);
    }
  }
  return out;
}

SearchResult grid_search(const Objective& objective, std::size_t cells, const OptimizerConfig& cfg) {
  SearchResult out;
  std::vector<int> parts = first_composition(static_cast<int>(cells), cfg.grid_resolution);
  std::vector<double> point(cells);
  int evaluations = 0;
  do {
    for (std::size_t i = 0; i < cells; ++i) point[i] = parts[i] / static_cast<double>(cfg.grid_resolution);
    const double v = objective(point);
    ++evaluations;
    if (v > out.best_value + kTieTolerance) {
      out.best_value = v;
      out.best_point = point;
    }
  } while (next_composition(parts));
  out.diagnostics.push_back({0, out.best_value, evaluations});
  return out;
}

SearchResult run_search(const Objective& objective, std::size_t cells, const OptimizerConfig& cfg) {
  return cfg.mode == SearchMode::Grid ? grid_search(objective, cells, cfg) : multistart(objective, cells, cfg);
}

// p(x, x1) flat (x * |X1| + x1) embedded with |U| = 1.
InputDistribution direct_embedding(const std::vector<double>& pxx1, int u_size, int nx, int nx1) {
  std::vector<double> probs(static_cast<std::size_t>(u_size) * nx * nx1, 0.0);
  std::copy(pxx1.begin(), pxx1.end(), probs.begin());
  return {u_size, nx, nx1, std::move(probs)};
}

// p(x, x1) embedded with U = X (requires u_size >= |X|).
InputDistribution df_embedding(const std::vector<double>& pxx1, int u_size, int nx, int nx1) {
  std::vector<double> probs(static_cast<std::size_t>(u_size) * nx * nx1, 0.0);
  for (int x = 0; x < nx; ++x)
    for (int x1 = 0; x1 < nx1; ++x1)
      probs[(static_cast<std::size_t>(x) * nx + x) * nx1 + x1] = pxx1[static_cast<std::size_t>(x) * nx1 + x1];
  return {u_size, nx, nx1, std::move(probs)};
}

double clamp_normalize_eval(const RelayChannel& channel, InputDistribution dist) {
  return evaluate_rate(channel, dist).pdf_rate;
}

InputDistribution renormalized(int nu, int nx, int nx1, std::vector<double> p) {
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= total;
  return {nu, nx, nx1, std::move(p)};
}

struct PresetResult {
  double value;
  std::vector<double> pxx1;
};

PresetResult run_direct(const RelayChannel& channel, const OptimizerConfig& cfg) {
  const int nx = channel.x_size(), nx1 = channel.x1_size();
  const Objective obj = [&](const std::vector<double>& p) {
    return clamp_normalize_eval(channel, renormalized(1, nx, nx1, p));
  };
  SearchResult r = run_search(obj, static_cast<std::size_t>(nx) * nx1, cfg);
  return {r.best_value, r.best_point};
}

PresetResult run_decode_forward(const RelayChannel& channel, const OptimizerConfig& cfg) {
  const int nx = channel.x_size(), nx1 = channel.x1_size();
  const Objective obj = [&](const std::vector<double>& p) {
    const InputDistribution pxx1 = renormalized(1, nx, nx1, p);
    return clamp_normalize_eval(channel, df_embedding(pxx1.probs(), nx, nx, nx1));
  };
  SearchResult r = run_search(obj, static_cast<std::size_t>(nx) * nx1, cfg);
  return {r.best_value, r.best_point};
}

}  // namespace

void OptimizerConfig::validate() const {
  if (u_size < 0) throw Error(ErrorKind::InvalidConfig, "u_size must be positive (or 0 for |X|)");
  if (restarts <= 0) throw Error(ErrorKind::InvalidConfig, "restarts must be positive");
  if (max_iters <= 0) throw Error(ErrorKind::InvalidConfig, "max_iters must be positive");
  if (threads <= 0) throw Error(ErrorKind::InvalidConfig, "threads must be positive");
  if (mode == SearchMode::Grid && grid_resolution < 2) {
    throw Error(ErrorKind::InvalidConfig, "grid_resolution must be at least 2 in grid mode");
  }
}

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) return {};
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    total += p[i];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::vector<int> first_composition(int cells, int resolution) {
  std::vector<int> parts(static_cast<std::size_t>(cells), 0);
  if (cells > 0) parts[0] = resolution;
  return parts;
}

bool next_composition(std::vector<int>& parts) {
  if (parts.size() <= 1) return false;
  const std::size_t last = parts.size() - 1;
  const int tail = parts[last];
  for (std::size_t i = last; i-- > 0;) {
    if (parts[i] > 0) {
      parts[last] = 0;
      parts[i] -= 1;
      parts[i + 1] = tail + 1;
      return true;
    }
  }
  return false;
}

std::uint64_t composition_count(int cells, int resolution) {
  // C(resolution + cells - 1, cells - 1), exact in 64-bit for the sizes used here.
  std::uint64_t c = 1;
  const auto k = static_cast<std::uint64_t>(cells - 1);
  const auto n = static_cast<std::uint64_t>(resolution + cells - 1);
  for (std::uint64_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

double preset_direct(const RelayChannel& channel, const OptimizerConfig& cfg) {
  cfg.validate();
  return run_direct(channel, cfg).value;
}

double preset_decode_forward(const RelayChannel& channel, const OptimizerConfig& cfg) {
  cfg.validate();
  return run_decode_forward(channel, cfg).value;
}

RateReport optimize_rate(const RelayChannel& channel, const OptimizerConfig& cfg) {
  cfg.validate();
  const int nu = cfg.effective_u_size(channel);
  const int nx = channel.x_size(), nx1 = channel.x1_size();

  const PresetResult direct = run_direct(channel, cfg);
  const PresetResult df = run_decode_forward(channel, cfg);

  const Objective obj = [&](const std::vector<double>& p) {
    return clamp_normalize_eval(channel, renormalized(nu, nx, nx1, p));
  };
  SearchResult search = run_search(obj, static_cast<std::size_t>(nu) * nx * nx1, cfg);

  InputDistribution best = renormalized(nu, nx, nx1, search.best_point);
  double best_value = search.best_value;
  auto consider = [&](InputDistribution candidate) {
    const double v = evaluate_rate(channel, candidate).pdf_rate;
    if (v > best_value + kTieTolerance) {
      best_value = v;
      best = std::move(candidate);
    }
  };
  consider(direct_embedding(renormalized(1, nx, nx1, direct.pxx1).probs(), nu, nx, nx1));
  if (nu >= nx) consider(df_embedding(renormalized(1, nx, nx1, df.pxx1).probs(), nu, nx, nx1));

  RateReport report{best, evaluate_rate(channel, best), direct.value, df.value, std::move(search.diagnostics)};
  return report;
}

}  // namespace qrelay
