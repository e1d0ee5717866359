#pragma once

// Numerical verification of the operator lemmas behind the error analysis,
// plus randomized suites over them and over the typical-projector bounds.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qrelay/typicality.hpp"

namespace qrelay {

/// Tr[Lambda sigma] + Tr|rho - sigma| - Tr[Lambda rho]; nonnegative when the
/// trace-substitution bound holds. Requires 0 <= Lambda <= I.
double check_trace_substitution(const HermitianOperator& lambda, const DensityOperator& rho,
                                const DensityOperator& sigma);

/// Coefficients of the right-hand side c_miss (I - S) + c_confusion T.
struct HnCoefficients {
  double miss = 2.0;
  double confusion = 4.0;
};

/// lambda_min(c_miss (I - S) + c_confusion T - (I - (S+T)^{-1/2} S (S+T)^{-1/2})).
/// Requires 0 <= S <= I and T >= 0 (PreconditionViolated otherwise).
double check_hayashi_nagaoka(const HermitianOperator& s, const HermitianOperator& t, HnCoefficients c = {});

/// lambda_min((I - P) (x) I + I (x) (I - Q) - (I - P (x) Q)). Requires both in [0, I].
double check_union_bound(const HermitianOperator& p, const HermitianOperator& q);

struct GentleOperatorReport {
  double epsilon = 0.0;           // 1 - Tr[Lambda rho_bar]
  double average_distance = 0.0;  // sum_x p_x || sqrt(L) rho_x sqrt(L) - rho_x ||_1
  double bound = 0.0;             // 2 sqrt(epsilon)
  double margin() const { return bound - average_distance; }
  bool pass() const { return average_distance <= bound + 1e-9; }
};

GentleOperatorReport check_gentle_operator(const std::vector<double>& probs, const std::vector<DensityOperator>& states,
                                           const HermitianOperator& lambda);

/// Random instances for the suites.
namespace random_ops {
Matrix ginibre(std::mt19937_64& gen, int rows, int cols);
DensityOperator density(std::mt19937_64& gen, int dim, int rank);
/// 0 <= E <= I with a random spectrum in [0, 1].
HermitianOperator effect(std::mt19937_64& gen, int dim);
/// Orthogonal projector onto a random rank-r subspace.
HermitianOperator projector(std::mt19937_64& gen, int dim, int rank);
}  // namespace random_ops

struct LemmaSuiteConfig {
  int dim_min = 2;
  int dim_max = 16;
  int instances = 100;
  std::uint64_t seed = 1;
  HnCoefficients hn;
  /// Largest product dimension d^n used by the projector-bound suites.
  int max_projector_dim = 128;

  void validate() const;
};

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  double worst_margin = 0.0;
  bool pass() const { return failures == 0; }
};

/// Seven suites, in order: trace_substitution, hayashi_nagaoka, union_bound,
/// gentle_operator, typical_rank, typical_sandwich, typical_lower; each with
/// `instances` checks. Deterministic in the seed.
std::vector<SuiteResult> run_lemma_suite(const LemmaSuiteConfig& cfg);

}  // namespace qrelay
