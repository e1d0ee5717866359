#pragma once

// Square-root measurements of the Relay and of the Destination's
// sliding-window AND-measurement, their exact error probabilities, and the
// factorized Hayashi-Nagaoka error terms.

#include <cstddef>
#include <vector>

#include "qrelay/codebook.hpp"
#include "qrelay/typicality.hpp"

namespace qrelay {

struct PovmOutcome {
  std::size_t m = 0;
  std::size_t l = 0;
  bool completion = false;
};

struct Povm {
  std::vector<PovmOutcome> labels;
  std::vector<HermitianOperator> elements;

  std::size_t size() const { return elements.size(); }
  /// max |sum_k E_k - I| entrywise.
  double closure_defect() const;
  /// Smallest eigenvalue over all elements.
  double min_element_eigenvalue() const;
};

/// Lambda_k = S^{-1/2} P_k S^{-1/2} with S = sum_k P_k, followed by the
/// completion element I - sum_k Lambda_k (the projector onto ker S).
Povm square_root_measurement(const std::vector<Matrix>& detectors, std::vector<PovmOutcome> labels);

/// Per-position reduced outputs of one block for input words (x^n, x1^n).
struct BlockOutputs {
  std::vector<DensityOperator> b1;
  std::vector<DensityOperator> b;
};
BlockOutputs block_outputs(const RelayChannel& channel, const Word& x, const Word& x1);

/// Largest operator dimension the dense constructions will form.
struct DimensionCap {
  std::size_t max_dim = 4096;
};

std::size_t checked_power(int base, int exponent, std::size_t cap, const char* what);

// ---------------------------------------------------------------- Relay ---

/// P_l = Pi_sigmabar Pi_sigma(l) Pi_sigmabar on B1^n, one per l, given the
/// previous relay message `ell_prev`.
std::vector<Matrix> relay_detectors(const CodebookEnsemble& cb, const CodeState& cs, std::size_t ell_prev,
                                    const TypicalityParams& p, DimensionCap cap = {});

struct RelayMeasurement {
  std::vector<Matrix> detectors;
  HermitianOperator normalizer = HermitianOperator::zero(0);  // S^{-1/2}

  /// Probability of each outcome l plus the completion outcome (last entry).
  std::vector<double> outcome_probabilities(const Matrix& rho) const;
  Povm povm() const;
};

RelayMeasurement relay_measurement(const CodebookEnsemble& cb, const CodeState& cs, std::size_t ell_prev,
                                   const TypicalityParams& p, DimensionCap cap = {});
Povm build_relay_srm(const CodebookEnsemble& cb, const CodeState& cs, std::size_t ell_prev,
                     const TypicalityParams& p, DimensionCap cap = {});

/// (1/|L||M|) sum_{l,m} (1 - Tr[Gamma_l rho^{B1^n}_{x^n(m|l,lp), x1^n(lp)}]).
double relay_error_exact(const CodebookEnsemble& cb, const CodeState& cs, const Povm& povm, std::size_t ell_prev);

// ---------------------------------------------------------- Destination ---

/// Per-block sandwich operators of the sliding window for messages of block j:
///   current[l * M + m] = Pi_rhodbar Pi_rhobar(l) Pi_rho(m,l) Pi_rhobar(l) Pi_rhodbar   on B^n of block j
///   next[l]           = Pi_taubar Pi_tau(l) Pi_taubar                                on B^n of block j+1
struct DestinationDetectors {
  std::size_t m_count = 1;
  std::size_t l_count = 1;
  std::vector<Matrix> current;
  std::vector<Matrix> next;
  Matrix range_j;     // orthonormal basis of range(Pi_rhodbar)
  Matrix range_next;  // orthonormal basis of range(Pi_taubar)

  const Matrix& current_at(std::size_t m, std::size_t l) const { return current.at(l * m_count + m); }
};

DestinationDetectors destination_detectors(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next,
                                           const CodeState& cs, std::size_t ell_prev, const TypicalityParams& p,
                                           DimensionCap cap = {});

/// Square-root normalization of {current(m,l) (x) next(l)} over B^n (x) B^n.
/// Every detector is supported on range(Pi_rhodbar) (x) range(Pi_taubar), so
/// the normalization is carried out on that subspace (isometries v_j, v_next)
/// and agrees exactly with the one on the full space.
struct AndMeasurement {
  DestinationDetectors detectors;
  Matrix v_j;     // D x r1
  Matrix v_next;  // D x r2
  std::vector<Matrix> current_c;  // v_j^* current v_j
  std::vector<Matrix> next_c;     // v_next^* next v_next
  HermitianOperator normalizer = HermitianOperator::zero(0);  // S^{-1/2} on the r1 r2 subspace

  /// Outcome probabilities on rho_j (x) rho_next, indexed l * M + m, with the
  /// completion outcome last. Never forms the D^2 x D^2 elements.
  std::vector<double> outcome_probabilities(const Matrix& rho_j, const Matrix& rho_next) const;
  /// Explicit elements on the full D^2-dimensional space.
  Povm povm() const;
};

/// Throws SizeCap when dim_B^{2n} exceeds the cap.
AndMeasurement and_measurement(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next, const CodeState& cs,
                               std::size_t ell_prev, const TypicalityParams& p, DimensionCap cap = {});
Povm build_destination_and_measurement(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next,
                                       const CodeState& cs, std::size_t ell_prev, const TypicalityParams& p,
                                       DimensionCap cap = {});

/// 1 - Tr[Lambda_{m,l} (rho_j (x) rho_next)] for an explicit POVM.
double destination_error_for(const Povm& povm, std::size_t m, std::size_t l, const Matrix& rho_j,
                             const Matrix& rho_next);

/// Average over (m_j, l_j) of the destination error with the previous relay
/// message `ell_prev` and block j+1 carrying (m_next, l_next) under a correct
/// relay forward.
double destination_error_exact(const CodebookEnsemble& cb_j, const CodebookEnsemble& cb_next, const CodeState& cs,
                               const Povm& povm, std::size_t ell_prev, std::size_t m_next = 0,
                               std::size_t l_next = 0);

/// Terms of 2 Tr[(I - P)rho] + 4 sum_{(m',l') != (m,l)} Tr[P' rho] for one
/// transmitted pair, all computed per block.
struct HnComponents {
  double alpha = 0.0;   // 1 - Tr[P^{(j)}_{m,l} rho_j]
  double beta = 0.0;    // 1 - Tr[P^{(j+1)}_{l} rho_next]
  double term_a = 0.0;  // matching l, wrong m
  double term_b = 0.0;  // wrong l, any m: sum (B1)(B2)
  double total() const { return 2.0 * (alpha + beta) + 4.0 * (term_a + term_b); }
};

HnComponents hn_bound_components(const DestinationDetectors& det, std::size_t m, std::size_t l,
                                 const Matrix& rho_j, const Matrix& rho_next);

/// Term (B) evaluated densely on B^n (x) B^n, for cross-checking the
/// factorized (B1)(B2) path.
double term_b_dense(const DestinationDetectors& det, std::size_t l, const Matrix& rho_j, const Matrix& rho_next);

}  // namespace qrelay
