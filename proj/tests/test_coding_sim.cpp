#include <algorithm>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qrelay/example_channels.hpp"
#include "qrelay/lemma_checks.hpp"
#include "qrelay/optimizer.hpp"
#include "qrelay/simulation.hpp"

using namespace qrelay;

namespace {

// p(u = x, x, x1) uniform on a binary channel.
InputDistribution df_uniform() {
  std::vector<double> p(8, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int x1 = 0; x1 < 2; ++x1) p[(x * 2 + x) * 2 + x1] = 0.25;
  return {2, 2, 2, p};
}

CodebookEnsemble hand_built(int n, std::size_t m_count, std::size_t l_count, std::vector<Word> x1,
                            std::vector<Word> u, std::vector<Word> x) {
  CodebookEnsemble cb;
  cb.n = n;
  cb.m_count = m_count;
  cb.l_count = l_count;
  cb.x1_words = std::move(x1);
  cb.u_words = std::move(u);
  cb.x_words = std::move(x);
  return cb;
}

Matrix product_b(const RelayChannel& ch, const Word& x, const Word& x1) {
  return product_state(block_outputs(ch, x, x1).b);
}

Matrix product_b1(const RelayChannel& ch, const Word& x, const Word& x1) {
  return product_state(block_outputs(ch, x, x1).b1);
}

InputDistribution optimized(const RelayChannel& ch) { return optimize_rate(ch, OptimizerConfig{}).best_dist; }

double chi_square(const std::vector<double>& counts, const std::vector<double>& probs) {
  double total = 0.0, stat = 0.0;
  for (double c : counts) total += c;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (probs[i] <= 0.0) {
      EXPECT_EQ(counts[i], 0.0);
      continue;
    }
    const double e = total * probs[i];
    stat += (counts[i] - e) * (counts[i] - e) / e;
  }
  return stat;
}

}  // namespace

// ------------------------------------------------------------- codebooks ---

TEST(Codebook, ZeroRatesGiveSingleCodewords) {
  const CodeState cs = build_code_state(examples::qubit_test_channel(), InputDistribution::uniform(2, 4, 2));
  const CodebookEnsemble cb = sample_codebooks(cs, 5, {0.0, 0.0}, 3, 1);
  EXPECT_EQ(cb.m_count, 1u);
  EXPECT_EQ(cb.l_count, 1u);
  EXPECT_EQ(cb.x_words.size(), 1u);
}

TEST(Codebook, MessageCountsUseCeiling) {
  EXPECT_EQ((RateSplit{0.5, 0.0}.m_count(4)), 4u);
  EXPECT_EQ((RateSplit{0.0, 0.3}.l_count(4)), 3u);
  EXPECT_EQ((RateSplit{0.0, 0.0}.l_count(6)), 1u);
}

TEST(Codebook, PointMassForcesEveryCodeword) {
  std::vector<double> p(8, 0.0);
  p[(1 * 2 + 0) * 2 + 1] = 1.0;  // u = 1, x = 0, x1 = 1
  const CodeState cs = build_code_state(examples::noiseless_binary(), InputDistribution(2, 2, 2, p));
  const CodebookEnsemble cb = sample_codebooks(cs, 6, {0.5, 0.5}, 9, 2);
  for (const auto& w : cb.x1_words) EXPECT_EQ(w, Word(6, 1));
  for (const auto& w : cb.u_words) EXPECT_EQ(w, Word(6, 1));
  for (const auto& w : cb.x_words) EXPECT_EQ(w, Word(6, 0));
}

TEST(Codebook, UniformLawChiSquare) {
  const CodeState cs = build_code_state(examples::noiseless_binary(), InputDistribution::uniform(2, 2, 2));
  const CodebookEnsemble cb = sample_codebooks(cs, 1000, {0.0, 0.001}, 5, 1);
  ASSERT_EQ(cb.l_count, 2u);
  std::vector<double> x1(2, 0.0), u(2, 0.0), x(2, 0.0);
  for (const auto& w : cb.x1_words)
    for (int s : w) x1[s] += 1;
  for (const auto& w : cb.u_words)
    for (int s : w) u[s] += 1;
  for (const auto& w : cb.x_words)
    for (int s : w) x[s] += 1;
  // 1 degree of freedom, 3 sigma.
  EXPECT_LT(chi_square(x1, {0.5, 0.5}), 9.0);
  EXPECT_LT(chi_square(u, {0.5, 0.5}), 9.0);
  EXPECT_LT(chi_square(x, {0.5, 0.5}), 9.0);
}

TEST(Codebook, JointLawChiSquare) {
  std::mt19937_64 gen(111);
  std::vector<double> p(2 * 4 * 2);
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  double total = 0.0;
  for (auto& v : p) total += (v = unif(gen));
  for (auto& v : p) v /= total;
  const InputDistribution dist(2, 4, 2, p);
  const CodeState cs = build_code_state(examples::qubit_test_channel(), dist);
  const CodebookEnsemble cb = sample_codebooks(cs, 1000, {0.0, 0.001}, 7, 1);
  // One (u, x) chain per x1 word, so every triple below is an independent draw of p(u, x, x1).
  std::vector<double> counts(p.size(), 0.0);
  for (std::size_t lp = 0; lp < cb.l_count; ++lp) {
    const Word &w1 = cb.x1_word(lp), &wu = cb.u_word(lp, 0), &wx = cb.x_word(lp, 0, 0);
    for (int i = 0; i < 1000; ++i) counts[dist.index(wu[i], wx[i], w1[i])] += 1;
  }
  // 15 degrees of freedom, upper tail 0.0027.
  EXPECT_LT(chi_square(counts, p), 35.6);
}

TEST(Codebook, DeterministicInSeedAndBlock) {
  const CodeState cs = build_code_state(examples::qubit_test_channel(), InputDistribution::uniform(4, 4, 2));
  const RateSplit r{0.4, 0.3};
  const auto a = sample_codebooks(cs, 4, r, 17, 1), b = sample_codebooks(cs, 4, r, 17, 1);
  const auto c = sample_codebooks(cs, 4, r, 17, 2);
  EXPECT_EQ(a.x_words, b.x_words);
  EXPECT_EQ(a.u_words, b.u_words);
  EXPECT_NE(a.x_words, c.x_words);
}

TEST(Codebook, MessageCap) {
  const CodeState cs = build_code_state(examples::noiseless_binary(), InputDistribution::uniform(2, 2, 2));
  try {
    sample_codebooks(cs, 8, {1.0, 1.0}, 1, 1, CodebookLimits{1000});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeCap);
  }
}

// ---------------------------------------------------------- measurements ---

TEST(SquareRoot, RandomDetectorsFormPovm) {
  std::mt19937_64 gen(121);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 3 + trial % 4;
    std::vector<Matrix> det;
    std::vector<PovmOutcome> labels;
    for (int k = 0; k < 1 + trial % 3; ++k) {
      det.push_back(random_ops::effect(gen, d).matrix());
      labels.push_back({0, static_cast<std::size_t>(k), false});
    }
    const Povm povm = square_root_measurement(det, labels);
    EXPECT_EQ(povm.size(), det.size() + 1);
    EXPECT_TRUE(povm.labels.back().completion);
    EXPECT_LE(povm.closure_defect(), 1e-8);
    EXPECT_GE(povm.min_element_eigenvalue(), -1e-9);
  }
}

TEST(SquareRoot, OrthogonalProjectorsAreKept) {
  std::mt19937_64 gen(131);
  const Eigen::HouseholderQR<Matrix> qr(random_ops::ginibre(gen, 6, 6));
  const Matrix q = qr.householderQ();
  const Matrix p0 = q.leftCols(2) * q.leftCols(2).adjoint();
  const Matrix p1 = q.middleCols(2, 3) * q.middleCols(2, 3).adjoint();
  const Povm povm = square_root_measurement({p0, p1}, {{0, 0, false}, {0, 1, false}});
  EXPECT_LT((povm.elements[0].matrix() - p0).norm(), 1e-10);
  EXPECT_LT((povm.elements[1].matrix() - p1).norm(), 1e-10);
  EXPECT_NEAR(povm.elements[2].matrix().trace().real(), 1.0, 1e-10);
}

TEST(Relay, OrthogonalCodewordsDecodePerfectly) {
  const RelayChannel ch = examples::noiseless_binary();
  const CodeState cs = build_code_state(ch, df_uniform());
  // lp = 0 uses u words 0011 and 0101; x = u.
  const CodebookEnsemble cb = hand_built(4, 1, 2, {{0, 1, 0, 1}, {1, 1, 0, 0}},
                                         {{0, 0, 1, 1}, {0, 1, 0, 1}, {1, 0, 0, 0}, {0, 0, 0, 1}},
                                         {{0, 0, 1, 1}, {0, 1, 0, 1}, {1, 0, 0, 0}, {0, 0, 0, 1}});
  const Povm povm = build_relay_srm(cb, cs, 0, {4, 0.5});
  EXPECT_LE(povm.closure_defect(), 1e-8);
  EXPECT_NEAR(relay_error_exact(cb, cs, povm, 0), 0.0, 1e-9);
}

TEST(Relay, IdenticalCodewordsGiveUniformGuess) {
  const RelayChannel ch = examples::noiseless_binary();
  const CodeState cs = build_code_state(ch, df_uniform());
  const Word w = {0, 1, 1, 0};
  const CodebookEnsemble cb = hand_built(4, 1, 3, std::vector<Word>(3, {0, 0, 1, 1}), std::vector<Word>(9, w),
                                         std::vector<Word>(9, w));
  const RelayMeasurement meas = relay_measurement(cb, cs, 0, {4, 0.5});
  const Matrix rho = product_b1(ch, w, cb.x1_word(0));
  const double tr_p = (meas.detectors[0] * rho).trace().real();
  const auto probs = meas.outcome_probabilities(rho);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(probs[l], tr_p / 3.0, 1e-10);
  EXPECT_NEAR(relay_error_exact(cb, cs, meas.povm(), 0), 1.0 - tr_p / 3.0, 1e-10);
}

TEST(Relay, SingleMessageWithWideTypicalityNeverErrs) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, InputDistribution::uniform(4, 4, 2));
  const CodebookEnsemble cb = sample_codebooks(cs, 4, {0.0, 0.0}, 1, 1);
  EXPECT_LE(relay_error_exact(cb, cs, build_relay_srm(cb, cs, 0, {4, 10.0}), 0), 1e-6);
}

TEST(Relay, ProbabilitiesMatchExplicitPovm) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  const CodebookEnsemble cb = sample_codebooks(cs, 4, {0.2, 0.4}, 3, 1);
  const RelayMeasurement meas = relay_measurement(cb, cs, 1, {4, 1.0});
  const Povm povm = meas.povm();
  const Matrix rho = product_b1(ch, cb.x_word(1, 0, 1), cb.x1_word(1));
  const auto probs = meas.outcome_probabilities(rho);
  for (std::size_t k = 0; k < povm.size(); ++k)
    EXPECT_NEAR(probs[k], (povm.elements[k].matrix() * rho).trace().real(), 1e-10);
}

TEST(Destination, CompressedNormalizationEqualsFullSpace) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  for (std::uint64_t seed : {1, 2, 3}) {
    const RateSplit r{0.3, 0.3};
    const auto cb1 = sample_codebooks(cs, 2, r, seed, 1), cb2 = sample_codebooks(cs, 2, r, seed, 2);
    const AndMeasurement a = and_measurement(cb1, cb2, cs, 1, {2, 0.6});
    const DestinationDetectors& det = a.detectors;

    // Square-root measurement over the full B^n B^n space.
    std::vector<Matrix> full;
    std::vector<PovmOutcome> labels;
    for (std::size_t l = 0; l < det.l_count; ++l)
      for (std::size_t m = 0; m < det.m_count; ++m) {
        full.push_back(oracle::kron(det.current_at(m, l), det.next[l]));
        labels.push_back({m, l, false});
      }
    const Povm reference = square_root_measurement(full, labels);
    const Povm povm = a.povm();
    ASSERT_EQ(povm.size(), reference.size());
    for (std::size_t k = 0; k < povm.size(); ++k)
      EXPECT_LT((povm.elements[k].matrix() - reference.elements[k].matrix()).norm(), 1e-8) << "element " << k;
    EXPECT_LE(povm.closure_defect(), 1e-8);
    EXPECT_GE(povm.min_element_eigenvalue(), -1e-9);

    const Matrix rho_j = product_b(ch, cb1.x_word(1, 0, 1), cb1.x1_word(1));
    const Matrix rho_next = product_b(ch, cb2.x_word(0, 1, 0), cb2.x1_word(0));
    const Matrix rho = oracle::kron(rho_j, rho_next);
    const auto probs = a.outcome_probabilities(rho_j, rho_next);
    for (std::size_t k = 0; k < povm.size(); ++k)
      EXPECT_NEAR(probs[k], (reference.elements[k].matrix() * rho).trace().real(), 1e-9);
    EXPECT_NEAR(destination_error_for(povm, 1, 0, rho_j, rho_next), 1.0 - probs[0 * det.m_count + 1], 1e-9);
  }
}

TEST(Destination, OrthogonalRelayWordsResolveL) {
  // B sees only x1; the block-j factor is the same for every message.
  const std::vector<std::vector<double>> w1 = {{0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}};
  const std::vector<std::vector<double>> w = {{1, 0}, {0, 1}, {1, 0}, {0, 1}};
  const RelayChannel ch = examples::classical_embedding(2, 2, w1, w);
  const CodeState cs = build_code_state(ch, df_uniform());
  const Word a = {0, 0, 1, 1}, b = {1, 0, 1, 0}, c = {0, 1, 1, 0};
  const CodebookEnsemble cb1 = hand_built(4, 1, 2, {a, b}, {a, b, c, a}, {a, b, c, a});
  const CodebookEnsemble cb2 = hand_built(4, 1, 2, {b, c}, {a, b, c, a}, {a, b, c, a});
  const Povm povm = build_destination_and_measurement(cb1, cb2, cs, 0, {4, 0.5});
  EXPECT_LE(povm.closure_defect(), 1e-8);
  EXPECT_NEAR(destination_error_exact(cb1, cb2, cs, povm, 0), 0.0, 1e-9);
}

TEST(Destination, SingleMessageWithWideTypicality) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  const auto cb1 = sample_codebooks(cs, 4, {0.0, 0.0}, 1, 1), cb2 = sample_codebooks(cs, 4, {0.0, 0.0}, 1, 2);
  const Povm povm = build_destination_and_measurement(cb1, cb2, cs, 0, {4, 10.0});
  EXPECT_EQ(povm.size(), 2u);
  EXPECT_LE(destination_error_exact(cb1, cb2, cs, povm, 0), 0.1);
}

TEST(Destination, SizeCapNamesDimension) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, InputDistribution::uniform(4, 4, 2));
  const auto cb1 = sample_codebooks(cs, 7, {0.0, 0.0}, 1, 1), cb2 = sample_codebooks(cs, 7, {0.0, 0.0}, 1, 2);
  try {
    and_measurement(cb1, cb2, cs, 0, {7, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeCap);
    EXPECT_DOUBLE_EQ(e.value(), 16384.0);
    EXPECT_NE(std::string(e.what()).find("16384"), std::string::npos);
  }
}

// ------------------------------------------------------------ HN terms ---

TEST(HnTerms, EmptySumsForSingleMessage) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  const auto cb1 = sample_codebooks(cs, 3, {0.0, 0.0}, 4, 1), cb2 = sample_codebooks(cs, 3, {0.0, 0.0}, 4, 2);
  const DestinationDetectors det = destination_detectors(cb1, cb2, cs, 0, {3, 0.5});
  const HnComponents c = hn_bound_components(det, 0, 0, product_b(ch, cb1.x_word(0, 0, 0), cb1.x1_word(0)),
                                             product_b(ch, cb2.x_word(0, 0, 0), cb2.x1_word(0)));
  EXPECT_EQ(c.term_a, 0.0);
  EXPECT_EQ(c.term_b, 0.0);
}

TEST(HnTerms, BetaMatchesDirectSandwich) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  const TypicalityParams p{4, 0.8};
  const RateSplit r{0.3, 0.3};
  const auto cb1 = sample_codebooks(cs, 4, r, 6, 1), cb2 = sample_codebooks(cs, 4, r, 6, 2);
  const DestinationDetectors det = destination_detectors(cb1, cb2, cs, 0, p);
  const Matrix rho_j = product_b(ch, cb1.x_word(0, 1, 0), cb1.x1_word(0));
  const Matrix rho_next = product_b(ch, cb2.x_word(1, 0, 0), cb2.x1_word(1));
  const HnComponents c = hn_bound_components(det, 0, 1, rho_j, rho_next);

  const Matrix pi_bar = average_typical_projector(cs.tau_bar(), p).dense();
  std::vector<DensityOperator> tau;
  for (int s : cb2.x1_word(1)) tau.push_back(cs.tau(s));
  const Matrix pi = conditional_typical_projector(tau, p).dense();
  EXPECT_NEAR(c.beta, 1.0 - (pi_bar * pi * pi_bar * rho_next).trace().real(), 1e-12);
}

TEST(HnTerms, FactorizedTermBMatchesDense) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const RateSplit r{0.4, 0.4};
    const auto cb1 = sample_codebooks(cs, 3, r, seed, 1), cb2 = sample_codebooks(cs, 3, r, seed, 2);
    const DestinationDetectors det = destination_detectors(cb1, cb2, cs, 0, {3, 0.7});
    const Matrix rho_j = product_b(ch, cb1.x_word(0, 1, 1), cb1.x1_word(0));
    const Matrix rho_next = product_b(ch, cb2.x_word(1, 0, 0), cb2.x1_word(1));
    const HnComponents c = hn_bound_components(det, 1, 1, rho_j, rho_next);
    EXPECT_NEAR(c.term_b, term_b_dense(det, 1, rho_j, rho_next), 1e-8);
  }
}

TEST(HnTerms, BoundDominatesExactError) {
  const std::vector<RelayChannel> channels = {examples::qubit_test_channel(), examples::binary_pure_state(0.5)};
  int instances = 0;
  double worst = 1.0;
  for (const auto& ch : channels) {
    const CodeState cs = build_code_state(ch, optimized(ch));
    for (int n : {2, 3}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const RateSplit r{0.35, 0.35};
        const auto cb1 = sample_codebooks(cs, n, r, seed, 1), cb2 = sample_codebooks(cs, n, r, seed, 2);
        const AndMeasurement a = and_measurement(cb1, cb2, cs, 0, {n, 0.6});
        for (std::size_t l = 0; l < cb1.l_count; ++l)
          for (std::size_t m = 0; m < cb1.m_count; ++m) {
            const Matrix rho_j = product_b(ch, cb1.x_word(0, l, m), cb1.x1_word(0));
            const Matrix rho_next = product_b(ch, cb2.x_word(l, 0, 0), cb2.x1_word(l));
            const double exact = 1.0 - a.outcome_probabilities(rho_j, rho_next)[l * cb1.m_count + m];
            const double bound = hn_bound_components(a.detectors, m, l, rho_j, rho_next).total();
            worst = std::min(worst, bound - exact);
            ++instances;
          }
      }
    }
  }
  EXPECT_GE(instances, 20);
  EXPECT_GE(worst, -1e-9);
}

TEST(HnTerms, PermutingMessagesPermutesErrors) {
  const RelayChannel ch = examples::qubit_test_channel();
  const CodeState cs = build_code_state(ch, optimized(ch));
  const RateSplit r{0.5, 0.3};
  const auto cb1 = sample_codebooks(cs, 2, r, 12, 1), cb2 = sample_codebooks(cs, 2, r, 12, 2);
  std::vector<std::size_t> perm(cb1.m_count);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i + 1) % perm.size();
  const CodebookEnsemble permuted = permute_messages(cb1, perm);
  const TypicalityParams p{2, 0.6};

  const auto per_message = [&](const CodebookEnsemble& cb) {
    const Povm povm = build_destination_and_measurement(cb, cb2, cs, 0, p);
    std::vector<double> errs;
    for (std::size_t l = 0; l < cb.l_count; ++l) {
      const Matrix rho_next = product_b(ch, cb2.x_word(l, 0, 0), cb2.x1_word(l));
      for (std::size_t m = 0; m < cb.m_count; ++m)
        errs.push_back(destination_error_for(povm, m, l, product_b(ch, cb.x_word(0, l, m), cb.x1_word(0)), rho_next));
    }
    std::sort(errs.begin(), errs.end());
    return errs;
  };
  const auto a = per_message(cb1), b = per_message(permuted);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

// ----------------------------------------------------------- simulation ---

TEST(Simulation, ConfigValidation) {
  const RelayChannel ch = examples::qubit_test_channel();
  SimulationConfig cfg;
  cfg.blocks = 1;
  EXPECT_THROW(cfg.validate(ch), Error);
  cfg = SimulationConfig{};
  cfg.mode = SimMode::HnBound;
  cfg.window = WindowMode::Chained;
  EXPECT_THROW(cfg.validate(ch), Error);
  cfg = SimulationConfig{};
  cfg.n = 7;
  try {
    cfg.validate(ch);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeCap);
  }
  cfg.mode = SimMode::HnBound;
  EXPECT_NO_THROW(cfg.validate(ch));
}

TEST(Simulation, EstimateStatistics) {
  const Estimate e = estimate({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_NEAR(e.sd, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_NEAR(e.half_width, 1.96 * std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Simulation, ZeroRatesLeaveOnlyMissTerms) {
  const RelayChannel ch = examples::qubit_test_channel();
  SimulationConfig cfg;
  cfg.n = 3;
  cfg.trials = 20;
  cfg.delta = 0.5;
  const SimulationReport rep = run_simulation(ch, optimized(ch), cfg);
  EXPECT_EQ(rep.m_count, 1u);
  EXPECT_EQ(rep.l_count, 1u);
  EXPECT_EQ(rep.hn_overall.term_a.mean, 0.0);
  EXPECT_EQ(rep.hn_overall.term_b.mean, 0.0);
  EXPECT_LE(rep.destination_overall.mean, 2.0 * (rep.hn_overall.alpha.mean + rep.hn_overall.beta.mean) + 1e-9);
  EXPECT_EQ(rep.relay_error.size(), 1u);
}

TEST(Simulation, NoiselessClassicalEmbeddingDecodes) {
  SimulationConfig cfg;
  cfg.n = 4;
  cfg.rates = {0.0, 0.25};
  cfg.trials = 200;
  const SimulationReport rep = run_simulation(examples::noiseless_binary(), df_uniform(), cfg);
  EXPECT_EQ(rep.l_count, 2u);
  EXPECT_LE(rep.relay_overall.mean, 0.05);
  EXPECT_LE(rep.destination_overall.mean, 0.05);
}

TEST(Simulation, RatesAboveBoundDoNotDecode) {
  const RelayChannel ch = examples::qubit_test_channel();
  const RateReport rr = optimize_rate(ch, OptimizerConfig{});
  SimulationConfig cfg;
  cfg.n = 4;
  cfg.delta = examples::kQubitTestDelta;
  cfg.rates = split_rates(rr.quantities, 1.2);
  cfg.trials = 40;
  EXPECT_GE(run_simulation(ch, rr.best_dist, cfg).destination_overall.mean, 0.2);
}

TEST(Simulation, ProbabilitiesInRangeAndDeterministic) {
  const RelayChannel ch = examples::qubit_test_channel();
  const RateReport rr = optimize_rate(ch, OptimizerConfig{});
  SimulationConfig cfg;
  cfg.n = 2;
  cfg.blocks = 4;
  cfg.delta = examples::kQubitTestDelta;
  cfg.rates = split_rates(rr.quantities, 0.5);
  cfg.trials = 30;
  cfg.window = WindowMode::Chained;
  const SimulationReport a = run_simulation(ch, rr.best_dist, cfg);
  cfg.threads = 3;
  const SimulationReport b = run_simulation(ch, rr.best_dist, cfg);
  ASSERT_EQ(a.relay_error.size(), 3u);
  EXPECT_NEAR(a.effective_rate, 0.75 * cfg.rates.total(), 1e-15);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(a.relay_error[j].mean, b.relay_error[j].mean);
    EXPECT_EQ(a.destination_error[j].mean, b.destination_error[j].mean);
    EXPECT_GE(a.relay_error[j].mean, 0.0);
    EXPECT_LE(a.relay_error[j].mean, 1.0 + 1e-9);
    EXPECT_GE(a.destination_error[j].mean, 0.0);
    EXPECT_LE(a.destination_error[j].mean, 1.0 + 1e-9);
  }
  EXPECT_EQ(a.propagated_window_rate, b.propagated_window_rate);
}

TEST(Simulation, HnModeReportsClippedBound) {
  const RelayChannel ch = examples::qubit_test_channel();
  const RateReport rr = optimize_rate(ch, OptimizerConfig{});
  SimulationConfig cfg;
  cfg.n = 2;
  cfg.delta = examples::kQubitTestDelta;
  cfg.rates = split_rates(rr.quantities, 0.5);
  cfg.trials = 20;
  const SimulationReport exact = run_simulation(ch, rr.best_dist, cfg);
  cfg.mode = SimMode::HnBound;
  const SimulationReport hn = run_simulation(ch, rr.best_dist, cfg);
  EXPECT_TRUE(hn.destination_is_bound);
  EXPECT_EQ(exact.relay_overall.mean, hn.relay_overall.mean);
  EXPECT_EQ(exact.hn_overall.total.mean, hn.hn_overall.total.mean);
  EXPECT_GE(hn.destination_overall.mean + 1e-9, exact.destination_overall.mean);
}
