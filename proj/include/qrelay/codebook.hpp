#pragma once

// Random superposition codebooks for one block of the block-Markov scheme.

#include <cstdint>
#include <vector>

#include "qrelay/relay_model.hpp"

namespace qrelay {

/// Message-set sizes |M| = ceil(2^{n r_m}), |L| = ceil(2^{n r_ell}).
struct RateSplit {
  double r_m = 0.0;
  double r_ell = 0.0;

  std::size_t m_count(int n) const;
  std::size_t l_count(int n) const;
  double total() const { return r_m + r_ell; }
};

/// Splits `fraction` of the partial decode-forward rate between the two
/// message parts in proportion to I(U;B1|X1) and I(X;B|X1U), so that
/// r_ell <= fraction * I(U;B1|X1), r_m <= fraction * I(X;B|X1U) and
/// r_m + r_ell = fraction * pdf_rate.
RateSplit split_rates(const InfoQuantities& q, double fraction);

using Word = std::vector<int>;

/// Codewords for block j. Indices: x1_word(lp), u_word(lp, l), x_word(lp, l, m)
/// with lp the previous block's relay message, l and m the current messages.
struct CodebookEnsemble {
  int n = 0;
  int block = 0;
  std::size_t m_count = 1;
  std::size_t l_count = 1;
  std::uint64_t seed = 0;
  std::vector<Word> x1_words;  // [lp]
  std::vector<Word> u_words;   // [lp * L + l]
  std::vector<Word> x_words;   // [(lp * L + l) * M + m]

  const Word& x1_word(std::size_t lp) const { return x1_words.at(lp); }
  const Word& u_word(std::size_t lp, std::size_t l) const { return u_words.at(lp * l_count + l); }
  const Word& x_word(std::size_t lp, std::size_t l, std::size_t m) const {
    return x_words.at((lp * l_count + l) * m_count + m);
  }
};

struct CodebookLimits {
  std::size_t max_messages = 4096;  // cap on |M| * |L|
};

/// x1^n(lp) iid p(x1); u^n(l|lp) iid p(u | x1_i); x^n(m|l,lp) iid p(x | x1_i, u_i).
/// Deterministic in (seed, block). Throws SizeCap when |M||L| exceeds the cap.
CodebookEnsemble sample_codebooks(const CodeState& cs, int n, const RateSplit& rates, std::uint64_t seed, int block,
                                  const CodebookLimits& limits = {});

/// Relabels source messages: result.x_word(lp, l, m) = cb.x_word(lp, l, perm[m]).
CodebookEnsemble permute_messages(const CodebookEnsemble& cb, const std::vector<std::size_t>& perm);

}  // namespace qrelay
