#include "qrelay/codebook.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace qrelay {

namespace {

std::size_t message_count(int n, double rate) {
  if (rate < 0.0) throw Error(ErrorKind::InvalidConfig, "rates must be nonnegative", rate);
  // Round-off guard so that e.g. 2^{4 * 0.5} does not become 5.
  const double size = std::ceil(std::exp2(n * rate) - 1e-9);
  if (size > 1e12) throw Error(ErrorKind::SizeCap, "message set too large", size);
  return std::max<std::size_t>(1, static_cast<std::size_t>(size));
}

int draw(std::mt19937_64& gen, const std::vector<double>& pmf) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = unif(gen);
  double acc = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += pmf[i];
    if (r < acc) return static_cast<int>(i);
  }
  return last_positive;
}

}  // namespace

std::size_t RateSplit::m_count(int n) const { return message_count(n, r_m); }
std::size_t RateSplit::l_count(int n) const { return message_count(n, r_ell); }

RateSplit split_rates(const InfoQuantities& q, double fraction) {
  const double sum = q.i_u_b1_given_x1 + q.i_x_b_given_x1u;
  if (sum <= 0.0 || q.pdf_rate <= 0.0) return {0.0, 0.0};
  const double scale = fraction * q.pdf_rate / sum;
  return {std::max(0.0, scale * q.i_x_b_given_x1u), std::max(0.0, scale * q.i_u_b1_given_x1)};
}

CodebookEnsemble sample_codebooks(const CodeState& cs, int n, const RateSplit& rates, std::uint64_t seed, int block,
                                  const CodebookLimits& limits) {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "block length must be positive");
  CodebookEnsemble cb;
  cb.n = n;
  cb.block = block;
  cb.seed = seed;
  cb.m_count = rates.m_count(n);
  cb.l_count = rates.l_count(n);
  if (static_cast<double>(cb.m_count) * static_cast<double>(cb.l_count) > static_cast<double>(limits.max_messages)) {
    std::ostringstream os;
    os << "|M||L| = " << cb.m_count << " * " << cb.l_count << " exceeds cap " << limits.max_messages;
    throw Error(ErrorKind::SizeCap, os.str(), static_cast<double>(cb.m_count * cb.l_count));
  }

  const InputDistribution& d = cs.dist();
  const int nu = d.u_size(), nx = d.x_size(), nx1 = d.x1_size();
  std::vector<double> p_x1(static_cast<std::size_t>(nx1));
  for (int x1 = 0; x1 < nx1; ++x1) p_x1[static_cast<std::size_t>(x1)] = d.p_x1(x1);
  std::vector<std::vector<double>> p_u(static_cast<std::size_t>(nx1), std::vector<double>(static_cast<std::size_t>(nu)));
  for (int x1 = 0; x1 < nx1; ++x1)
    for (int u = 0; u < nu; ++u) p_u[static_cast<std::size_t>(x1)][static_cast<std::size_t>(u)] = d.p_u_given_x1(u, x1);
  std::vector<std::vector<double>> p_x(static_cast<std::size_t>(nu * nx1), std::vector<double>(static_cast<std::size_t>(nx)));
  for (int u = 0; u < nu; ++u)
    for (int x1 = 0; x1 < nx1; ++x1)
      for (int x = 0; x < nx; ++x)
        p_x[static_cast<std::size_t>(u * nx1 + x1)][static_cast<std::size_t>(x)] = d.p_x_given_u_x1(x, u, x1);

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), 0x636f6465u};
  std::mt19937_64 gen(seq);

  const std::size_t L = cb.l_count, M = cb.m_count;
  const auto un = static_cast<std::size_t>(n);
  cb.x1_words.assign(L, Word(un));
  cb.u_words.assign(L * L, Word(un));
  cb.x_words.assign(L * L * M, Word(un));
  for (std::size_t lp = 0; lp < L; ++lp) {
    Word& x1w = cb.x1_words[lp];
    for (auto& s : x1w) s = draw(gen, p_x1);
    for (std::size_t l = 0; l < L; ++l) {
      Word& uw = cb.u_words[lp * L + l];
      for (std::size_t i = 0; i < un; ++i) uw[i] = draw(gen, p_u[static_cast<std::size_t>(x1w[i])]);
      for (std::size_t m = 0; m < M; ++m) {
        Word& xw = cb.x_words[(lp * L + l) * M + m];
        for (std::size_t i = 0; i < un; ++i) {
          xw[i] = draw(gen, p_x[static_cast<std::size_t>(uw[i] * nx1 + x1w[i])]);
        }
      }
    }
  }
  return cb;
}

CodebookEnsemble permute_messages(const CodebookEnsemble& cb, const std::vector<std::size_t>& perm) {
  if (perm.size() != cb.m_count) throw Error(ErrorKind::DimMismatch, "permutation size differs from |M|");
  CodebookEnsemble out = cb;
  for (std::size_t lp = 0; lp < cb.l_count; ++lp)
    for (std::size_t l = 0; l < cb.l_count; ++l)
      for (std::size_t m = 0; m < cb.m_count; ++m)
        out.x_words[(lp * cb.l_count + l) * cb.m_count + m] = cb.x_word(lp, l, perm[m]);
  return out;
}

}  // namespace qrelay
