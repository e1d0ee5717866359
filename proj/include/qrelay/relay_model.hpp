#pragma once

// Classical-input, quantum-output relay channels and the information
// quantities of the partial decode-forward rate.

#include <memory>
#include <vector>

#include "qrelay/qops.hpp"

namespace qrelay {

/// (x, x1) -> rho^{B1 B}_{x,x1}: Source input x, Relay input x1, Relay output
/// B1 and Destination output B. Cheap to copy (shared immutable storage).
class RelayChannel {
 public:
  /// `states` is indexed x * x1_size + x1 and must be complete. Every entry is
  /// re-validated as a density operator on [dim_b1, dim_b].
  RelayChannel(int x_size, int x1_size, int dim_b1, int dim_b, std::vector<DensityOperator> states);

  int x_size() const noexcept { return data_->x_size; }
  int x1_size() const noexcept { return data_->x1_size; }
  int dim_b1() const noexcept { return data_->dim_b1; }
  int dim_b() const noexcept { return data_->dim_b; }

  const DensityOperator& state(int x, int x1) const { return data_->joint[index(x, x1)]; }
  /// Tr_{B1} rho_{x,x1}.
  const DensityOperator& b_state(int x, int x1) const { return data_->b[index(x, x1)]; }
  /// Tr_{B} rho_{x,x1}.
  const DensityOperator& b1_state(int x, int x1) const { return data_->b1[index(x, x1)]; }
  double b_entropy(int x, int x1) const { return data_->b_entropy[index(x, x1)]; }
  double b1_entropy(int x, int x1) const { return data_->b1_entropy[index(x, x1)]; }

 private:
  struct Data {
    int x_size, x1_size, dim_b1, dim_b;
    std::vector<DensityOperator> joint, b, b1;
    std::vector<double> b_entropy, b1_entropy;
  };
  std::size_t index(int x, int x1) const;
  std::shared_ptr<const Data> data_;
};

/// Joint pmf p(u, x, x1) stored flat with index (u * x_size + x) * x1_size + x1.
class InputDistribution {
 public:
  InputDistribution(int u_size, int x_size, int x1_size, std::vector<double> probs);

  static InputDistribution uniform(int u_size, int x_size, int x1_size);

  int u_size() const noexcept { return u_size_; }
  int x_size() const noexcept { return x_size_; }
  int x1_size() const noexcept { return x1_size_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  double operator()(int u, int x, int x1) const { return probs_[index(u, x, x1)]; }
  std::size_t index(int u, int x, int x1) const {
    return (static_cast<std::size_t>(u) * x_size_ + x) * x1_size_ + x1;
  }

  double p_x1(int x1) const;
  double p_u_x1(int u, int x1) const;
  double p_x_x1(int x, int x1) const;
  /// Conditionals; uniform where the conditioning event has probability 0.
  double p_u_given_x1(int u, int x1) const;
  double p_x_given_u_x1(int x, int u, int x1) const;
  double p_x_given_x1(int x, int x1) const;

 private:
  int u_size_, x_size_, x1_size_;
  std::vector<double> probs_;
};

/// Entropies (bits) of the code state's conditional quantum outputs.
struct ConditionalEntropies {
  double b;               // H(B)
  double b_given_x1;      // H(B|X1)
  double b_given_ux1;     // H(B|U X1)
  double b_given_uxx1;    // H(B|U X X1)
  double b1_given_x1;     // H(B1|X1)
  double b1_given_ux1;    // H(B1|U X1)
};

/// The classical-quantum code state theta^{U X X1 B1 B} together with its
/// reduced and averaged states. Classical registers are kept as weights.
class CodeState {
 public:
  const RelayChannel& channel() const noexcept { return channel_; }
  const InputDistribution& dist() const noexcept { return dist_; }

  /// tau_{x1} = sum_{u,x} p(u|x1) p(x|x1,u) rho^B_{x,x1}
  const DensityOperator& tau(int x1) const { return tau_[static_cast<std::size_t>(x1)]; }
  /// tau_bar = sum_{x1} p(x1) tau_{x1}
  const DensityOperator& tau_bar() const { return tau_bar_; }
  /// rho_bar_{u,x1} = sum_x p(x|x1,u) rho^B_{x,x1}
  const DensityOperator& rho_bar(int u, int x1) const { return rho_bar_[ux1(u, x1)]; }
  /// Doubly averaged rho_dbar_{x1}; the same operator as tau_{x1}.
  const DensityOperator& rho_dbar(int x1) const { return tau(x1); }
  /// sigma_{u,x1} = sum_x p(x|x1,u) Tr_B rho_{x,x1}
  const DensityOperator& sigma(int u, int x1) const { return sigma_[ux1(u, x1)]; }
  /// sigma_bar_{x1} = sum_u p(u|x1) sigma_{u,x1}
  const DensityOperator& sigma_bar(int x1) const { return sigma_bar_[static_cast<std::size_t>(x1)]; }

  const ConditionalEntropies& entropies() const noexcept { return entropies_; }

 private:
  CodeState(RelayChannel channel, InputDistribution dist);
  std::size_t ux1(int u, int x1) const { return static_cast<std::size_t>(u) * channel_.x1_size() + x1; }

  RelayChannel channel_;
  InputDistribution dist_;
  std::vector<DensityOperator> tau_;
  DensityOperator tau_bar_;
  std::vector<DensityOperator> rho_bar_;
  std::vector<DensityOperator> sigma_;
  std::vector<DensityOperator> sigma_bar_;
  ConditionalEntropies entropies_{};

  friend CodeState build_code_state(const RelayChannel&, const InputDistribution&);
};

/// Throws AlphabetMismatch if |X| or |X1| differ between channel and dist.
CodeState build_code_state(const RelayChannel& channel, const InputDistribution& dist);

double mutual_info_xx1_b(const CodeState& cs);                // I(X X1; B)
double cond_mutual_info_u_b1_given_x1(const CodeState& cs);   // I(U; B1 | X1)
double cond_mutual_info_x_b_given_x1u(const CodeState& cs);   // I(X; B | X1 U)
double mutual_info_x1_b(const CodeState& cs);                 // I(X1; B)
double cond_mutual_info_ux_b_given_x1(const CodeState& cs);   // I(U X; B | X1)

struct InfoQuantities {
  double i_xx1_b = 0.0;
  double i_u_b1_given_x1 = 0.0;
  double i_x_b_given_x1u = 0.0;
  /// min(i_xx1_b, i_u_b1_given_x1 + i_x_b_given_x1u)
  double pdf_rate = 0.0;
};

InfoQuantities pdf_rate(const CodeState& cs);

/// Convenience: pdf_rate(build_code_state(channel, dist)).
InfoQuantities evaluate_rate(const RelayChannel& channel, const InputDistribution& dist);

}  // namespace qrelay
