#include "qrelay/example_channels.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace qrelay::examples {

namespace {

Eigen::VectorXcd basis(int dim, int i) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(i) = 1.0;
  return v;
}

// cos(theta/2)|0> + sin(theta/2)|1>
Eigen::VectorXcd bloch_ket(double theta) {
  Eigen::VectorXcd v(2);
  v << std::cos(theta / 2.0), std::sin(theta / 2.0);
  return v;
}

Matrix projector(const Eigen::VectorXcd& v) { return v * v.adjoint(); }

RelayChannel from_product(int x_size, int x1_size, int d1, int d,
                          const std::function<Matrix(int, int)>& b1, const std::function<Matrix(int, int)>& b) {
  std::vector<DensityOperator> states;
  for (int x = 0; x < x_size; ++x)
    for (int x1 = 0; x1 < x1_size; ++x1) states.push_back(validate_density(kron(b1(x, x1), b(x, x1)), {d1, d}));
  return RelayChannel(x_size, x1_size, d1, d, std::move(states));
}

}  // namespace

RelayChannel noiseless_binary() {
  return from_product(
      2, 2, 2, 2, [](int x, int) { return projector(basis(2, x)); }, [](int x, int) { return projector(basis(2, x)); });
}

RelayChannel classical_embedding(int x_size, int x1_size, const std::vector<std::vector<double>>& w1,
                                 const std::vector<std::vector<double>>& w) {
  const auto row = [x1_size](int x, int x1) { return static_cast<std::size_t>(x * x1_size + x1); };
  const auto diag = [](const std::vector<double>& p) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) v(static_cast<Eigen::Index>(i)) = p[i];
    return Matrix(v.asDiagonal());
  };
  return from_product(
      x_size, x1_size, static_cast<int>(w1.front().size()), static_cast<int>(w.front().size()),
      [&](int x, int x1) { return diag(w1[row(x, x1)]); }, [&](int x, int x1) { return diag(w[row(x, x1)]); });
}

std::vector<std::vector<double>> bsc_adder_relay_table() {
  // rows (x, x1) = (0,0), (0,1), (1,0), (1,1)
  return {{0.9, 0.1}, {0.9, 0.1}, {0.1, 0.9}, {0.1, 0.9}};
}

std::vector<std::vector<double>> bsc_adder_destination_table() {
  return {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
}

RelayChannel classical_bsc_adder() { return classical_embedding(2, 2, bsc_adder_relay_table(), bsc_adder_destination_table()); }

RelayChannel binary_pure_state(double overlap) {
  const double theta = 2.0 * std::acos(overlap);
  const auto ket = [theta](int x, int) { return projector(bloch_ket(x * theta)); };
  return from_product(2, 2, 2, 2, ket, ket);
}

RelayChannel destination_independent() {
  return from_product(
      2, 2, 2, 2, [](int x, int) { return projector(basis(2, x)); },
      [](int, int) { return Matrix(Matrix::Identity(2, 2) * 0.5); });
}

RelayChannel qubit_test_channel() {
  constexpr double pi = std::numbers::pi;
  constexpr double noise = 0.15;
  const double relay_theta = 2.0 * std::acos(0.85);
  // x = 2a + c: the relay sees only a, the destination sees c and x1.
  return from_product(
      4, 2, 2, 2, [&](int x, int) { return projector(bloch_ket((x / 2) * relay_theta)); },
      [&](int x, int x1) {
        const Matrix pure = projector(bloch_ket(x1 * pi + (x % 2) * pi / 2.0));
        return Matrix((1.0 - noise) * pure + noise * 0.5 * Matrix::Identity(2, 2));
      });
}

std::vector<NamedChannel> shipped() {
  return {{"noiseless_binary", noiseless_binary()},
          {"classical_bsc_adder", classical_bsc_adder()},
          {"pure_state_s05", binary_pure_state(0.5)},
          {"destination_independent", destination_independent()},
          {"qubit_test", qubit_test_channel()}};
}

}  // namespace qrelay::examples
