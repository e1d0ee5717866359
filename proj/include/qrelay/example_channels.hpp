#pragma once

// Built-in example channels. Each is also shipped as a spec file under
// channels/ (regenerate with `qrelay export-examples`).

#include <string>
#include <vector>

#include "qrelay/relay_model.hpp"

namespace qrelay::examples {

/// B1 = B = |x><x|, independent of x1. Rate 1 bit.
RelayChannel noiseless_binary();

/// Commuting embedding of a classical relay channel: the joint state is
/// diag(w1(.|x,x1)) (x) diag(w(.|x,x1)), with w1 and w given as
/// [x * x1_size + x1][y] tables.
RelayChannel classical_embedding(int x_size, int x1_size, const std::vector<std::vector<double>>& w1,
                                 const std::vector<std::vector<double>>& w);

/// Relay sees X through a BSC(0.1); destination sees X + X1 in {0, 1, 2}.
RelayChannel classical_bsc_adder();
/// Transition tables of classical_bsc_adder(), for oracle tests.
std::vector<std::vector<double>> bsc_adder_relay_table();
std::vector<std::vector<double>> bsc_adder_destination_table();

/// B1 = B = |psi_x>, x1 ignored, with <psi_0|psi_1> = s.
RelayChannel binary_pure_state(double overlap);

/// Destination output maximally mixed whatever the inputs; B1 = |x>.
RelayChannel destination_independent();

/// Qubit channel used by the simulation tests. X = 2a + c with a, c binary;
/// B1 = |psi_a> with overlap 0.85, B is |phi> depolarized by 0.15 where the
/// Bloch angle of |phi> is pi*x1 + c*pi/2.
RelayChannel qubit_test_channel();
inline constexpr double kQubitTestDelta = 1.0;

struct NamedChannel {
  std::string name;  // file stem under channels/
  RelayChannel channel;
};

std::vector<NamedChannel> shipped();

}  // namespace qrelay::examples
