#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "vqda/circuit.hpp"
#include "vqda/gates.hpp"
#include "vqda/reference.hpp"
#include "vqda/rng.hpp"

using namespace vqda;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

ParamCircuit as_circuit(int n_qubits, std::vector<GateSpec> gates, int n_params = 0) {
  ParamCircuit c;
  c.n_qubits = n_qubits;
  c.n_params = n_params;
  c.append(std::move(gates));
  return c;
}

Eigen::Matrix4cd cnot_hi_lo() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

Eigen::Matrix4cd cnot_lo_hi() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(3, 1) = m(2, 2) = m(1, 3) = 1.0;
  return m;
}

Eigen::Matrix4cd swap_matrix() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return m;
}

Universal1Q random_u1(SplitMix64& rng) {
  return Universal1Q{rng.angle(), rng.angle(), rng.angle()};
}

Universal2Q random_u2(SplitMix64& rng) {
  std::array<double, Universal2Q::kNumAngles> a;
  for (double& x : a) x = rng.angle();
  return Universal2Q::from_array(a);
}

}  // namespace

TEST_CASE("rotation matrix entries") {
  double t = 0.7;
  Mat2 y = ry_matrix(t);
  REQUIRE(std::abs(y(0, 0) - std::cos(t / 2)) < 1e-15);
  REQUIRE(std::abs(y(0, 1) + std::sin(t / 2)) < 1e-15);
  REQUIRE(std::abs(y(1, 0) - std::sin(t / 2)) < 1e-15);
  REQUIRE(std::abs(y(1, 1) - std::cos(t / 2)) < 1e-15);

  Mat2 z = rz_matrix(t);
  REQUIRE(std::abs(z(0, 0) - std::exp(cplx(0, -t / 2))) < 1e-15);
  REQUIRE(std::abs(z(1, 1) - std::exp(cplx(0, t / 2))) < 1e-15);
  REQUIRE(std::abs(z(0, 1)) == 0.0);
  REQUIRE(std::abs(z(1, 0)) == 0.0);

  // R_Y(pi) maps |0> to |1> with a plus sign under this convention.
  Mat2 ypi = ry_matrix(kPi);
  REQUIRE(std::abs(ypi(1, 0) - 1.0) < 1e-15);
  REQUIRE(std::abs(ypi(0, 1) + 1.0) < 1e-15);

  REQUIRE((matrix_1q(GateKind::RY, t) - y).norm() < 1e-15);
  REQUIRE((matrix_1q(GateKind::RZ, t) - z).norm() < 1e-15);
  REQUIRE((matrix_1q(GateKind::X, 0.0) - x_matrix()).norm() < 1e-15);
  REQUIRE((matrix_1q(GateKind::H, 0.0) - h_matrix()).norm() < 1e-15);
}

TEST_CASE("universal single qubit factorization") {
  SplitMix64 rng(10);
  for (int i = 0; i < 20; ++i) {
    Universal1Q u = random_u1(rng);
    Mat2 want = rz_matrix(u.alpha) * ry_matrix(u.beta) * rz_matrix(u.gamma);
    REQUIRE((u.matrix() - want).norm() < 1e-14);
    // Determinant one by construction.
    REQUIRE(std::abs(u.matrix().determinant() - 1.0) < 1e-12);
  }
}

TEST_CASE("two qubit block structure and unitarity") {
  SplitMix64 rng(20);
  Universal2Q u2 = random_u2(rng);
  auto gates = compile_universal_2q(u2, 0, 1, "blk");

  int rot = 0, cnot = 0;
  for (const auto& g : gates) {
    if (g.is_rotation()) ++rot;
    if (g.kind == GateKind::CNOT) ++cnot;
    REQUIRE(g.tag == "blk");
    REQUIRE(g.slot < 0);
  }
  REQUIRE(rot == 15);
  REQUIRE(cnot == 3);
  REQUIRE(gates.size() == 18);

  Eigen::MatrixXcd m = circuit_unitary(as_circuit(2, gates), {});
  Eigen::MatrixXcd prod = m * m.adjoint();
  REQUIRE((prod - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("two qubit block matches the assembled matrix product") {
  SplitMix64 rng(30);
  for (int trial = 0; trial < 10; ++trial) {
    Universal2Q u2 = random_u2(rng);

    Eigen::MatrixXcd want =
        oracle::kron(u2.a.matrix(), u2.b.matrix()) * cnot_hi_lo() *
        oracle::kron(rz_matrix(u2.mid_rz), ry_matrix(u2.mid_ry2)) * cnot_lo_hi() *
        oracle::kron(Mat2::Identity(), ry_matrix(u2.mid_ry)) * cnot_hi_lo() *
        oracle::kron(u2.c.matrix(), u2.d.matrix());

    Eigen::MatrixXcd got = circuit_unitary(as_circuit(2, compile_universal_2q(u2, 0, 1)), {});
    REQUIRE((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("two qubit block at zero angles is a swap") {
  Universal2Q zero;
  Eigen::MatrixXcd got = circuit_unitary(as_circuit(2, compile_universal_2q(zero, 0, 1)), {});
  REQUIRE((got - swap_matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two qubit block respects wire placement") {
  SplitMix64 rng(40);
  Universal2Q u2 = random_u2(rng);
  Eigen::MatrixXcd on01 = circuit_unitary(as_circuit(2, compile_universal_2q(u2, 0, 1)), {});

  // Same block on the outer wires of a 3-qubit register.
  Eigen::MatrixXcd got = circuit_unitary(as_circuit(3, compile_universal_2q(u2, 0, 2)), {});
  Eigen::MatrixXcd want = oracle::embed_on(3, on01, {0, 2});
  REQUIRE((got - want).cwiseAbs().maxCoeff() < 1e-12);

  // Reversed pair order.
  Eigen::MatrixXcd rev = circuit_unitary(as_circuit(2, compile_universal_2q(u2, 1, 0)), {});
  Eigen::MatrixXcd want_rev = oracle::embed_on(2, on01, {1, 0});
  REQUIRE((rev - want_rev).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("angle array round trip") {
  SplitMix64 rng(50);
  Universal2Q u2 = random_u2(rng);
  auto arr = u2.to_array();
  Universal2Q back = Universal2Q::from_array(arr);
  REQUIRE(back.to_array() == arr);
  REQUIRE_THROWS(Universal2Q::from_array(std::vector<double>(14, 0.0)));
}

TEST_CASE("slot emitting variant mirrors the fixed angle compilation") {
  SplitMix64 rng(60);
  std::vector<int> slots(15);
  for (int i = 0; i < 15; ++i) slots[i] = i;
  auto gates = emit_universal_2q(slots, 0, 1, "p");

  int rot = 0, cnot = 0;
  std::vector<double> angles(15);
  for (double& a : angles) a = rng.angle();
  for (const auto& g : gates) {
    if (g.is_rotation()) {
      REQUIRE(g.slot >= 0);
      ++rot;
    }
    if (g.kind == GateKind::CNOT) ++cnot;
  }
  REQUIRE(rot == 15);
  REQUIRE(cnot == 3);

  ParamCircuit c = as_circuit(2, gates, 15);
  Eigen::MatrixXcd got = circuit_unitary(c, angles);
  Universal2Q u2 = Universal2Q::from_array(angles);
  Eigen::MatrixXcd want = circuit_unitary(as_circuit(2, compile_universal_2q(u2, 0, 1)), {});
  REQUIRE((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("controlled unitary matches its block matrix up to phase") {
  SplitMix64 rng(70);
  for (int trial = 0; trial < 25; ++trial) {
    Universal1Q v = random_u1(rng);
    int control_state = (int)rng.bounded(2);

    auto gates = compile_controlled_1q(v, 0, 1, control_state);
    Eigen::MatrixXcd got = circuit_unitary(as_circuit(2, gates), {});
    Eigen::MatrixXcd want = controlled_1q_matrix(v.matrix(), control_state);
    auto eq = equivalence_up_to_phase(got, want, 1e-9);
    INFO("max deviation " << eq.max_deviation);
    REQUIRE(eq.equivalent);
  }
}

TEST_CASE("controlled unitary with reversed wire order") {
  SplitMix64 rng(80);
  Universal1Q v = random_u1(rng);
  auto gates = compile_controlled_1q(v, 1, 0, 1);
  Eigen::MatrixXcd got = circuit_unitary(as_circuit(2, gates), {});
  // Control on qubit 1 means the block matrix lives on the pair (1, 0).
  Eigen::MatrixXcd want =
      oracle::embed_on(2, controlled_1q_matrix(v.matrix(), 1), {1, 0});
  auto eq = equivalence_up_to_phase(got, want, 1e-9);
  REQUIRE(eq.equivalent);
}

TEST_CASE("controlled unitary gate budget") {
  Universal1Q v{0.3, 0.9, 1.7};
  auto on1 = compile_controlled_1q(v, 0, 1, 1);
  int rot = 0, cnot = 0, xs = 0;
  for (const auto& g : on1) {
    if (g.is_rotation()) ++rot;
    if (g.kind == GateKind::CNOT) ++cnot;
    if (g.kind == GateKind::X) ++xs;
  }
  REQUIRE(rot == 9);
  REQUIRE(cnot == 2);
  REQUIRE(xs == 0);

  auto on0 = compile_controlled_1q(v, 0, 1, 0);
  xs = 0;
  for (const auto& g : on0)
    if (g.kind == GateKind::X) ++xs;
  REQUIRE(xs == 2);
}

TEST_CASE("controlled block matrix layout") {
  Mat2 v = ry_matrix(1.1);
  Mat4 m1 = controlled_1q_matrix(v, 1);
  // Active on control bit 1: top-left block identity, bottom-right block v.
  REQUIRE(std::abs(m1(0, 0) - 1.0) < 1e-15);
  REQUIRE(std::abs(m1(1, 1) - 1.0) < 1e-15);
  REQUIRE(std::abs(m1(2, 2) - v(0, 0)) < 1e-15);
  REQUIRE(std::abs(m1(3, 2) - v(1, 0)) < 1e-15);

  Mat4 m0 = controlled_1q_matrix(v, 0);
  REQUIRE(std::abs(m0(0, 0) - v(0, 0)) < 1e-15);
  REQUIRE(std::abs(m0(2, 2) - 1.0) < 1e-15);
}

TEST_CASE("pooler at zero angles is the identity") {
  std::vector<int> slots(9);
  for (int i = 0; i < 9; ++i) slots[i] = i;
  std::vector<double> zeros(9, 0.0);
  for (int control_state : {0, 1}) {
    auto gates = emit_pooler(slots, 0, 1, control_state);
    ParamCircuit c = as_circuit(2, gates, 9);
    Eigen::MatrixXcd got = circuit_unitary(c, zeros);
    REQUIRE((got - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pooler structure counts") {
  std::vector<int> slots{4, 5, 6, 7, 8, 9, 10, 11, 12};
  auto gates = emit_pooler(slots, 2, 0, 1, "pool");
  int rot = 0, cnot = 0;
  for (const auto& g : gates) {
    REQUIRE(g.tag == "pool");
    if (g.is_rotation()) {
      ++rot;
      REQUIRE(g.slot >= 4);
      REQUIRE(g.slot <= 12);
    }
    if (g.kind == GateKind::CNOT) ++cnot;
  }
  REQUIRE(rot == 9);
  REQUIRE(cnot == 2);
}

TEST_CASE("pooler preserves the control subspaces for any angles") {
  // With free angles the pooler is diag(A B C, A X B X C) in the control
  // basis: the control value never changes, only which unitary hits the
  // target. Check block diagonality and per-block unitarity.
  SplitMix64 rng(90);
  std::vector<int> slots(9);
  for (int i = 0; i < 9; ++i) slots[i] = i;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> angles(9);
    for (double& a : angles) a = rng.angle();

    auto gates = emit_pooler(slots, 0, 1, 1);
    Eigen::MatrixXcd got = circuit_unitary(as_circuit(2, gates, 9), angles);

    REQUIRE(got.block(0, 2, 2, 2).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE(got.block(2, 0, 2, 2).cwiseAbs().maxCoeff() < 1e-12);
    for (int off : {0, 2}) {
      Eigen::MatrixXcd blk = got.block(off, off, 2, 2);
      REQUIRE((blk * blk.adjoint() - Eigen::MatrixXcd::Identity(2, 2))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }

    // On the kept wire the two blocks differ by the ABC relation: the
    // control_state block is A X B X C, the other A B C.
    Universal1Q c_blk{angles[0], angles[1], angles[2]};
    Universal1Q b_blk{angles[3], angles[4], angles[5]};
    Universal1Q a_blk{angles[6], angles[7], angles[8]};
    Mat2 x = x_matrix();
    Eigen::MatrixXcd want_off = a_blk.matrix() * b_blk.matrix() * c_blk.matrix();
    Eigen::MatrixXcd want_on = a_blk.matrix() * x * b_blk.matrix() * x * c_blk.matrix();
    REQUIRE((got.block(0, 0, 2, 2) - want_off).cwiseAbs().maxCoeff() < 1e-12);
    REQUIRE((got.block(2, 2, 2, 2) - want_on).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("deferred measurement equivalence") {
  SplitMix64 rng(100);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 4;
    int c = (int)rng.bounded(4);
    int t = (int)rng.bounded(3);
    if (t >= c) ++t;
    int control_state = (int)rng.bounded(2);
    Universal1Q v = random_u1(rng);

    StateVector psi = oracle::random_state(n, rng);

    // Coherent path: controlled gate then terminal measurement.
    StateVector coherent = psi;
    ParamCircuit circ = as_circuit(n, compile_controlled_1q(v, c, t, control_state));
    apply_circuit(circ, {}, coherent);
    std::vector<int> all{0, 1, 2, 3};
    auto p_coherent = coherent.probabilities_on(all);

    // Mid-circuit measurement path via the oracle.
    auto p_deferred = oracle::measure_then_conditional(psi, c, t, control_state, v.matrix());

    REQUIRE(p_coherent.size() == p_deferred.size());
    for (std::size_t i = 0; i < p_coherent.size(); ++i)
      REQUIRE(p_coherent[i] == Approx(p_deferred[i]).margin(1e-10));
  }
}

TEST_CASE("phase equivalence helper") {
  SplitMix64 rng(110);
  Eigen::MatrixXcd m = oracle::random_unitary(4, rng);
  REQUIRE(equivalence_up_to_phase(m, m).equivalent);

  Eigen::MatrixXcd phased = std::exp(cplx(0, 1.234)) * m;
  REQUIRE(equivalence_up_to_phase(phased, m).equivalent);

  Eigen::MatrixXcd other = oracle::random_unitary(4, rng);
  REQUIRE_FALSE(equivalence_up_to_phase(other, m).equivalent);

  // Deviation is reported.
  Eigen::MatrixXcd nudged = m;
  nudged(0, 0) += 1e-6;
  auto eq = equivalence_up_to_phase(nudged, m, 1e-9);
  REQUIRE_FALSE(eq.equivalent);
  REQUIRE(eq.max_deviation > 1e-8);
}

TEST_CASE("gate kind names round trip") {
  for (GateKind k : {GateKind::RY, GateKind::RZ, GateKind::X, GateKind::H, GateKind::CNOT})
    REQUIRE(gate_kind_from_name(gate_kind_name(k)) == k);
  REQUIRE_THROWS(gate_kind_from_name("RYY"));
}
