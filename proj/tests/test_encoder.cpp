#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "vqda/circuit.hpp"
#include "vqda/encoder.hpp"
#include "vqda/rng.hpp"

using namespace vqda;
using Catch::Approx;

TEST_CASE("amplitude target validation and normalization") {
  auto t = AmplitudeTarget::from_raw({3.0, 0.0, 4.0, 0.0});
  REQUIRE(t.n_qubits() == 2);
  REQUIRE(t.normalized[0] == Approx(0.6));
  REQUIRE(t.normalized[2] == Approx(0.8));
  REQUIRE(t.raw[0] == 3.0);

  REQUIRE_THROWS(AmplitudeTarget::from_raw({1.0, 2.0, 3.0}));       // not a power of two
  REQUIRE_THROWS(AmplitudeTarget::from_raw({0.0, 0.0, 0.0, 0.0}));  // all zero
  REQUIRE_THROWS(AmplitudeTarget::from_raw({}));
}

TEST_CASE("exact encode writes the normalized amplitudes") {
  auto t = AmplitudeTarget::from_raw({1.0, 1.0, 1.0, 1.0});
  StateVector s = exact_encode(t);
  REQUIRE(s.n_qubits() == 2);
  for (std::size_t i = 0; i < 4; ++i) REQUIRE(s.amp(i) == cplx(0.5, 0.0));
  REQUIRE(s.norm() == Approx(1.0).margin(1e-12));
}

TEST_CASE("encoder ansatz structure") {
  EncoderConfig cfg;
  cfg.n_qubits = 3;
  cfg.n_layers = 2;
  EncoderAnsatz a = build_encoder_ansatz(cfg);
  REQUIRE(a.circuit.n_qubits == 3);
  // (layers + 1) rotation layers, three rotations per wire each.
  REQUIRE(a.circuit.n_params == (cfg.n_layers + 1) * 3 * cfg.n_qubits);
  REQUIRE_NOTHROW(validate(a.circuit));

  CountReport r = count_report(a.circuit);
  REQUIRE(r.rotations == a.circuit.n_params);
  // One CNOT ladder per layer on n - 1 adjacent pairs.
  REQUIRE(r.cnots == cfg.n_layers * (cfg.n_qubits - 1));
}

TEST_CASE("objective bounds at computational inputs") {
  EncoderConfig cfg;
  cfg.n_qubits = 2;
  cfg.n_layers = 1;
  EncoderAnsatz a = build_encoder_ansatz(cfg);
  std::vector<double> zeros(a.circuit.n_params, 0.0);

  // With all angles zero the circuit reduces to its CNOT ladder.
  // CNOT(0,1) maps |10> to |11>, the objective's exact minimum.
  REQUIRE(encoder_objective(a, zeros, StateVector::basis(2, 2)) ==
          Approx(-1.0).margin(1e-12));
  // |00> is untouched by the ladder and scores the maximum.
  REQUIRE(encoder_objective(a, zeros, StateVector(2)) == Approx(1.0).margin(1e-12));
}

TEST_CASE("prepare encoded inverts the trained ansatz") {
  // For any parameter vector, preparing from |1...1> and then running the
  // forward ansatz must land exactly on |1...1> again.
  SplitMix64 rng(5);
  EncoderConfig cfg;
  cfg.n_qubits = 3;
  cfg.n_layers = 2;
  EncoderAnsatz a = build_encoder_ansatz(cfg);
  std::vector<double> params(a.circuit.n_params);
  for (double& p : params) p = rng.angle();

  StateVector prepared = prepare_encoded(a, params);
  StateVector forward = run(a.circuit, params, prepared);
  StateVector ones = StateVector::basis(3, 7);
  REQUIRE(forward.fidelity(ones) == Approx(1.0).margin(1e-10));
}

TEST_CASE("training hits basis states nearly perfectly") {
  EncoderConfig cfg;
  cfg.n_qubits = 2;
  cfg.n_layers = 2;
  EncoderTrainConfig train;
  train.steps = 150;
  train.lr = 0.05;
  train.restarts = 2;

  std::vector<double> raw(4, 0.0);
  raw[2] = 1.0;
  auto target = AmplitudeTarget::from_raw(raw);
  EncoderResult res = train_encoder(target, cfg, train, 11);

  REQUIRE(res.fidelity > 0.999);
  EncoderAnsatz a = build_encoder_ansatz(cfg);
  StateVector prepared = prepare_encoded(a, res.params);
  REQUIRE(encoded_fidelity(target, prepared) == Approx(res.fidelity).margin(1e-12));
}

TEST_CASE("training approximates a random target") {
  SplitMix64 rng(17);
  std::vector<double> raw(4);
  for (double& v : raw) v = rng.uniform(0.1, 1.0);
  auto target = AmplitudeTarget::from_raw(raw);

  EncoderConfig cfg;
  cfg.n_qubits = 2;
  cfg.n_layers = 2;
  EncoderTrainConfig train;
  train.steps = 200;
  train.lr = 0.05;
  train.restarts = 2;
  EncoderResult res = train_encoder(target, cfg, train, 23);

  REQUIRE(res.fidelity > 0.9);
  REQUIRE(res.steps_used > 0);
  REQUIRE(res.restarts_used >= 1);
}

TEST_CASE("encoder training is deterministic per seed") {
  std::vector<double> raw{0.5, 0.25, 0.2, 0.8};
  auto target = AmplitudeTarget::from_raw(raw);
  EncoderConfig cfg;
  cfg.n_qubits = 2;
  cfg.n_layers = 1;
  EncoderTrainConfig train;
  train.steps = 30;
  train.restarts = 1;

  EncoderResult a = train_encoder(target, cfg, train, 99);
  EncoderResult b = train_encoder(target, cfg, train, 99);
  REQUIRE(a.params == b.params);
  REQUIRE(a.final_objective == b.final_objective);
}
