#include "vqda/encoder.hpp"

#include <cmath>
#include <stdexcept>

#include "vqda/rng.hpp"

namespace vqda {

AmplitudeTarget from_raw_impl(std::vector<double> values) {
  if (values.empty() || (values.size() & (values.size() - 1)) != 0)
    throw std::invalid_argument("amplitude target length " + std::to_string(values.size()) +
                                " is not a power of two");
  double norm_sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v))
      throw std::invalid_argument("amplitude target contains a non-finite entry");
    norm_sq += v * v;
  }
  if (norm_sq == 0.0)
    throw std::invalid_argument("amplitude target is identically zero");
  AmplitudeTarget t;
  t.raw = std::move(values);
  double inv = 1.0 / std::sqrt(norm_sq);
  t.normalized.reserve(t.raw.size());
  for (double v : t.raw) t.normalized.push_back(v * inv);
  return t;
}

AmplitudeTarget AmplitudeTarget::from_raw(std::vector<double> values) {
  return from_raw_impl(std::move(values));
}

int AmplitudeTarget::n_qubits() const {
  int n = 0;
  size_t d = normalized.size();
  while (d > 1) {
    d >>= 1;
    ++n;
  }
  return n;
}

StateVector exact_encode(const AmplitudeTarget& target) {
  StateVector s(target.n_qubits());
  for (size_t i = 0; i < target.normalized.size(); ++i)
    s.amp(i) = cplx(target.normalized[i], 0.0);
  return s;
}

EncoderAnsatz build_encoder_ansatz(const EncoderConfig& config) {
  if (config.n_qubits < 1)
    throw std::domain_error("encoder needs at least 1 qubit");
  if (config.n_layers < 1)
    throw std::domain_error("encoder needs at least 1 layer");

  EncoderAnsatz ansatz;
  ansatz.n_qubits = config.n_qubits;
  ansatz.n_layers = config.n_layers;
  ParamCircuit& c = ansatz.circuit;
  c.n_qubits = config.n_qubits;
  int next_slot = 0;
  auto rotation_layer = [&](int layer) {
    std::string tag = "enc-l" + std::to_string(layer);
    for (int q = 0; q < config.n_qubits; ++q) {
      c.append({GateSpec{GateKind::RZ, q, -1, next_slot++, 0.0, tag}});
      c.append({GateSpec{GateKind::RY, q, -1, next_slot++, 0.0, tag}});
      c.append({GateSpec{GateKind::RZ, q, -1, next_slot++, 0.0, tag}});
    }
  };
  for (int layer = 0; layer < config.n_layers; ++layer) {
    rotation_layer(layer);
    std::string tag = "enc-l" + std::to_string(layer);
    for (int q = 0; q + 1 < config.n_qubits; ++q)
      c.append({GateSpec{GateKind::CNOT, q, q + 1, -1, 0.0, tag}});
  }
  rotation_layer(config.n_layers);
  c.n_params = next_slot;
  validate(c);
  return ansatz;
}

double encoder_objective(const EncoderAnsatz& ansatz,
                         std::span<const double> params,
                         const StateVector& x_state) {
  if (x_state.n_qubits() != ansatz.n_qubits)
    throw std::invalid_argument("encoder state width does not match ansatz");
  StateVector s = x_state;
  apply_circuit(ansatz.circuit, params, s);
  double total = 0.0;
  for (int q = 0; q < ansatz.n_qubits; ++q) total += s.expect_z(q);
  return total / ansatz.n_qubits;
}

EncoderResult train_encoder(const AmplitudeTarget& target,
                            const EncoderConfig& config,
                            const EncoderTrainConfig& train,
                            std::uint64_t seed) {
  if (target.n_qubits() != config.n_qubits)
    throw std::invalid_argument("target has " + std::to_string(target.n_qubits()) +
                                " qubits, encoder config says " +
                                std::to_string(config.n_qubits));
  if (train.steps < 1 || train.restarts < 1)
    throw std::invalid_argument("encoder training needs at least 1 step and 1 restart");

  EncoderAnsatz ansatz = build_encoder_ansatz(config);
  StateVector x_state = exact_encode(target);

  std::vector<Observable> obs;
  std::vector<double> weights(config.n_qubits, 1.0 / config.n_qubits);
  for (int q = 0; q < config.n_qubits; ++q) obs.push_back(Observable{q, Basis::Z});

  EncoderResult best;
  best.final_objective = 2.0;  // worse than any reachable value
  SplitMix64 root(seed);
  for (int r = 0; r < train.restarts; ++r) {
    SplitMix64 rng = root.fork((std::uint64_t)r);
    std::vector<double> params(ansatz.circuit.n_params);
    for (double& p : params) p = rng.angle();

    OptimizerConfig oc;
    oc.kind = OptimizerKind::Adam;
    oc.lr = train.lr;
    Optimizer opt(oc, params.size());

    GradRequest req;
    req.circuit = &ansatz.circuit;
    req.input = &x_state;
    req.observables = obs;
    req.weights = weights;

    double objective = 0.0;
    int step = 0;
    for (; step < train.steps; ++step) {
      req.params = params;
      objective = objective_value(req);
      if (objective <= -1.0 + train.target_tol) break;
      std::vector<double> grad = gradient(req, train.engine);
      opt.step(params, grad);
    }
    req.params = params;
    objective = objective_value(req);

    if (objective < best.final_objective) {
      best.params = params;
      best.final_objective = objective;
      best.steps_used = step;
      best.restarts_used = r + 1;
    }
    if (best.final_objective <= -1.0 + train.target_tol) break;
  }

  best.reached_target = best.final_objective <= -1.0 + train.target_tol;
  best.fidelity = encoded_fidelity(target, prepare_encoded(ansatz, best.params));
  return best;
}

StateVector prepare_encoded(const EncoderAnsatz& ansatz, std::span<const double> params) {
  StateVector s(ansatz.n_qubits);
  for (int q = 0; q < ansatz.n_qubits; ++q) s.apply_x(q);
  ParamCircuit inverse = dagger(bind_params(ansatz.circuit, params));
  apply_circuit(inverse, {}, s);
  return s;
}

double encoded_fidelity(const AmplitudeTarget& target, const StateVector& prepared) {
  StateVector exact = exact_encode(target);
  return exact.fidelity(prepared);
}

}  // namespace vqda
