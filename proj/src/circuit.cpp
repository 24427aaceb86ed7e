#include "vqda/circuit.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

#include "vqda/rng.hpp"

namespace vqda {

void ParamCircuit::append(std::vector<GateSpec> more) {
  gates.insert(gates.end(), std::make_move_iterator(more.begin()),
               std::make_move_iterator(more.end()));
}

void validate(const ParamCircuit& circuit) {
  std::vector<bool> cited(circuit.n_params, false);
  for (const GateSpec& g : circuit.gates) {
    auto check_q = [&](int q) {
      if (q < 0 || q >= circuit.n_qubits) {
        throw std::invalid_argument("gate qubit out of range");
      }
    };
    check_q(g.q0);
    if (g.two_qubit()) {
      check_q(g.q1);
      if (g.q0 == g.q1) throw std::invalid_argument("CNOT qubits equal");
    }
    if (g.slot >= 0) {
      if (!g.is_rotation()) {
        throw std::invalid_argument("only rotation gates may cite a slot");
      }
      if (g.slot >= circuit.n_params) {
        throw std::invalid_argument("slot index out of range");
      }
      cited[g.slot] = true;
    }
  }
  for (int s = 0; s < circuit.n_params; ++s) {
    if (!cited[s]) {
      throw std::invalid_argument("slot " + std::to_string(s) +
                                  " cited by no gate");
    }
  }
}

double gate_angle(const GateSpec& gate, std::span<const double> params) {
  if (gate.slot < 0) return gate.angle;
  return params[gate.slot];
}

void apply_circuit(const ParamCircuit& circuit, std::span<const double> params,
                   StateVector& state, int shift_gate, double shift_delta) {
  if (static_cast<int>(params.size()) != circuit.n_params) {
    throw std::invalid_argument("parameter count mismatch: circuit wants " +
                                std::to_string(circuit.n_params) + ", got " +
                                std::to_string(params.size()));
  }
  if (state.n_qubits() != circuit.n_qubits) {
    throw std::invalid_argument("state/circuit qubit count mismatch");
  }
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const GateSpec& g = circuit.gates[i];
    switch (g.kind) {
      case GateKind::RY: {
        double t = gate_angle(g, params);
        if (static_cast<int>(i) == shift_gate) t += shift_delta;
        state.apply_ry(t, g.q0);
        break;
      }
      case GateKind::RZ: {
        double t = gate_angle(g, params);
        if (static_cast<int>(i) == shift_gate) t += shift_delta;
        state.apply_rz(t, g.q0);
        break;
      }
      case GateKind::X:
        state.apply_x(g.q0);
        break;
      case GateKind::H:
        state.apply_h(g.q0);
        break;
      case GateKind::CNOT:
        state.apply_cnot(g.q0, g.q1);
        break;
    }
  }
}

StateVector run(const ParamCircuit& circuit, std::span<const double> params,
                const StateVector& input) {
  StateVector out = input;
  apply_circuit(circuit, params, out);
  return out;
}

ParamCircuit bind_params(const ParamCircuit& circuit,
                         std::span<const double> params) {
  if (static_cast<int>(params.size()) != circuit.n_params) {
    throw std::invalid_argument("bind_params: parameter count mismatch");
  }
  ParamCircuit bound;
  bound.n_qubits = circuit.n_qubits;
  bound.n_params = 0;
  bound.gates = circuit.gates;
  for (GateSpec& g : bound.gates) {
    if (g.slot >= 0) {
      g.angle = params[g.slot];
      g.slot = -1;
    }
  }
  return bound;
}

ParamCircuit dagger(const ParamCircuit& circuit) {
  if (circuit.n_params != 0) {
    throw std::invalid_argument(
        "dagger requires a bound circuit; call bind_params first");
  }
  ParamCircuit inv;
  inv.n_qubits = circuit.n_qubits;
  inv.n_params = 0;
  inv.gates.reserve(circuit.gates.size());
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    GateSpec g = *it;
    if (g.is_rotation()) g.angle = -g.angle;
    inv.gates.push_back(std::move(g));
  }
  return inv;
}

ParamVector init_params(const ParamCircuit& circuit, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ParamVector p(circuit.n_params);
  for (double& v : p) v = rng.angle();
  return p;
}

CountReport count_report(const ParamCircuit& circuit) {
  CountReport r;
  r.n_params = circuit.n_params;
  std::map<std::string, std::set<int>> slots_by_tag;
  for (const GateSpec& g : circuit.gates) {
    BlockCounts& b = r.blocks[g.tag];
    if (g.is_rotation()) {
      ++r.rotations;
      ++b.rotations;
    } else if (g.kind == GateKind::CNOT) {
      ++r.cnots;
      ++b.cnots;
    } else {
      ++r.others;
      ++b.others;
    }
    if (g.slot >= 0) slots_by_tag[g.tag].insert(g.slot);
  }
  for (auto& [tag, slots] : slots_by_tag) {
    r.blocks[tag].params = static_cast<int>(slots.size());
  }
  return r;
}

std::string circuit_to_json(const ParamCircuit& circuit) {
  nlohmann::json j;
  j["n_qubits"] = circuit.n_qubits;
  j["n_params"] = circuit.n_params;
  nlohmann::json gates = nlohmann::json::array();
  for (const GateSpec& g : circuit.gates) {
    nlohmann::json e;
    e["kind"] = gate_kind_name(g.kind);
    if (g.two_qubit()) {
      e["qubits"] = {g.q0, g.q1};
    } else {
      e["qubits"] = {g.q0};
    }
    if (g.slot >= 0) {
      e["slot"] = g.slot;
    } else if (g.is_rotation()) {
      e["angle"] = g.angle;
    }
    if (!g.tag.empty()) e["tag"] = g.tag;
    gates.push_back(std::move(e));
  }
  j["gates"] = std::move(gates);
  return j.dump(2);
}

ParamCircuit circuit_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ParamCircuit c;
  c.n_qubits = j.at("n_qubits").get<int>();
  c.n_params = j.at("n_params").get<int>();
  for (const auto& e : j.at("gates")) {
    GateSpec g;
    g.kind = gate_kind_from_name(e.at("kind").get<std::string>());
    const auto& qs = e.at("qubits");
    g.q0 = qs.at(0).get<int>();
    if (qs.size() > 1) g.q1 = qs.at(1).get<int>();
    if (e.contains("slot")) g.slot = e.at("slot").get<int>();
    if (e.contains("angle")) g.angle = e.at("angle").get<double>();
    if (e.contains("tag")) g.tag = e.at("tag").get<std::string>();
    c.gates.push_back(std::move(g));
  }
  validate(c);
  return c;
}

}  // namespace vqda
