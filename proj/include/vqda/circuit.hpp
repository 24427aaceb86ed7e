#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vqda/gates.hpp"
#include "vqda/state.hpp"

namespace vqda {

// Ordered gate list with slot-indirected parameters. Parameters live outside
// the circuit so gradient engines can shift single slots without rebuilding;
// several gates citing one slot share that parameter.
struct ParamCircuit {
  int n_qubits = 0;
  int n_params = 0;
  std::vector<GateSpec> gates;

  void append(std::vector<GateSpec> more);
};

using ParamVector = std::vector<double>;

// Throws if any slot is out of range or unreferenced, or a gate touches a
// qubit outside the register.
void validate(const ParamCircuit& circuit);

// Resolved rotation angle of one gate (slot lookup or fixed angle).
double gate_angle(const GateSpec& gate, std::span<const double> params);

// Apply in place, gate list order. If shift_gate >= 0, that one gate
// occurrence sees its angle offset by shift_delta (parameter-shift hook).
void apply_circuit(const ParamCircuit& circuit, std::span<const double> params,
                   StateVector& state, int shift_gate = -1,
                   double shift_delta = 0.0);

// Functional execution; the input state is not modified.
StateVector run(const ParamCircuit& circuit, std::span<const double> params,
                const StateVector& input);

// Freeze slot-cited angles to their current values; the result has
// n_params = 0.
ParamCircuit bind_params(const ParamCircuit& circuit,
                         std::span<const double> params);

// Reversed gate order with negated rotation angles (X, H, CNOT are
// self-inverse). Requires a bound circuit; run(dagger(bind_params(c, p)),
// {}, run(c, p, s)) == s.
ParamCircuit dagger(const ParamCircuit& circuit);

// I.i.d. uniform angles in [0, 2*pi), deterministic per seed.
ParamVector init_params(const ParamCircuit& circuit, std::uint64_t seed);

struct BlockCounts {
  int rotations = 0;
  int cnots = 0;
  int others = 0;
  int params = 0;  // distinct slots cited by this block
};

struct CountReport {
  int rotations = 0;
  int cnots = 0;
  int others = 0;
  int n_params = 0;
  std::map<std::string, BlockCounts> blocks;
};

CountReport count_report(const ParamCircuit& circuit);

// JSON document (gates, slots, tags) for reproducibility and `describe`.
std::string circuit_to_json(const ParamCircuit& circuit);
ParamCircuit circuit_from_json(const std::string& text);

}  // namespace vqda
