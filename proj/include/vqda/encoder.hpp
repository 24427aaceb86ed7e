#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vqda/circuit.hpp"
#include "vqda/grad.hpp"
#include "vqda/optim.hpp"

namespace vqda {

// A real vector destined for the amplitudes of an n-qubit state. Length must
// be a power of two and the vector must not be identically zero; the
// normalized copy is what the state carries.
struct AmplitudeTarget {
  std::vector<double> raw;
  std::vector<double> normalized;

  static AmplitudeTarget from_raw(std::vector<double> values);
  int n_qubits() const;
};

// Statevector whose amplitudes are the normalized target entries. This is
// the idealized encoding used throughout training; the trained encoder below
// approximates it with a shallow circuit.
StateVector exact_encode(const AmplitudeTarget& target);

struct EncoderConfig {
  int n_qubits = 4;
  int n_layers = 4;
};

// Hardware-efficient layers: a general single-qubit rotation
// R_Z R_Y R_Z on every wire followed by a CNOT ladder, repeated n_layers
// times, with one final rotation layer so the last entangler is dressed.
struct EncoderAnsatz {
  int n_qubits = 0;
  int n_layers = 0;
  ParamCircuit circuit;
};

EncoderAnsatz build_encoder_ansatz(const EncoderConfig& config);

// C(theta) = mean_q <Z_q> after running the ansatz on the target state.
// Minimum -1, reached exactly when U(theta)|x> = |1...1> up to phase.
double encoder_objective(const EncoderAnsatz& ansatz,
                         std::span<const double> params,
                         const StateVector& x_state);

struct EncoderTrainConfig {
  int steps = 350;
  double lr = 0.01;
  int restarts = 3;
  // Stop a restart once C <= -1 + tol. Infidelity is bounded by about
  // n_qubits * tol / 2, so 1e-4 keeps even per-basis-state checks above 0.999.
  double target_tol = 1e-4;
  GradEngine engine = GradEngine::Adjoint;
};

struct EncoderResult {
  std::vector<double> params;
  double final_objective = 0.0;
  double fidelity = 0.0;
  bool reached_target = false;
  int steps_used = 0;
  int restarts_used = 0;
};

// Minimize the objective with Adam; on success U(theta)|x> ~ |1...1>, so the
// inverse circuit on |1...1> prepares |x>. Restarts draw fresh initial
// angles from forked seeds and the best run wins.
EncoderResult train_encoder(const AmplitudeTarget& target,
                            const EncoderConfig& config,
                            const EncoderTrainConfig& train,
                            std::uint64_t seed);

// |x> ~ U(theta)^dag X^n |0...0>.
StateVector prepare_encoded(const EncoderAnsatz& ansatz, std::span<const double> params);

// |<target|prepared>|^2 against the exact encoding.
double encoded_fidelity(const AmplitudeTarget& target, const StateVector& prepared);

}  // namespace vqda
