#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "vqda/state.hpp"

namespace vqda {

enum class GateKind { RY, RZ, X, H, CNOT };

const char* gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string& name);

// One gate in a circuit. Rotation gates either cite a parameter slot
// (slot >= 0) or carry a fixed angle (slot < 0). For CNOT, q0 is the control
// and q1 the target; other kinds use q0 only.
struct GateSpec {
  GateKind kind = GateKind::X;
  int q0 = -1;
  int q1 = -1;
  int slot = -1;
  double angle = 0.0;
  std::string tag;

  bool is_rotation() const { return kind == GateKind::RY || kind == GateKind::RZ; }
  bool two_qubit() const { return kind == GateKind::CNOT; }
};

// Rotation conventions, fixed project-wide:
//   R_Y(t) = exp(-i t Y / 2),  R_Z(t) = exp(-i t Z / 2).
Mat2 ry_matrix(double theta);
Mat2 rz_matrix(double theta);
Mat2 x_matrix();
Mat2 h_matrix();
Mat2 matrix_1q(GateKind kind, double angle);

// General single-qubit unitary as R_Z(alpha) * R_Y(beta) * R_Z(gamma)
// (matrix product; gamma acts first in circuit time).
struct Universal1Q {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  Mat2 matrix() const;
};

// The 15-angle universal two-qubit block
//   U = (A x B) C_a^b (R_Z x R_Y) C_b^a (I x R_Y) C_a^b (C x D)
// where C_a^b is a CNOT controlled on the first qubit of the pair.
// Angle array layout: C(3), D(3), middle R_Y(1), R_Z/R_Y pair(2), A(3), B(3).
struct Universal2Q {
  Universal1Q c, d;
  double mid_ry = 0.0;   // inner I x R_Y, on the second qubit
  double mid_rz = 0.0;   // R_Z of the R_Z x R_Y pair, on the first qubit
  double mid_ry2 = 0.0;  // R_Y of the R_Z x R_Y pair, on the second qubit
  Universal1Q a, b;

  static constexpr int kNumAngles = 15;
  static Universal2Q from_array(std::span<const double> angles15);
  std::array<double, kNumAngles> to_array() const;
};

// Fixed-angle gate list realizing the block above on (q_a, q_b), rightmost
// factor first. Exactly 15 rotations and 3 CNOTs.
std::vector<GateSpec> compile_universal_2q(const Universal2Q& u2, int q_a,
                                           int q_b,
                                           const std::string& tag = {});

// Same topology with the 15 angles read from parameter slots (layout as in
// Universal2Q::to_array). Reusing one slot array across pairs shares
// parameters translationally.
std::vector<GateSpec> emit_universal_2q(std::span<const int> slots15, int q_a,
                                        int q_b, const std::string& tag = {});

// Controlled single-qubit unitary via the ABC decomposition
//   V = A X B X C with A B C = I,
//   A = R_Z(alpha) R_Y(beta/2),
//   B = R_Y(-beta/2) R_Z(-(alpha+gamma)/2),
//   C = R_Z((gamma-alpha)/2).
// R_Z R_Y R_Z payloads have determinant one, so the decomposition's phase
// angle is identically zero and no phase gate is emitted. control_state = 0
// conjugates the control with X gates. The compiled list contains 9 rotations
// and 2 CNOTs (plus the 2 X gates when control_state = 0).
std::vector<GateSpec> compile_controlled_1q(const Universal1Q& v, int control,
                                            int target, int control_state,
                                            const std::string& tag = {});

// Pooler topology with the 9 rotation angles free: slot layout is
// C(alpha, beta, gamma), B(...), A(...) in circuit time order.
std::vector<GateSpec> emit_pooler(std::span<const int> slots9, int control,
                                  int target, int control_state,
                                  const std::string& tag = {});

// Explicit block matrix diag(I, V) of a controlled-V on the ordered pair
// (control = high bit, target = low bit), with control_state selecting which
// block carries V.
Mat4 controlled_1q_matrix(const Mat2& v, int control_state);

struct PhaseEquivalence {
  bool equivalent = false;
  double max_deviation = 0.0;
};

// True iff m1 = e^{i phi} m2 for some phi, with deviation below tol. phi is
// fixed from the largest-magnitude entry of m2.
PhaseEquivalence equivalence_up_to_phase(const Eigen::MatrixXcd& m1,
                                         const Eigen::MatrixXcd& m2,
                                         double tol = 1e-9);

}  // namespace vqda
