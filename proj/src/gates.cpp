#include "vqda/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace vqda {

const char* gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::X: return "X";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
  }
  throw std::logic_error("unreachable gate kind");
}

GateKind gate_kind_from_name(const std::string& name) {
  if (name == "RY") return GateKind::RY;
  if (name == "RZ") return GateKind::RZ;
  if (name == "X") return GateKind::X;
  if (name == "H") return GateKind::H;
  if (name == "CNOT") return GateKind::CNOT;
  throw std::invalid_argument("unknown gate kind: " + name);
}

Mat2 ry_matrix(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

Mat2 rz_matrix(double theta) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::polar(1.0, -theta / 2.0);
  m(1, 1) = std::polar(1.0, theta / 2.0);
  return m;
}

Mat2 x_matrix() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}

Mat2 h_matrix() {
  const double r = 1.0 / std::sqrt(2.0);
  Mat2 m;
  m << r, r, r, -r;
  return m;
}

Mat2 matrix_1q(GateKind kind, double angle) {
  switch (kind) {
    case GateKind::RY: return ry_matrix(angle);
    case GateKind::RZ: return rz_matrix(angle);
    case GateKind::X: return x_matrix();
    case GateKind::H: return h_matrix();
    case GateKind::CNOT: break;
  }
  throw std::invalid_argument("matrix_1q: not a single-qubit kind");
}

Mat2 Universal1Q::matrix() const {
  return rz_matrix(alpha) * ry_matrix(beta) * rz_matrix(gamma);
}

Universal2Q Universal2Q::from_array(std::span<const double> angles15) {
  if (angles15.size() != kNumAngles) {
    throw std::invalid_argument("Universal2Q needs exactly 15 angles");
  }
  Universal2Q u;
  u.c = {angles15[0], angles15[1], angles15[2]};
  u.d = {angles15[3], angles15[4], angles15[5]};
  u.mid_ry = angles15[6];
  u.mid_rz = angles15[7];
  u.mid_ry2 = angles15[8];
  u.a = {angles15[9], angles15[10], angles15[11]};
  u.b = {angles15[12], angles15[13], angles15[14]};
  return u;
}

std::array<double, Universal2Q::kNumAngles> Universal2Q::to_array() const {
  return {c.alpha, c.beta,  c.gamma, d.alpha, d.beta,   d.gamma, mid_ry,
          mid_rz,  mid_ry2, a.alpha, a.beta,  a.gamma,  b.alpha, b.beta,
          b.gamma};
}

namespace {

GateSpec rot(GateKind kind, int q, double angle, const std::string& tag) {
  GateSpec g;
  g.kind = kind;
  g.q0 = q;
  g.angle = angle;
  g.tag = tag;
  return g;
}

GateSpec rot_slot(GateKind kind, int q, int slot, const std::string& tag) {
  GateSpec g;
  g.kind = kind;
  g.q0 = q;
  g.slot = slot;
  g.tag = tag;
  return g;
}

GateSpec cnot(int control, int target, const std::string& tag) {
  GateSpec g;
  g.kind = GateKind::CNOT;
  g.q0 = control;
  g.q1 = target;
  g.tag = tag;
  return g;
}

GateSpec pauli_x(int q, const std::string& tag) {
  GateSpec g;
  g.kind = GateKind::X;
  g.q0 = q;
  g.tag = tag;
  return g;
}

// R_Z(alpha) R_Y(beta) R_Z(gamma) in circuit time order: gamma acts first.
void push_u1q_fixed(std::vector<GateSpec>& out, const Universal1Q& u, int q,
                    const std::string& tag) {
  out.push_back(rot(GateKind::RZ, q, u.gamma, tag));
  out.push_back(rot(GateKind::RY, q, u.beta, tag));
  out.push_back(rot(GateKind::RZ, q, u.alpha, tag));
}

// Slot triple (alpha, beta, gamma); emission order is still gamma first.
void push_u1q_slots(std::vector<GateSpec>& out, std::span<const int> s3, int q,
                    const std::string& tag) {
  out.push_back(rot_slot(GateKind::RZ, q, s3[2], tag));
  out.push_back(rot_slot(GateKind::RY, q, s3[1], tag));
  out.push_back(rot_slot(GateKind::RZ, q, s3[0], tag));
}

void check_pair(int q_a, int q_b) {
  if (q_a == q_b) {
    throw std::invalid_argument("two-qubit construction needs distinct qubits");
  }
}

}  // namespace

std::vector<GateSpec> compile_universal_2q(const Universal2Q& u2, int q_a,
                                           int q_b, const std::string& tag) {
  check_pair(q_a, q_b);
  std::vector<GateSpec> out;
  out.reserve(18);
  push_u1q_fixed(out, u2.c, q_a, tag);
  push_u1q_fixed(out, u2.d, q_b, tag);
  out.push_back(cnot(q_a, q_b, tag));
  out.push_back(rot(GateKind::RY, q_b, u2.mid_ry, tag));
  out.push_back(cnot(q_b, q_a, tag));
  out.push_back(rot(GateKind::RZ, q_a, u2.mid_rz, tag));
  out.push_back(rot(GateKind::RY, q_b, u2.mid_ry2, tag));
  out.push_back(cnot(q_a, q_b, tag));
  push_u1q_fixed(out, u2.a, q_a, tag);
  push_u1q_fixed(out, u2.b, q_b, tag);
  return out;
}

std::vector<GateSpec> emit_universal_2q(std::span<const int> slots15, int q_a,
                                        int q_b, const std::string& tag) {
  check_pair(q_a, q_b);
  if (slots15.size() != Universal2Q::kNumAngles) {
    throw std::invalid_argument("emit_universal_2q needs 15 slots");
  }
  std::vector<GateSpec> out;
  out.reserve(18);
  push_u1q_slots(out, slots15.subspan(0, 3), q_a, tag);
  push_u1q_slots(out, slots15.subspan(3, 3), q_b, tag);
  out.push_back(cnot(q_a, q_b, tag));
  out.push_back(rot_slot(GateKind::RY, q_b, slots15[6], tag));
  out.push_back(cnot(q_b, q_a, tag));
  out.push_back(rot_slot(GateKind::RZ, q_a, slots15[7], tag));
  out.push_back(rot_slot(GateKind::RY, q_b, slots15[8], tag));
  out.push_back(cnot(q_a, q_b, tag));
  push_u1q_slots(out, slots15.subspan(9, 3), q_a, tag);
  push_u1q_slots(out, slots15.subspan(12, 3), q_b, tag);
  return out;
}

namespace {

struct AbcBlocks {
  Universal1Q a, b, c;
};

AbcBlocks abc_decompose(const Universal1Q& v) {
  AbcBlocks d;
  d.a = {v.alpha, v.beta / 2.0, 0.0};
  d.b = {0.0, -v.beta / 2.0, -(v.alpha + v.gamma) / 2.0};
  d.c = {(v.gamma - v.alpha) / 2.0, 0.0, 0.0};
  return d;
}

void check_control_state(int control_state) {
  if (control_state != 0 && control_state != 1) {
    throw std::invalid_argument("control_state must be 0 or 1");
  }
}

}  // namespace

std::vector<GateSpec> compile_controlled_1q(const Universal1Q& v, int control,
                                            int target, int control_state,
                                            const std::string& tag) {
  check_pair(control, target);
  check_control_state(control_state);
  const AbcBlocks blocks = abc_decompose(v);
  std::vector<GateSpec> out;
  out.reserve(13);
  if (control_state == 0) out.push_back(pauli_x(control, tag));
  push_u1q_fixed(out, blocks.c, target, tag);
  out.push_back(cnot(control, target, tag));
  push_u1q_fixed(out, blocks.b, target, tag);
  out.push_back(cnot(control, target, tag));
  push_u1q_fixed(out, blocks.a, target, tag);
  if (control_state == 0) out.push_back(pauli_x(control, tag));
  return out;
}

std::vector<GateSpec> emit_pooler(std::span<const int> slots9, int control,
                                  int target, int control_state,
                                  const std::string& tag) {
  check_pair(control, target);
  check_control_state(control_state);
  if (slots9.size() != 9) {
    throw std::invalid_argument("emit_pooler needs 9 slots");
  }
  std::vector<GateSpec> out;
  out.reserve(13);
  if (control_state == 0) out.push_back(pauli_x(control, tag));
  push_u1q_slots(out, slots9.subspan(0, 3), target, tag);
  out.push_back(cnot(control, target, tag));
  push_u1q_slots(out, slots9.subspan(3, 3), target, tag);
  out.push_back(cnot(control, target, tag));
  push_u1q_slots(out, slots9.subspan(6, 3), target, tag);
  if (control_state == 0) out.push_back(pauli_x(control, tag));
  return out;
}

Mat4 controlled_1q_matrix(const Mat2& v, int control_state) {
  check_control_state(control_state);
  Mat4 m = Mat4::Identity();
  const int off = control_state == 1 ? 2 : 0;
  m.block<2, 2>(off, off) = v;
  return m;
}

PhaseEquivalence equivalence_up_to_phase(const Eigen::MatrixXcd& m1,
                                         const Eigen::MatrixXcd& m2,
                                         double tol) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
    throw std::invalid_argument("equivalence_up_to_phase: shape mismatch");
  }
  Eigen::Index ri = 0, ci = 0;
  const double peak = m2.cwiseAbs().maxCoeff(&ri, &ci);
  if (peak == 0.0 || m1.cwiseAbs().maxCoeff() == 0.0) {
    throw std::domain_error("equivalence_up_to_phase: all-zero matrix");
  }
  const cplx ratio = m1(ri, ci) / m2(ri, ci);
  const cplx phase = std::polar(1.0, std::arg(ratio));
  PhaseEquivalence result;
  result.max_deviation = (m1 - phase * m2).cwiseAbs().maxCoeff();
  result.equivalent = result.max_deviation < tol;
  return result;
}

}  // namespace vqda
