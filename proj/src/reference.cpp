#include "vqda/reference.hpp"

#include <stdexcept>

namespace vqda {

namespace {
std::uint64_t qmask(int n, int q) { return std::uint64_t{1} << (n - 1 - q); }
}  // namespace

Eigen::MatrixXcd embed_1q(int n_qubits, const Mat2& u, int q) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::uint64_t m = qmask(n_qubits, q);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    const int cb = (col & m) ? 1 : 0;
    for (int rb = 0; rb < 2; ++rb) {
      const std::size_t row = rb ? (col | m) : (col & ~m);
      full(row, col) += u(rb, cb);
    }
  }
  return full;
}

Eigen::MatrixXcd embed_2q(int n_qubits, const Mat4& u, int q_hi, int q_lo) {
  if (q_hi == q_lo) throw std::invalid_argument("embed_2q: equal qubits");
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::uint64_t mh = qmask(n_qubits, q_hi);
  const std::uint64_t ml = qmask(n_qubits, q_lo);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    const int cb = ((col & mh) ? 2 : 0) | ((col & ml) ? 1 : 0);
    for (int rb = 0; rb < 4; ++rb) {
      std::size_t row = col & ~(mh | ml);
      if (rb & 2) row |= mh;
      if (rb & 1) row |= ml;
      full(row, col) += u(rb, cb);
    }
  }
  return full;
}

Eigen::MatrixXcd circuit_unitary(const ParamCircuit& circuit,
                                 std::span<const double> params) {
  const std::size_t dim = std::size_t{1} << circuit.n_qubits;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Identity(dim, dim);
  for (const GateSpec& g : circuit.gates) {
    Eigen::MatrixXcd step;
    if (g.kind == GateKind::CNOT) {
      Mat4 cnot = Mat4::Identity();
      cnot(2, 2) = cnot(3, 3) = 0.0;
      cnot(2, 3) = cnot(3, 2) = 1.0;
      step = embed_2q(circuit.n_qubits, cnot, g.q0, g.q1);
    } else {
      step = embed_1q(circuit.n_qubits,
                      matrix_1q(g.kind, gate_angle(g, params)), g.q0);
    }
    full = step * full;
  }
  return full;
}

Eigen::VectorXcd to_eigen(const StateVector& s) {
  Eigen::VectorXcd v(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) v(i) = s.amp(i);
  return v;
}

StateVector from_eigen(int n_qubits, const Eigen::VectorXcd& v) {
  StateVector s(n_qubits);
  if (static_cast<std::size_t>(v.size()) != s.dim()) {
    throw std::invalid_argument("from_eigen: dimension mismatch");
  }
  for (std::size_t i = 0; i < s.dim(); ++i) s.amp(i) = v(i);
  return s;
}

}  // namespace vqda
