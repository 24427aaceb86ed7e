#pragma once

#include <span>

#include "vqda/circuit.hpp"
#include "vqda/state.hpp"

namespace vqda {

// Slow reference path: explicit 2^n x 2^n matrices, used to cross-check the
// stride-based kernels. Keep n small (tests use n <= 6).

// Full-register embedding I x ... x u x ... x I of a 2x2 matrix on qubit q.
Eigen::MatrixXcd embed_1q(int n_qubits, const Mat2& u, int q);

// Embedding of a 4x4 matrix on the ordered pair (q_hi, q_lo).
Eigen::MatrixXcd embed_2q(int n_qubits, const Mat4& u, int q_hi, int q_lo);

// Product of all embedded gate matrices in circuit order.
Eigen::MatrixXcd circuit_unitary(const ParamCircuit& circuit,
                                 std::span<const double> params);

Eigen::VectorXcd to_eigen(const StateVector& s);
StateVector from_eigen(int n_qubits, const Eigen::VectorXcd& v);

}  // namespace vqda
