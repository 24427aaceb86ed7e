#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace vqda {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

// Runtime switch for expensive argument validation (unitarity of applied
// matrices). Defaults to on in debug builds, off in release.
bool verification_mode();
void set_verification_mode(bool on);

// Dense statevector of an n-qubit register.
//
// Qubit ordering convention, fixed project-wide:
//   qubit 0 is the leftmost tensor factor, so basis index bit (n-1-q)
//   addresses qubit q. Example (n = 2): |10> means qubit 0 = 1, qubit 1 = 0
//   and lives at amplitude index 0b10 = 2. Bitstrings print with qubit 0
//   leftmost (most significant).
//
// Gates mutate the amplitude buffer in place with stride-based kernels; no
// 2^n x 2^n matrix is ever materialized here (see reference.hpp for the slow
// cross-check path).
class StateVector {
 public:
  // |0...0> on n qubits.
  explicit StateVector(int n_qubits);

  // Computational basis state |basis_index>.
  static StateVector basis(int n_qubits, std::uint64_t basis_index);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amps_.size(); }

  cplx& amp(std::size_t i) { return amps_[i]; }
  const cplx& amp(std::size_t i) const { return amps_[i]; }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }

  // Bit mask selecting qubit q inside a basis index.
  std::uint64_t mask(int q) const {
    return std::uint64_t{1} << (n_qubits_ - 1 - q);
  }

  // Apply a 2x2 matrix to qubit q. u need not be unitary (the gradient
  // engines push generators through this kernel); unitarity is checked only
  // in verification mode.
  void apply_1q(const Mat2& u, int q);

  // Apply a 4x4 matrix to the ordered pair (q_hi, q_lo): q_hi supplies the
  // high bit of the 2-bit gate index, q_lo the low bit.
  void apply_2q(const Mat4& u, int q_hi, int q_lo);

  // Fast paths for the common structured gates.
  void apply_x(int q);
  void apply_h(int q);
  void apply_ry(double theta, int q);
  void apply_rz(double theta, int q);
  void apply_cnot(int control, int target);

  // <Z_q> = P(bit q = 0) - P(bit q = 1). Deterministic, no sampling.
  double expect_z(int q) const;

  // <X_q>, equal to expect_z after an H on q.
  double expect_x(int q) const;

  // Marginal outcome distribution over the listed qubits; the first listed
  // qubit is the most significant bit of the result index.
  std::vector<double> probabilities_on(std::span<const int> qs) const;

  double norm() const;
  void renormalize();

  // <this|other>.
  cplx inner(const StateVector& other) const;

  // |<this|other>|^2.
  double fidelity(const StateVector& other) const;

  bool operator==(const StateVector&) const = default;

 private:
  void check_qubit(int q) const;

  int n_qubits_;
  std::vector<cplx> amps_;
};

// Functional aliases matching the operation names used throughout the docs.
StateVector new_basis_state(int n_qubits, std::uint64_t basis_index);
StateVector apply_1q(const StateVector& s, const Mat2& u, int q);
StateVector apply_2q(const StateVector& s, const Mat4& u, int q_hi, int q_lo);
double expect_z(const StateVector& s, int q);
double expect_x(const StateVector& s, int q);
std::vector<double> probabilities_on(const StateVector& s,
                                     std::span<const int> qs);

}  // namespace vqda
