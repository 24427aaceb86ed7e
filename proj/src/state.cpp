#include "vqda/state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace vqda {

namespace {
#ifdef NDEBUG
bool g_verify = false;
#else
bool g_verify = true;
#endif

void check_unitary(const Eigen::MatrixXcd& u, double tol) {
  Eigen::MatrixXcd residual =
      u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  if (residual.cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("matrix is not unitary within " +
                                std::to_string(tol));
  }
}
}  // namespace

bool verification_mode() { return g_verify; }
void set_verification_mode(bool on) { g_verify = on; }

StateVector::StateVector(int n_qubits)
    : n_qubits_(n_qubits), amps_(std::size_t{1} << n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw std::invalid_argument("n_qubits must be in [1, 30]");
  }
  amps_[0] = 1.0;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t basis_index) {
  StateVector s(n_qubits);
  if (basis_index >= s.dim()) {
    throw std::invalid_argument("basis_index " + std::to_string(basis_index) +
                                " out of range for " +
                                std::to_string(n_qubits) + " qubits");
  }
  s.amps_[0] = 0.0;
  s.amps_[basis_index] = 1.0;
  return s;
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= n_qubits_) {
    throw std::invalid_argument("qubit index " + std::to_string(q) +
                                " out of range for " +
                                std::to_string(n_qubits_) + " qubits");
  }
}

void StateVector::apply_1q(const Mat2& u, int q) {
  check_qubit(q);
  if (g_verify) check_unitary(u, 1e-10);
  const std::uint64_t m = mask(q);
  const std::size_t n = amps_.size();
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & m) == 0) {
      const cplx a = amps_[i];
      const cplx b = amps_[i | m];
      amps_[i] = u00 * a + u01 * b;
      amps_[i | m] = u10 * a + u11 * b;
    }
  }
}

void StateVector::apply_2q(const Mat4& u, int q_hi, int q_lo) {
  check_qubit(q_hi);
  check_qubit(q_lo);
  if (q_hi == q_lo) {
    throw std::invalid_argument("apply_2q requires distinct qubits");
  }
  if (g_verify) check_unitary(u, 1e-10);
  const std::uint64_t mh = mask(q_hi);
  const std::uint64_t ml = mask(q_lo);
  const std::size_t n = amps_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((i & mh) == 0 && (i & ml) == 0) {
      const std::size_t i00 = i;
      const std::size_t i01 = i | ml;
      const std::size_t i10 = i | mh;
      const std::size_t i11 = i | mh | ml;
      const cplx a = amps_[i00], b = amps_[i01], c = amps_[i10],
                 d = amps_[i11];
      amps_[i00] = u(0, 0) * a + u(0, 1) * b + u(0, 2) * c + u(0, 3) * d;
      amps_[i01] = u(1, 0) * a + u(1, 1) * b + u(1, 2) * c + u(1, 3) * d;
      amps_[i10] = u(2, 0) * a + u(2, 1) * b + u(2, 2) * c + u(2, 3) * d;
      amps_[i11] = u(3, 0) * a + u(3, 1) * b + u(3, 2) * c + u(3, 3) * d;
    }
  }
}

void StateVector::apply_x(int q) {
  check_qubit(q);
  const std::uint64_t m = mask(q);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & m) == 0) std::swap(amps_[i], amps_[i | m]);
  }
}

void StateVector::apply_h(int q) {
  check_qubit(q);
  const std::uint64_t m = mask(q);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & m) == 0) {
      const cplx a = amps_[i];
      const cplx b = amps_[i | m];
      amps_[i] = inv_sqrt2 * (a + b);
      amps_[i | m] = inv_sqrt2 * (a - b);
    }
  }
}

void StateVector::apply_ry(double theta, int q) {
  check_qubit(q);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  const std::uint64_t m = mask(q);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & m) == 0) {
      const cplx a = amps_[i];
      const cplx b = amps_[i | m];
      amps_[i] = c * a - s * b;
      amps_[i | m] = s * a + c * b;
    }
  }
}

void StateVector::apply_rz(double theta, int q) {
  check_qubit(q);
  const cplx e0 = std::polar(1.0, -theta / 2.0);
  const cplx e1 = std::polar(1.0, theta / 2.0);
  const std::uint64_t m = mask(q);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    amps_[i] *= (i & m) ? e1 : e0;
  }
}

void StateVector::apply_cnot(int control, int target) {
  check_qubit(control);
  check_qubit(target);
  if (control == target) {
    throw std::invalid_argument("CNOT requires distinct qubits");
  }
  const std::uint64_t mc = mask(control);
  const std::uint64_t mt = mask(target);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & mc) && !(i & mt)) std::swap(amps_[i], amps_[i | mt]);
  }
}

double StateVector::expect_z(int q) const {
  check_qubit(q);
  const std::uint64_t m = mask(q);
  double e = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    const double p = std::norm(amps_[i]);
    e += (i & m) ? -p : p;
  }
  return e;
}

double StateVector::expect_x(int q) const {
  check_qubit(q);
  const std::uint64_t m = mask(q);
  double e = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & m) == 0) {
      e += 2.0 * std::real(std::conj(amps_[i]) * amps_[i | m]);
    }
  }
  return e;
}

std::vector<double> StateVector::probabilities_on(
    std::span<const int> qs) const {
  std::unordered_set<int> seen;
  for (int q : qs) {
    check_qubit(q);
    if (!seen.insert(q).second) {
      throw std::invalid_argument("duplicate qubit index in probabilities_on");
    }
  }
  const std::size_t k = qs.size();
  std::vector<double> out(std::size_t{1} << k, 0.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    std::size_t key = 0;
    for (std::size_t j = 0; j < k; ++j) {
      key = (key << 1) | ((i & mask(qs[j])) ? 1u : 0u);
    }
    out[key] += std::norm(amps_[i]);
  }
  return out;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const cplx& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

void StateVector::renormalize() {
  const double n = norm();
  if (n <= 0.0) throw std::domain_error("cannot normalize zero state");
  for (cplx& a : amps_) a /= n;
}

cplx StateVector::inner(const StateVector& other) const {
  if (n_qubits_ != other.n_qubits_) {
    throw std::invalid_argument("inner product requires equal qubit counts");
  }
  cplx r = 0.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    r += std::conj(amps_[i]) * other.amps_[i];
  }
  return r;
}

double StateVector::fidelity(const StateVector& other) const {
  return std::norm(inner(other));
}

StateVector new_basis_state(int n_qubits, std::uint64_t basis_index) {
  return StateVector::basis(n_qubits, basis_index);
}

StateVector apply_1q(const StateVector& s, const Mat2& u, int q) {
  StateVector out = s;
  out.apply_1q(u, q);
  return out;
}

StateVector apply_2q(const StateVector& s, const Mat4& u, int q_hi, int q_lo) {
  StateVector out = s;
  out.apply_2q(u, q_hi, q_lo);
  return out;
}

double expect_z(const StateVector& s, int q) { return s.expect_z(q); }
double expect_x(const StateVector& s, int q) { return s.expect_x(q); }

std::vector<double> probabilities_on(const StateVector& s,
                                     std::span<const int> qs) {
  return s.probabilities_on(qs);
}

}  // namespace vqda
