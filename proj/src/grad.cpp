#include "vqda/grad.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vqda/gates.hpp"

namespace vqda {

void validate(const GradRequest& req) {
  if (req.circuit == nullptr || req.input == nullptr)
    throw std::invalid_argument("gradient request missing circuit or input state");
  validate(*req.circuit);
  if ((int)req.params.size() != req.circuit->n_params)
    throw std::invalid_argument("gradient request has " + std::to_string(req.params.size()) +
                                " parameters, circuit expects " +
                                std::to_string(req.circuit->n_params));
  if (req.input->n_qubits() != req.circuit->n_qubits)
    throw std::invalid_argument("input state width does not match circuit");
  if (req.observables.empty())
    throw std::invalid_argument("gradient request has no observables");
  if (req.weights.size() != req.observables.size())
    throw std::invalid_argument("gradient request has " + std::to_string(req.weights.size()) +
                                " weights for " + std::to_string(req.observables.size()) +
                                " observables");
  for (const Observable& o : req.observables)
    if (o.qubit < 0 || o.qubit >= req.circuit->n_qubits)
      throw std::invalid_argument("observable qubit " + std::to_string(o.qubit) +
                                  " out of range");
}

namespace {

double weighted_expectation(const StateVector& s, const GradRequest& req) {
  double total = 0.0;
  for (size_t j = 0; j < req.observables.size(); ++j)
    total += req.weights[j] * expectation(s, req.observables[j].qubit,
                                          req.observables[j].basis);
  return total;
}

// |out> = P|in> for a single-qubit Pauli; used to assemble O|psi>.
void apply_pauli_into(const StateVector& in, int q, Basis basis, StateVector& out) {
  uint64_t m = in.mask(q);
  uint64_t dim = in.dim();
  const cplx* a = in.amplitudes().data();
  cplx* b = out.amplitudes().data();
  if (basis == Basis::Z) {
    for (uint64_t i = 0; i < dim; ++i) b[i] = (i & m) ? -a[i] : a[i];
  } else {
    for (uint64_t i = 0; i < dim; ++i) b[i] = a[i ^ m];
  }
}

// <bra| M_q |ket> for a one-qubit matrix embedded on qubit q.
cplx sandwich_1q(const StateVector& bra, const Mat2& m, int q, const StateVector& ket) {
  uint64_t mask = ket.mask(q);
  uint64_t dim = ket.dim();
  const cplx* b = bra.amplitudes().data();
  const cplx* k = ket.amplitudes().data();
  cplx total = 0.0;
  for (uint64_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    uint64_t j = i | mask;
    total += std::conj(b[i]) * (m(0, 0) * k[i] + m(0, 1) * k[j]);
    total += std::conj(b[j]) * (m(1, 0) * k[i] + m(1, 1) * k[j]);
  }
  return total;
}

void unapply_gate(StateVector& s, const GateSpec& g, double angle) {
  switch (g.kind) {
    case GateKind::RY: s.apply_ry(-angle, g.q0); break;
    case GateKind::RZ: s.apply_rz(-angle, g.q0); break;
    case GateKind::X: s.apply_x(g.q0); break;
    case GateKind::H: s.apply_h(g.q0); break;
    case GateKind::CNOT: s.apply_cnot(g.q0, g.q1); break;
  }
}

}  // namespace

double objective_value(const GradRequest& req) {
  validate(req);
  StateVector s = *req.input;
  apply_circuit(*req.circuit, req.params, s);
  return weighted_expectation(s, req);
}

std::vector<double> grad_param_shift(const GradRequest& req) {
  validate(req);
  std::vector<double> grad(req.circuit->n_params, 0.0);
  const double shift = std::numbers::pi / 2.0;
  for (size_t k = 0; k < req.circuit->gates.size(); ++k) {
    const GateSpec& g = req.circuit->gates[k];
    if (!g.is_rotation() || g.slot < 0) continue;
    StateVector plus = *req.input;
    apply_circuit(*req.circuit, req.params, plus, (int)k, shift);
    StateVector minus = *req.input;
    apply_circuit(*req.circuit, req.params, minus, (int)k, -shift);
    grad[g.slot] += (weighted_expectation(plus, req) - weighted_expectation(minus, req)) / 2.0;
  }
  return grad;
}

std::vector<double> grad_adjoint(const GradRequest& req) {
  validate(req);
  StateVector ket = *req.input;
  apply_circuit(*req.circuit, req.params, ket);

  // bra = O |psi> accumulated over the weighted observable terms.
  StateVector bra(ket.n_qubits());
  StateVector term(ket.n_qubits());
  std::fill(bra.amplitudes().begin(), bra.amplitudes().end(), cplx(0.0));
  for (size_t j = 0; j < req.observables.size(); ++j) {
    apply_pauli_into(ket, req.observables[j].qubit, req.observables[j].basis, term);
    double w = req.weights[j];
    for (std::size_t i = 0; i < bra.dim(); ++i) bra.amp(i) += w * term.amp(i);
  }

  // Generators: R_Y = exp(-i theta Y/2), R_Z = exp(-i theta Z/2), so
  // dU/dtheta U^dag = -i G with G = Y/2 or Z/2.
  Mat2 dy, dz;
  dy << cplx(0.0), cplx(-0.5), cplx(0.5), cplx(0.0);          // -i Y / 2
  dz << cplx(0.0, -0.5), cplx(0.0), cplx(0.0), cplx(0.0, 0.5);  // -i Z / 2

  std::vector<double> grad(req.circuit->n_params, 0.0);
  for (int k = (int)req.circuit->gates.size() - 1; k >= 0; --k) {
    const GateSpec& g = req.circuit->gates[k];
    if (g.is_rotation() && g.slot >= 0) {
      const Mat2& d = g.kind == GateKind::RY ? dy : dz;
      grad[g.slot] += 2.0 * std::real(sandwich_1q(bra, d, g.q0, ket));
    }
    double angle = gate_angle(g, req.params);
    unapply_gate(ket, g, angle);
    unapply_gate(bra, g, angle);
  }
  return grad;
}

std::vector<double> grad_finite_diff(const GradRequest& req, double step) {
  validate(req);
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  std::vector<double> params(req.params.begin(), req.params.end());
  GradRequest local = req;
  local.params = params;
  std::vector<double> grad(req.circuit->n_params, 0.0);
  for (int s = 0; s < req.circuit->n_params; ++s) {
    double orig = params[s];
    params[s] = orig + step;
    double plus = objective_value(local);
    params[s] = orig - step;
    double minus = objective_value(local);
    params[s] = orig;
    grad[s] = (plus - minus) / (2.0 * step);
  }
  return grad;
}

const char* grad_engine_name(GradEngine engine) {
  return engine == GradEngine::ParamShift ? "param-shift" : "adjoint";
}

std::vector<double> gradient(const GradRequest& req, GradEngine engine) {
  return engine == GradEngine::ParamShift ? grad_param_shift(req) : grad_adjoint(req);
}

HeadPathGrad head_backward(const QfcHead& head,
                           std::span<const double> head_params,
                           std::span<const double> features,
                           std::span<const double> loss_grad,
                           const FeatureReencoding& map,
                           GradEngine engine) {
  if (loss_grad.size() != head.measured.size())
    throw std::invalid_argument("head backward got " + std::to_string(loss_grad.size()) +
                                " loss gradients for " + std::to_string(head.measured.size()) +
                                " measured qubits");
  HeadEval eval = head_eval_circuit(head, head_params, features, map);
  std::vector<Observable> obs;
  obs.reserve(head.measured.size());
  for (int q : head.measured) obs.push_back(Observable{q, head.readout});

  StateVector zero(head.n_feature_qubits);
  GradRequest req;
  req.circuit = &eval.circuit;
  req.params = eval.params;
  req.input = &zero;
  req.observables = obs;
  req.weights = loss_grad;
  std::vector<double> grad = gradient(req, engine);

  HeadPathGrad out;
  out.d_features.resize(eval.n_reencode);
  for (int q = 0; q < eval.n_reencode; ++q)
    out.d_features[q] = grad[q] * map.dangle_df(features[q]);
  out.d_head.assign(grad.begin() + eval.n_reencode, grad.end());
  return out;
}

std::vector<double> extractor_backward(const VqdaModel& model,
                                       std::span<const double> cp_params,
                                       const StateVector& input,
                                       std::span<const double> feature_weights,
                                       GradEngine engine) {
  if (feature_weights.size() != model.active_qubits.size())
    throw std::invalid_argument("extractor backward got " +
                                std::to_string(feature_weights.size()) + " weights for " +
                                std::to_string(model.active_qubits.size()) + " features");
  std::vector<Observable> obs;
  obs.reserve(model.active_qubits.size());
  for (int q : model.active_qubits) obs.push_back(Observable{q, Basis::Z});

  GradRequest req;
  req.circuit = &model.extractor;
  req.params = cp_params;
  req.input = &input;
  req.observables = obs;
  req.weights = feature_weights;
  return gradient(req, engine);
}

FeatureGrad grad_through_features(const VqdaModel& model,
                                  std::span<const double> full_params,
                                  const StateVector& input,
                                  HeadSel head_sel,
                                  std::span<const double> loss_grad_at_expectations,
                                  GradEngine engine) {
  const QfcHead& head = head_sel == HeadSel::Qfc1 ? model.qfc1 : model.qfc2;
  std::span<const double> cp = model.cp_params(full_params);
  std::span<const double> hp = head_sel == HeadSel::Qfc1 ? model.qfc1_params(full_params)
                                                         : model.qfc2_params(full_params);
  std::vector<double> features = extract_features(model, cp, input);
  HeadPathGrad hg = head_backward(head, hp, features, loss_grad_at_expectations,
                                  model.reencoding, engine);
  FeatureGrad out;
  out.cp = extractor_backward(model, cp, input, hg.d_features, engine);
  out.head = std::move(hg.d_head);
  return out;
}

}  // namespace vqda
