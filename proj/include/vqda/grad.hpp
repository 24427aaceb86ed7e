#pragma once

#include <span>
#include <vector>

#include "vqda/ansatz.hpp"
#include "vqda/circuit.hpp"

namespace vqda {

// Weighted sum of single-qubit Pauli expectations,
//   E(theta) = sum_j w_j <psi(theta)| P_j |psi(theta)>,
// the common objective shape for every differentiable piece here: encoder
// losses, feature readouts, head readouts with loss gradients folded into
// the weights.
struct Observable {
  int qubit = 0;
  Basis basis = Basis::Z;
};

struct GradRequest {
  const ParamCircuit* circuit = nullptr;
  std::span<const double> params;
  const StateVector* input = nullptr;
  std::span<const Observable> observables;
  std::span<const double> weights;
};

void validate(const GradRequest& req);

double objective_value(const GradRequest& req);

// Exact rotation-gate rule: dE/dtheta = (E(+pi/2) - E(-pi/2)) / 2, shifting
// one gate occurrence at a time. A slot cited by several gates accumulates
// one contribution per occurrence. Cost: two circuit runs per occurrence.
std::vector<double> grad_param_shift(const GradRequest& req);

// Reverse sweep with a bra/ket pair: one forward run, then per gate (last to
// first) take 2 Re <bra| dU/dtheta U^dag |ket> and unapply the gate from
// both states. Cost: O(gates) state updates total.
std::vector<double> grad_adjoint(const GradRequest& req);

// Central differences, the independent cross-check. step defaults to 1e-4.
std::vector<double> grad_finite_diff(const GradRequest& req, double step = 1e-4);

enum class GradEngine { ParamShift, Adjoint };

const char* grad_engine_name(GradEngine engine);

std::vector<double> gradient(const GradRequest& req, GradEngine engine);

// Backward pass through one head evaluation. loss_grad holds dL/d<P_q> for
// the head's measured qubits; outputs are dL/df (per feature) and
// dL/dtheta_head.
struct HeadPathGrad {
  std::vector<double> d_features;
  std::vector<double> d_head;
};

HeadPathGrad head_backward(const QfcHead& head,
                           std::span<const double> head_params,
                           std::span<const double> features,
                           std::span<const double> loss_grad,
                           const FeatureReencoding& map,
                           GradEngine engine);

// dL/dtheta_cp for a weighted feature objective sum_j w_j f_j(theta_cp):
// the feature weights are dL/df from a head backward pass.
std::vector<double> extractor_backward(const VqdaModel& model,
                                       std::span<const double> cp_params,
                                       const StateVector& input,
                                       std::span<const double> feature_weights,
                                       GradEngine engine);

enum class HeadSel { Qfc1, Qfc2 };

// Chain rule over the full path input -> extractor -> re-encode -> head.
// loss_grad_at_expectations is dL/d<P> at the head readout; returns
// dL/dtheta_cp and dL/dtheta_head.
struct FeatureGrad {
  std::vector<double> cp;
  std::vector<double> head;
};

FeatureGrad grad_through_features(const VqdaModel& model,
                                  std::span<const double> full_params,
                                  const StateVector& input,
                                  HeadSel head_sel,
                                  std::span<const double> loss_grad_at_expectations,
                                  GradEngine engine = GradEngine::Adjoint);

}  // namespace vqda
