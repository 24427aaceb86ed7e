#include "vqda/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vqda/data.hpp"
#include "vqda/gates.hpp"
#include "vqda/rng.hpp"
#include "vqda/training.hpp"

namespace vqda {

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

StateVector random_state(int n, SplitMix64& rng) {
  StateVector s(n);
  for (uint64_t i = 0; i < s.dim(); ++i)
    s.amp(i) = cplx(rng.gaussian(), rng.gaussian());
  s.renormalize();
  return s;
}

ParamCircuit random_circuit(int n, int depth, int max_params, SplitMix64& rng) {
  ParamCircuit c;
  c.n_qubits = n;
  int next_slot = 0;
  auto fresh_or_shared = [&]() {
    bool reuse = next_slot > 0 && (next_slot >= max_params || rng.uniform() < 0.3);
    if (reuse) return (int)rng.bounded((uint64_t)next_slot);
    return next_slot++;
  };
  for (int d = 0; d < depth; ++d) {
    double roll = rng.uniform();
    int q = (int)rng.bounded((uint64_t)n);
    int q2 = (int)rng.bounded((uint64_t)(n - 1));
    if (q2 >= q) ++q2;
    if (roll < 0.35) {
      GateKind kind = rng.uniform() < 0.5 ? GateKind::RY : GateKind::RZ;
      c.append({GateSpec{kind, q, -1, fresh_or_shared(), 0.0, "rand"}});
    } else if (roll < 0.45) {
      c.append({GateSpec{GateKind::X, q, -1, -1, 0.0, "rand"}});
    } else if (roll < 0.55) {
      c.append({GateSpec{GateKind::H, q, -1, -1, 0.0, "rand"}});
    } else if (roll < 0.75 || next_slot + 15 > max_params) {
      c.append({GateSpec{GateKind::CNOT, q, q2, -1, 0.0, "rand"}});
    } else if (roll < 0.9) {
      std::array<int, 15> slots{};
      for (int& s : slots) s = next_slot++;
      c.append(emit_universal_2q(slots, q, q2, "rand-u2"));
    } else {
      std::array<int, 9> slots{};
      for (int& s : slots) s = next_slot++;
      c.append(emit_pooler(slots, q, q2, rng.uniform() < 0.5 ? 0 : 1, "rand-pool"));
    }
  }
  if (next_slot == 0) {
    c.append({GateSpec{GateKind::RY, 0, -1, next_slot++, 0.0, "rand"}});
  }
  c.n_params = next_slot;
  validate(c);
  return c;
}

struct ObsSet {
  std::vector<Observable> obs;
  std::vector<double> weights;
};

ObsSet random_observables(int n, SplitMix64& rng) {
  ObsSet set;
  for (int q = 0; q < n; ++q) {
    if (rng.uniform() < 0.3) continue;
    set.obs.push_back(Observable{q, rng.uniform() < 0.5 ? Basis::Z : Basis::X});
    set.weights.push_back(rng.uniform(-2.0, 2.0));
  }
  if (set.obs.empty()) {
    set.obs.push_back(Observable{0, Basis::Z});
    set.weights.push_back(1.0);
  }
  return set;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckConfig& config) {
  GradCheckReport report;
  SplitMix64 root(config.seed);

  for (int k = 0; k < config.cases; ++k) {
    SplitMix64 rng = root.fork((uint64_t)k);
    int n = config.min_qubits +
            (int)rng.bounded((uint64_t)(config.max_qubits - config.min_qubits + 1));
    int depth = 5 + (int)rng.bounded((uint64_t)config.max_depth);
    ParamCircuit circuit = random_circuit(n, depth, config.max_params, rng);
    StateVector input = random_state(n, rng);
    ObsSet set = random_observables(n, rng);
    std::vector<double> params(circuit.n_params);
    for (double& p : params) p = rng.angle();

    GradRequest req;
    req.circuit = &circuit;
    req.params = params;
    req.input = &input;
    req.observables = set.obs;
    req.weights = set.weights;

    std::vector<double> g_shift = grad_param_shift(req);
    std::vector<double> g_adj = grad_adjoint(req);
    if (config.fault == FaultInjection::WrongSignAdjoint)
      for (double& g : g_adj) g = -g;
    std::vector<double> g_fd = grad_finite_diff(req, config.fd_step);

    double dev_sa = max_abs_diff(g_shift, g_adj);
    double dev_fd = std::max(max_abs_diff(g_shift, g_fd), max_abs_diff(g_adj, g_fd));
    report.max_dev_shift_vs_adjoint = std::max(report.max_dev_shift_vs_adjoint, dev_sa);
    report.max_dev_vs_fd = std::max(report.max_dev_vs_fd, dev_fd);
    ++report.circuit_cases;

    if (dev_sa > config.tol_shift_vs_adjoint) {
      std::ostringstream msg;
      msg << "case " << k << ": param-shift vs adjoint deviate by " << dev_sa << " ("
          << n << " qubits, " << circuit.gates.size() << " gates)";
      report.failures.push_back(msg.str());
    }
    if (dev_fd > config.tol_vs_fd) {
      std::ostringstream msg;
      msg << "case " << k << ": finite differences deviate by " << dev_fd << " (" << n
          << " qubits, " << circuit.gates.size() << " gates)";
      report.failures.push_back(msg.str());
    }
  }

  // End-to-end checks on a small model: per-head chain rule, then a whole
  // training-step gradient including the reversal combination.
  for (int k = 0; k < config.pipeline_cases; ++k) {
    SplitMix64 rng = root.fork(0x70000000ull + (uint64_t)k);
    ModelConfig mc;
    mc.n_qubits = 4;
    mc.n_stages = 1;
    mc.qfc1_layers = 1 + (int)rng.bounded(2);
    mc.qfc2_layers = 1 + (int)rng.bounded(2);
    VqdaModel model = build_model(mc);
    std::vector<double> params((size_t)model.n_params());
    for (double& p : params) p = rng.angle();

    StateVector input = random_state(4, rng);
    for (HeadSel sel : {HeadSel::Qfc1, HeadSel::Qfc2}) {
      const QfcHead& head = sel == HeadSel::Qfc1 ? model.qfc1 : model.qfc2;
      int label = (int)rng.bounded((uint64_t)head.measured.size());

      auto loss_at = [&](std::span<const double> theta) {
        std::span<const double> cp = model.cp_params(theta);
        std::span<const double> hp = sel == HeadSel::Qfc1 ? model.qfc1_params(theta)
                                                          : model.qfc2_params(theta);
        std::vector<double> f = extract_features(model, cp, input);
        std::vector<double> e = head_forward(head, hp, f, model.reencoding);
        return cross_entropy_from_expectations(e, label).loss;
      };

      std::span<const double> cp = model.cp_params(params);
      std::span<const double> hp = sel == HeadSel::Qfc1 ? model.qfc1_params(params)
                                                        : model.qfc2_params(params);
      std::vector<double> f = extract_features(model, cp, input);
      std::vector<double> e = head_forward(head, hp, f, model.reencoding);
      SoftmaxLoss loss = cross_entropy_from_expectations(e, label);
      FeatureGrad fg = grad_through_features(model, params, input, sel, loss.grad,
                                             GradEngine::Adjoint);
      if (config.fault == FaultInjection::WrongSignAdjoint)
        for (double& g : fg.cp) g = -g;

      ParamPartition part = model.partition();
      std::vector<double> analytic(params.size(), 0.0);
      for (int i = 0; i < part.cp_count; ++i) analytic[i] = fg.cp[i];
      int head_base = sel == HeadSel::Qfc1 ? part.cp_count : part.cp_count + part.qfc1_count;
      for (size_t i = 0; i < fg.head.size(); ++i) analytic[head_base + i] = fg.head[i];

      std::vector<double> theta = params;
      double dev = 0.0;
      for (size_t i = 0; i < theta.size(); ++i) {
        double orig = theta[i];
        theta[i] = orig + config.fd_step;
        double plus = loss_at(theta);
        theta[i] = orig - config.fd_step;
        double minus = loss_at(theta);
        theta[i] = orig;
        dev = std::max(dev, std::abs((plus - minus) / (2.0 * config.fd_step) - analytic[i]));
      }
      report.max_dev_pipeline = std::max(report.max_dev_pipeline, dev);
      if (dev > config.tol_pipeline) {
        std::ostringstream msg;
        msg << "pipeline case " << k << " (" << (sel == HeadSel::Qfc1 ? "qfc1" : "qfc2")
            << "): chain rule vs finite differences deviate by " << dev;
        report.failures.push_back(msg.str());
      }
    }

    // Whole training step: finite-difference the monitoring objective and
    // compare against the combined descent directions (QFC2's sign flips,
    // that is the reversal).
    {
      SyntheticDomainSpec spec;
      spec.n_qubits = 4;
      spec.n_source_train = 3;
      spec.n_source_test = 1;
      spec.n_target_train = 3;
      spec.n_target_test = 1;
      spec.seed = rng.next_u64();
      SyntheticData data = gen_synthetic(spec);
      double lambda = 0.7;

      std::vector<StateVector> bs, bt;
      for (const auto& s : data.source_train.samples) bs.push_back(exact_encode(s));
      for (const auto& s : data.target_train.samples) bt.push_back(exact_encode(s));
      StepGrads grads = compute_step_gradients(model, params, bs, data.source_train.labels,
                                               bt, lambda, GradEngine::Adjoint, 1);
      if (config.fault == FaultInjection::WrongSignAdjoint)
        for (double& g : grads.cp) g = -g;
      ParamPartition part = model.partition();
      std::vector<double> analytic(params.size(), 0.0);
      for (int i = 0; i < part.cp_count; ++i) analytic[i] = grads.cp[i];
      for (int i = 0; i < part.qfc1_count; ++i) analytic[part.cp_count + i] = grads.qfc1[i];
      for (int i = 0; i < part.qfc2_count; ++i)
        analytic[part.cp_count + part.qfc1_count + i] = -grads.qfc2[i];

      std::vector<double> theta = params;
      double dev = 0.0;
      for (size_t i = 0; i < theta.size(); ++i) {
        double orig = theta[i];
        theta[i] = orig + config.fd_step;
        double plus = vqda_objective(data.source_train, data.target_train, model, theta, lambda);
        theta[i] = orig - config.fd_step;
        double minus = vqda_objective(data.source_train, data.target_train, model, theta, lambda);
        theta[i] = orig;
        dev = std::max(dev, std::abs((plus - minus) / (2.0 * config.fd_step) - analytic[i]));
      }
      report.max_dev_pipeline = std::max(report.max_dev_pipeline, dev);
      if (dev > config.tol_pipeline) {
        std::ostringstream msg;
        msg << "pipeline case " << k
            << " (training step): objective gradient vs finite differences deviate by "
            << dev;
        report.failures.push_back(msg.str());
      }
    }
    ++report.pipeline_cases;
  }

  report.pass = report.failures.empty();
  return report;
}

}  // namespace vqda
