#include "vqda/ansatz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vqda/gates.hpp"

namespace vqda {

const char* basis_name(Basis b) { return b == Basis::Z ? "Z" : "X"; }

Basis basis_from_name(const std::string& name) {
  if (name == "Z" || name == "z") return Basis::Z;
  if (name == "X" || name == "x") return Basis::X;
  throw std::invalid_argument("unknown measurement basis '" + name + "' (expected Z or X)");
}

double expectation(const StateVector& s, int q, Basis basis) {
  return basis == Basis::Z ? s.expect_z(q) : s.expect_x(q);
}

namespace {

std::vector<int> alloc_slots(int& next, int count) {
  std::vector<int> out(count);
  for (int i = 0; i < count; ++i) out[i] = next++;
  return out;
}

}  // namespace

ExtractorBuild build_extractor(const ExtractorConfig& config) {
  if (config.n_qubits < 2)
    throw std::domain_error("extractor needs at least 2 qubits, got " +
                            std::to_string(config.n_qubits));
  if (config.n_stages < 1)
    throw std::domain_error("extractor needs at least 1 stage, got " +
                            std::to_string(config.n_stages));
  if (config.pool_control_state != 0 && config.pool_control_state != 1)
    throw std::domain_error("pool_control_state must be 0 or 1");

  ExtractorBuild build;
  build.circuit.n_qubits = config.n_qubits;
  std::vector<int> active(config.n_qubits);
  for (int q = 0; q < config.n_qubits; ++q) active[q] = q;

  int next_slot = 0;
  for (int stage = 1; stage <= config.n_stages; ++stage) {
    if (active.size() < 2)
      throw std::domain_error("stage " + std::to_string(stage) +
                              " would pool below 1 active qubit");

    QclBlock qcl;
    qcl.layer_index = stage;
    qcl.shared = config.shared_qcl;
    std::string qcl_tag = "qcl" + std::to_string(stage);
    std::vector<int> shared_slots;
    if (config.shared_qcl) shared_slots = alloc_slots(next_slot, Universal2Q::kNumAngles);
    for (size_t i = 0; i + 1 < active.size(); ++i) {
      std::vector<int> slots = config.shared_qcl
                                   ? shared_slots
                                   : alloc_slots(next_slot, Universal2Q::kNumAngles);
      qcl.pairs.emplace_back(active[i], active[i + 1]);
      qcl.slots.push_back(slots);
      build.circuit.append(emit_universal_2q(slots, active[i], active[i + 1], qcl_tag));
    }
    build.qcls.push_back(std::move(qcl));

    QplBlock qpl;
    qpl.layer_index = stage;
    std::string qpl_tag = "qpl" + std::to_string(stage);
    std::vector<int> kept;
    size_t i = 0;
    for (; i + 1 < active.size(); i += 2) {
      Pooler p;
      p.control = active[i];
      p.target = active[i + 1];
      p.control_state = config.pool_control_state;
      p.slots = alloc_slots(next_slot, 9);
      build.circuit.append(
          emit_pooler(p.slots, p.control, p.target, p.control_state, qpl_tag));
      qpl.dropped.push_back(p.control);
      kept.push_back(p.target);
      qpl.poolers.push_back(std::move(p));
    }
    if (i < active.size()) kept.push_back(active[i]);  // odd leftover passes through
    build.qpls.push_back(std::move(qpl));
    active = std::move(kept);
  }

  build.circuit.n_params = next_slot;
  build.active_qubits = std::move(active);
  validate(build.circuit);
  return build;
}

QfcHead build_qfc_head(int n_feature_qubits, int n_layers, Basis readout,
                       int n_measured, const std::string& tag) {
  if (n_feature_qubits != 2 && n_feature_qubits != 3)
    throw std::domain_error("fully-connected head supports 2 or 3 qubits, got " +
                            std::to_string(n_feature_qubits));
  if (n_layers < 1)
    throw std::domain_error("fully-connected head needs at least 1 layer");
  if (n_measured < 1 || n_measured > n_feature_qubits)
    throw std::domain_error("head measures " + std::to_string(n_measured) +
                            " of " + std::to_string(n_feature_qubits) + " qubits");

  QfcHead head;
  head.n_feature_qubits = n_feature_qubits;
  head.n_layers = n_layers;
  head.readout = readout;
  for (int q = 0; q < n_measured; ++q) head.measured.push_back(q);

  ParamCircuit& c = head.circuit;
  c.n_qubits = n_feature_qubits;
  int next_slot = 0;
  for (int layer = 0; layer < n_layers; ++layer) {
    if (n_feature_qubits == 2) {
      // General single-qubit rotation on each wire, then entangle both ways.
      for (int q = 0; q < 2; ++q) {
        c.append({GateSpec{GateKind::RZ, q, -1, next_slot++, 0.0, tag}});
        c.append({GateSpec{GateKind::RY, q, -1, next_slot++, 0.0, tag}});
        c.append({GateSpec{GateKind::RZ, q, -1, next_slot++, 0.0, tag}});
      }
      c.append({GateSpec{GateKind::CNOT, 0, 1, -1, 0.0, tag}});
      c.append({GateSpec{GateKind::CNOT, 1, 0, -1, 0.0, tag}});
    } else {
      // Two rotations per wire keep the 6-rotation budget at width 3.
      for (int q = 0; q < 3; ++q) {
        c.append({GateSpec{GateKind::RY, q, -1, next_slot++, 0.0, tag}});
        c.append({GateSpec{GateKind::RZ, q, -1, next_slot++, 0.0, tag}});
      }
      c.append({GateSpec{GateKind::CNOT, 0, 1, -1, 0.0, tag}});
      c.append({GateSpec{GateKind::CNOT, 1, 2, -1, 0.0, tag}});
    }
  }
  c.n_params = next_slot;
  validate(c);
  return head;
}

double FeatureReencoding::angle(double f) const {
  return std::numbers::pi * (1.0 + f) / 2.0;
}

double FeatureReencoding::dangle_df(double) const { return std::numbers::pi / 2.0; }

std::vector<int> ParamPartition::cp_slots() const {
  std::vector<int> out(cp_count);
  for (int i = 0; i < cp_count; ++i) out[i] = i;
  return out;
}

std::vector<int> ParamPartition::qfc1_slots() const {
  std::vector<int> out(qfc1_count);
  for (int i = 0; i < qfc1_count; ++i) out[i] = cp_count + i;
  return out;
}

std::vector<int> ParamPartition::qfc2_slots() const {
  std::vector<int> out(qfc2_count);
  for (int i = 0; i < qfc2_count; ++i) out[i] = cp_count + qfc1_count + i;
  return out;
}

int VqdaModel::n_params() const { return partition().total(); }

ParamPartition VqdaModel::partition() const {
  ParamPartition p;
  p.cp_count = extractor.n_params;
  p.qfc1_count = qfc1.circuit.n_params;
  p.qfc2_count = qfc2.circuit.n_params;
  return p;
}

std::span<const double> VqdaModel::cp_params(std::span<const double> full) const {
  ParamPartition p = partition();
  if ((int)full.size() != p.total())
    throw std::invalid_argument("parameter vector has " + std::to_string(full.size()) +
                                " entries, model expects " + std::to_string(p.total()));
  return full.subspan(0, p.cp_count);
}

std::span<const double> VqdaModel::qfc1_params(std::span<const double> full) const {
  ParamPartition p = partition();
  if ((int)full.size() != p.total())
    throw std::invalid_argument("parameter vector has " + std::to_string(full.size()) +
                                " entries, model expects " + std::to_string(p.total()));
  return full.subspan(p.cp_count, p.qfc1_count);
}

std::span<const double> VqdaModel::qfc2_params(std::span<const double> full) const {
  ParamPartition p = partition();
  if ((int)full.size() != p.total())
    throw std::invalid_argument("parameter vector has " + std::to_string(full.size()) +
                                " entries, model expects " + std::to_string(p.total()));
  return full.subspan(p.cp_count + p.qfc1_count, p.qfc2_count);
}

VqdaModel build_model(const ModelConfig& config) {
  if (config.n_classes < 2)
    throw std::domain_error("model needs at least 2 classes");

  VqdaModel model;
  model.config = config;

  ExtractorConfig ec;
  ec.n_qubits = config.n_qubits;
  ec.n_stages = config.n_stages;
  ec.shared_qcl = config.shared_qcl;
  ec.pool_control_state = config.pool_control_state;
  ExtractorBuild build = build_extractor(ec);
  model.extractor = std::move(build.circuit);
  model.active_qubits = std::move(build.active_qubits);
  model.qcls = std::move(build.qcls);
  model.qpls = std::move(build.qpls);

  int k = (int)model.active_qubits.size();
  if (config.n_classes > (1 << k))
    throw std::domain_error(std::to_string(config.n_classes) + " classes exceed " +
                            std::to_string(k) + " feature qubits");
  int n_measured = config.n_classes <= k ? config.n_classes : k;
  model.qfc1 = build_qfc_head(k, config.qfc1_layers, config.qfc1_basis, n_measured, "qfc1");
  model.qfc2 = build_qfc_head(k, config.qfc2_layers, config.qfc2_basis, 2, "qfc2");
  return model;
}

ParamPartition param_partition(const VqdaModel& model) { return model.partition(); }

std::vector<double> extract_features(const VqdaModel& model,
                                     std::span<const double> cp_params,
                                     const StateVector& input) {
  if (input.n_qubits() != model.extractor.n_qubits)
    throw std::invalid_argument("input has " + std::to_string(input.n_qubits()) +
                                " qubits, extractor expects " +
                                std::to_string(model.extractor.n_qubits));
  StateVector s = input;
  apply_circuit(model.extractor, cp_params, s);
  std::vector<double> features;
  features.reserve(model.active_qubits.size());
  for (int q : model.active_qubits) features.push_back(s.expect_z(q));
  return features;
}

HeadEval head_eval_circuit(const QfcHead& head,
                           std::span<const double> head_params,
                           std::span<const double> features,
                           const FeatureReencoding& map) {
  if ((int)features.size() != head.n_feature_qubits)
    throw std::invalid_argument("head expects " + std::to_string(head.n_feature_qubits) +
                                " features, got " + std::to_string(features.size()));
  if ((int)head_params.size() != head.circuit.n_params)
    throw std::invalid_argument("head expects " + std::to_string(head.circuit.n_params) +
                                " parameters, got " + std::to_string(head_params.size()));
  for (double f : features)
    if (!(f >= -1.0 - 1e-9 && f <= 1.0 + 1e-9))
      throw std::domain_error("feature " + std::to_string(f) + " outside [-1, 1]");

  HeadEval eval;
  int k = head.n_feature_qubits;
  eval.n_reencode = k;
  eval.circuit.n_qubits = k;
  eval.circuit.n_params = k + head.circuit.n_params;
  eval.params.resize(eval.circuit.n_params);
  for (int q = 0; q < k; ++q) {
    eval.circuit.append({GateSpec{GateKind::RY, q, -1, q, 0.0, "reencode"}});
    eval.params[q] = map.angle(features[q]);
  }
  for (const GateSpec& g : head.circuit.gates) {
    GateSpec shifted = g;
    if (shifted.slot >= 0) shifted.slot += k;
    eval.circuit.append({shifted});
  }
  for (int i = 0; i < head.circuit.n_params; ++i) eval.params[k + i] = head_params[i];
  return eval;
}

std::vector<double> head_forward(const QfcHead& head,
                                 std::span<const double> head_params,
                                 std::span<const double> features,
                                 const FeatureReencoding& map) {
  HeadEval eval = head_eval_circuit(head, head_params, features, map);
  StateVector s = run(eval.circuit, eval.params, StateVector(head.n_feature_qubits));
  std::vector<double> out;
  out.reserve(head.measured.size());
  for (int q : head.measured) out.push_back(expectation(s, q, head.readout));
  return out;
}

int classify_binary(double p1, double p2) { return p1 >= p2 ? 0 : 1; }

int classify_mary(std::span<const double> p) {
  if (p.size() < 2)
    throw std::domain_error("classification needs at least 2 class scores, got " +
                            std::to_string(p.size()));
  int best = 0;
  for (int i = 1; i < (int)p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return best;
}

}  // namespace vqda
