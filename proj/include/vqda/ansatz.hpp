#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqda/circuit.hpp"

namespace vqda {

enum class Basis { Z, X };

const char* basis_name(Basis b);
Basis basis_from_name(const std::string& name);

double expectation(const StateVector& s, int q, Basis basis);

// One convolution stage: the 15-angle universal block laid over adjacent
// active qubits (q0,q1), (q1,q2), ... When shared, every pair cites one
// 15-slot set.
struct QclBlock {
  int layer_index = 0;
  bool shared = false;
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::vector<int>> slots;  // one 15-slot set per pair (or one total)
};

// One pooler: measured (control) qubit conditions a trainable unitary on its
// kept neighbour, realized coherently via the deferred-measurement circuit.
struct Pooler {
  int control = -1;
  int target = -1;
  int control_state = 1;
  std::vector<int> slots;  // 9 free rotation slots, C/B/A blocks
};

struct QplBlock {
  int layer_index = 0;
  std::vector<Pooler> poolers;
  std::vector<int> dropped;
};

struct ExtractorConfig {
  int n_qubits = 4;
  int n_stages = 1;
  bool shared_qcl = false;
  int pool_control_state = 1;
};

struct ExtractorBuild {
  ParamCircuit circuit;
  std::vector<int> active_qubits;  // ascending
  std::vector<QclBlock> qcls;
  std::vector<QplBlock> qpls;
};

// Alternating QCL/QPL stages. Each pooling stage keeps ceil(active/2)
// qubits: adjacent actives are paired, the first of each pair is measured
// (control) and dropped, an odd trailing qubit passes through.
ExtractorBuild build_extractor(const ExtractorConfig& config);

// Shallow head layer per the fully-connected circuit figure: exactly 6
// rotations and 2 CNOTs per layer. Supported widths: 2 qubits (R_Z R_Y R_Z
// on each, CNOTs both ways) and 3 qubits (R_Y R_Z on each, CNOT ladder).
struct QfcHead {
  int n_feature_qubits = 0;
  int n_layers = 0;
  Basis readout = Basis::Z;
  std::vector<int> measured;  // qubits whose expectations become class scores
  ParamCircuit circuit;       // local slots [0, circuit.n_params)
};

QfcHead build_qfc_head(int n_feature_qubits, int n_layers, Basis readout,
                       int n_measured, const std::string& tag);

// Extractor features enter a head as angles: feature f in [-1, 1] maps to
// R_Y(pi * (1 + f) / 2), so -1 -> 0 and +1 -> pi. The derivative is the
// constant pi/2; map and derivative travel together so an alternative map
// cannot silently desynchronize the gradient.
struct FeatureReencoding {
  double angle(double f) const;
  double dangle_df(double f) const;  // pi/2 for the affine map
};

struct ModelConfig {
  int n_qubits = 4;
  int n_stages = 1;
  bool shared_qcl = false;
  int pool_control_state = 1;
  int qfc1_layers = 2;
  int qfc2_layers = 2;
  Basis qfc1_basis = Basis::X;  // label head reads X
  Basis qfc2_basis = Basis::Z;  // domain head reads Z
  int n_classes = 2;
};

struct ParamPartition {
  int cp_count = 0;
  int qfc1_count = 0;
  int qfc2_count = 0;

  int total() const { return cp_count + qfc1_count + qfc2_count; }
  std::vector<int> cp_slots() const;
  std::vector<int> qfc1_slots() const;
  std::vector<int> qfc2_slots() const;
};

// Full model: extractor (theta_cp) plus the label head QFC1 and domain head
// QFC2. Global parameter layout is [theta_cp | theta_qfc1 | theta_qfc2].
struct VqdaModel {
  ModelConfig config;
  ParamCircuit extractor;
  std::vector<int> active_qubits;
  std::vector<QclBlock> qcls;
  std::vector<QplBlock> qpls;
  QfcHead qfc1;
  QfcHead qfc2;
  FeatureReencoding reencoding;

  int n_params() const;
  ParamPartition partition() const;
  std::span<const double> cp_params(std::span<const double> full) const;
  std::span<const double> qfc1_params(std::span<const double> full) const;
  std::span<const double> qfc2_params(std::span<const double> full) const;
};

VqdaModel build_model(const ModelConfig& config);

ParamPartition param_partition(const VqdaModel& model);

// Z expectations on the active qubits after the extractor, ascending qubit
// order.
std::vector<double> extract_features(const VqdaModel& model,
                                     std::span<const double> cp_params,
                                     const StateVector& input);

// Per-sample head evaluation circuit: slots [0, k) carry the re-encoding
// angles (differentiable for the chain rule), slots [k, ...) the head
// parameters. `params` is the matching concatenated vector.
struct HeadEval {
  ParamCircuit circuit;
  std::vector<double> params;
  int n_reencode = 0;
};

HeadEval head_eval_circuit(const QfcHead& head,
                           std::span<const double> head_params,
                           std::span<const double> features,
                           const FeatureReencoding& map);

// Fresh |0...0> register, re-encode features, run the head, read out the
// measured qubits in the head's basis.
std::vector<double> head_forward(const QfcHead& head,
                                 std::span<const double> head_params,
                                 std::span<const double> features,
                                 const FeatureReencoding& map = {});

// y = 0 if p1 >= p2 else 1.
int classify_binary(double p1, double p2);

// Argmax; ties resolve to the lowest index.
int classify_mary(std::span<const double> p);

}  // namespace vqda
