#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vqda/ansatz.hpp"
#include "vqda/data.hpp"
#include "vqda/grad.hpp"
#include "vqda/optim.hpp"

namespace vqda {

// Softmax over readout expectations, then negative log-likelihood of the
// label. grad is dL/d<P_j>, ready to feed a head backward pass.
struct SoftmaxLoss {
  double loss = 0.0;
  std::vector<double> probs;
  std::vector<double> grad;
};

SoftmaxLoss cross_entropy_from_expectations(std::span<const double> expectations, int label);

// Adaptation weight lambda = 2 / (1 + exp(-gamma * p)) - 1 for training
// progress p in [0, 1] (values outside are clamped).
double lambda_schedule(double p, double gamma = 10.0);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 64;
  double gamma = 10.0;
  std::uint64_t seed = 0;
  OptimizerConfig optimizer;
  GradEngine engine = GradEngine::Adjoint;
  std::optional<double> lambda_override;
  bool source_only = false;  // drop the domain head path entirely
  int threads = 1;
};

struct EpochRecord {
  int epoch = 0;
  double lambda = 0.0;
  double label_loss = 0.0;   // mean source cross-entropy through QFC1
  double domain_loss = 0.0;  // mean domain cross-entropy through QFC2
  double source_accuracy = 0.0;
  double target_accuracy = 0.0;
};

struct TrainReport {
  TrainConfig config;
  std::vector<EpochRecord> epochs;
  std::vector<double> final_params;
  int total_steps = 0;
  double wall_seconds = 0.0;  // measured, excluded from determinism claims
};

// Descent directions for one mini-batch pair, after the gradient-reversal
// combination:
//   cp    = grad L1 - lambda * (grad L2_src + grad L2_tgt)
//   qfc1  = grad L1
//   qfc2  = lambda * (grad L2_src + grad L2_tgt)
// The extractor ascends the domain loss while QFC2 descends it, which is the
// whole adversarial game. Loss means come back for logging.
struct StepGrads {
  std::vector<double> cp;
  std::vector<double> qfc1;
  std::vector<double> qfc2;
  double label_loss = 0.0;
  double domain_loss = 0.0;

  std::vector<double> concat() const;
};

StepGrads compute_step_gradients(const VqdaModel& model,
                                 std::span<const double> full_params,
                                 std::span<const StateVector> source_batch,
                                 std::span<const int> source_labels,
                                 std::span<const StateVector> target_batch,
                                 double lambda, GradEngine engine, int threads,
                                 bool source_only = false);

// Monitoring scalar L1 - lambda * (L2_src + L2_tgt) on explicit batches.
// Matches the extractor's descent direction; QFC2 itself descends +lambda*L2.
double vqda_objective(const DomainDataset& source_batch, const DomainDataset& target_batch,
                      const VqdaModel& model, std::span<const double> full_params,
                      double lambda);

struct EvalOptions {
  int shots = 0;  // 0 = exact expectations
  std::uint64_t seed = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  std::vector<std::vector<int>> confusion;  // confusion[truth][prediction]
};

EvalResult evaluate(const DomainDataset& dataset, const VqdaModel& model,
                    std::span<const double> full_params, const EvalOptions& options = {});

// Mini-batch adversarial training. Per epoch both domains are reshuffled and
// l = min(|source|, |target|) / batch_size steps run; lambda follows the
// schedule on overall progress. Everything except wall_seconds is a pure
// function of (datasets, model, config).
TrainReport train(const DomainDataset& source, const DomainDataset& target,
                  const VqdaModel& model, const TrainConfig& config,
                  const DomainDataset* source_eval = nullptr,
                  const DomainDataset* target_eval = nullptr);

}  // namespace vqda
