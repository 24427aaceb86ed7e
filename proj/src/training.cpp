#include "vqda/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "vqda/parallel.hpp"
#include "vqda/rng.hpp"

namespace vqda {

SoftmaxLoss cross_entropy_from_expectations(std::span<const double> expectations, int label) {
  if (expectations.size() < 2)
    throw std::invalid_argument("cross entropy needs at least 2 class scores");
  if (label < 0 || label >= (int)expectations.size())
    throw std::invalid_argument("label " + std::to_string(label) + " out of range for " +
                                std::to_string(expectations.size()) + " classes");
  for (double e : expectations)
    if (!std::isfinite(e))
      throw std::invalid_argument("non-finite expectation in cross entropy");

  SoftmaxLoss out;
  double mx = *std::max_element(expectations.begin(), expectations.end());
  double total = 0.0;
  out.probs.reserve(expectations.size());
  for (double e : expectations) {
    double v = std::exp(e - mx);
    out.probs.push_back(v);
    total += v;
  }
  for (double& p : out.probs) p /= total;
  out.loss = -std::log(out.probs[label]);
  out.grad = out.probs;
  out.grad[label] -= 1.0;
  return out;
}

double lambda_schedule(double p, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("lambda schedule needs gamma > 0");
  p = std::clamp(p, 0.0, 1.0);
  return 2.0 / (1.0 + std::exp(-gamma * p)) - 1.0;
}

std::vector<double> StepGrads::concat() const {
  std::vector<double> out;
  out.reserve(cp.size() + qfc1.size() + qfc2.size());
  out.insert(out.end(), cp.begin(), cp.end());
  out.insert(out.end(), qfc1.begin(), qfc1.end());
  out.insert(out.end(), qfc2.begin(), qfc2.end());
  return out;
}

namespace {

void axpy(std::vector<double>& acc, const std::vector<double>& x, double a) {
  if (acc.empty()) acc.assign(x.size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) acc[i] += a * x[i];
}

// Per-sample gradient pieces, filled independently so the batch can fan out
// across threads and still reduce in index order.
struct SampleGrads {
  double label_loss = 0.0;
  double domain_loss = 0.0;
  std::vector<double> cp_label;
  std::vector<double> head_label;
  std::vector<double> cp_domain;
  std::vector<double> head_domain;
};

SampleGrads sample_backward(const VqdaModel& model, std::span<const double> full_params,
                            const StateVector& input, std::optional<int> label,
                            int domain_label, bool want_domain, GradEngine engine) {
  SampleGrads out;
  std::span<const double> cp = model.cp_params(full_params);
  std::vector<double> features = extract_features(model, cp, input);

  if (label.has_value()) {
    std::span<const double> hp = model.qfc1_params(full_params);
    std::vector<double> exps = head_forward(model.qfc1, hp, features, model.reencoding);
    SoftmaxLoss l1 = cross_entropy_from_expectations(exps, *label);
    out.label_loss = l1.loss;
    HeadPathGrad hg = head_backward(model.qfc1, hp, features, l1.grad,
                                    model.reencoding, engine);
    out.head_label = std::move(hg.d_head);
    out.cp_label = extractor_backward(model, cp, input, hg.d_features, engine);
  }

  if (want_domain) {
    std::span<const double> hp = model.qfc2_params(full_params);
    std::vector<double> exps = head_forward(model.qfc2, hp, features, model.reencoding);
    SoftmaxLoss l2 = cross_entropy_from_expectations(exps, domain_label);
    out.domain_loss = l2.loss;
    HeadPathGrad hg = head_backward(model.qfc2, hp, features, l2.grad,
                                    model.reencoding, engine);
    out.head_domain = std::move(hg.d_head);
    out.cp_domain = extractor_backward(model, cp, input, hg.d_features, engine);
  }
  return out;
}

}  // namespace

StepGrads compute_step_gradients(const VqdaModel& model,
                                 std::span<const double> full_params,
                                 std::span<const StateVector> source_batch,
                                 std::span<const int> source_labels,
                                 std::span<const StateVector> target_batch,
                                 double lambda, GradEngine engine, int threads,
                                 bool source_only) {
  if (source_batch.empty())
    throw std::invalid_argument("source batch is empty");
  if (source_labels.size() != source_batch.size())
    throw std::invalid_argument("source batch has " + std::to_string(source_batch.size()) +
                                " states but " + std::to_string(source_labels.size()) +
                                " labels");
  bool want_domain = !source_only;
  if (want_domain && target_batch.empty())
    throw std::invalid_argument("target batch is empty");

  ParamPartition part = model.partition();
  size_t ns = source_batch.size();
  size_t nt = want_domain ? target_batch.size() : 0;

  std::vector<SampleGrads> per(ns + nt);
  parallel_for(ns + nt, threads, [&](size_t i) {
    if (i < ns)
      per[i] = sample_backward(model, full_params, source_batch[i], source_labels[i],
                               0, want_domain, engine);
    else
      per[i] = sample_backward(model, full_params, target_batch[i - ns], std::nullopt,
                               1, true, engine);
  });

  // Batch means, accumulated in index order for run-to-run stability.
  std::vector<double> cp_l1(part.cp_count, 0.0), g_qfc1(part.qfc1_count, 0.0);
  std::vector<double> cp_l2_src(part.cp_count, 0.0), cp_l2_tgt(part.cp_count, 0.0);
  std::vector<double> qfc2_src(part.qfc2_count, 0.0), qfc2_tgt(part.qfc2_count, 0.0);
  double label_loss = 0.0, domain_loss_src = 0.0, domain_loss_tgt = 0.0;
  for (size_t i = 0; i < ns; ++i) {
    axpy(cp_l1, per[i].cp_label, 1.0);
    axpy(g_qfc1, per[i].head_label, 1.0);
    label_loss += per[i].label_loss;
    if (want_domain) {
      axpy(cp_l2_src, per[i].cp_domain, 1.0);
      axpy(qfc2_src, per[i].head_domain, 1.0);
      domain_loss_src += per[i].domain_loss;
    }
  }
  for (size_t i = ns; i < ns + nt; ++i) {
    axpy(cp_l2_tgt, per[i].cp_domain, 1.0);
    axpy(qfc2_tgt, per[i].head_domain, 1.0);
    domain_loss_tgt += per[i].domain_loss;
  }
  double inv_s = 1.0 / (double)ns;
  for (double& v : cp_l1) v *= inv_s;
  for (double& v : g_qfc1) v *= inv_s;
  for (double& v : cp_l2_src) v *= inv_s;
  for (double& v : qfc2_src) v *= inv_s;
  if (nt > 0) {
    double inv_t = 1.0 / (double)nt;
    for (double& v : cp_l2_tgt) v *= inv_t;
    for (double& v : qfc2_tgt) v *= inv_t;
    domain_loss_tgt *= inv_t;
  }

  StepGrads out;
  out.label_loss = label_loss * inv_s;
  out.domain_loss = want_domain ? domain_loss_src * inv_s + domain_loss_tgt : 0.0;
  out.qfc1 = std::move(g_qfc1);
  out.cp.assign(part.cp_count, 0.0);
  out.qfc2.assign(part.qfc2_count, 0.0);
  if (source_only) {
    out.cp = std::move(cp_l1);
  } else {
    for (int i = 0; i < part.cp_count; ++i)
      out.cp[i] = cp_l1[i] - lambda * (cp_l2_src[i] + cp_l2_tgt[i]);
    for (int i = 0; i < part.qfc2_count; ++i)
      out.qfc2[i] = lambda * (qfc2_src[i] + qfc2_tgt[i]);
  }
  return out;
}

double vqda_objective(const DomainDataset& source_batch, const DomainDataset& target_batch,
                      const VqdaModel& model, std::span<const double> full_params,
                      double lambda) {
  if (source_batch.size() == 0 || target_batch.size() == 0)
    throw std::invalid_argument("objective needs non-empty batches");
  if (!source_batch.labeled())
    throw std::invalid_argument("source batch must be labeled");

  std::span<const double> cp = model.cp_params(full_params);
  std::span<const double> h1 = model.qfc1_params(full_params);
  std::span<const double> h2 = model.qfc2_params(full_params);

  double l1 = 0.0, l2_src = 0.0, l2_tgt = 0.0;
  for (size_t i = 0; i < source_batch.size(); ++i) {
    StateVector enc = exact_encode(source_batch.samples[i]);
    std::vector<double> f = extract_features(model, cp, enc);
    l1 += cross_entropy_from_expectations(
              head_forward(model.qfc1, h1, f, model.reencoding), source_batch.labels[i])
              .loss;
    l2_src += cross_entropy_from_expectations(
                  head_forward(model.qfc2, h2, f, model.reencoding), 0)
                  .loss;
  }
  for (size_t i = 0; i < target_batch.size(); ++i) {
    StateVector enc = exact_encode(target_batch.samples[i]);
    std::vector<double> f = extract_features(model, cp, enc);
    l2_tgt += cross_entropy_from_expectations(
                  head_forward(model.qfc2, h2, f, model.reencoding), 1)
                  .loss;
  }
  l1 /= (double)source_batch.size();
  l2_src /= (double)source_batch.size();
  l2_tgt /= (double)target_batch.size();
  return l1 - lambda * (l2_src + l2_tgt);
}

EvalResult evaluate(const DomainDataset& dataset, const VqdaModel& model,
                    std::span<const double> full_params, const EvalOptions& options) {
  if (!dataset.labeled())
    throw std::invalid_argument("evaluation needs a labeled dataset");
  if (dataset.size() == 0)
    throw std::invalid_argument("evaluation dataset is empty");
  if (options.shots < 0)
    throw std::invalid_argument("shots must be non-negative");

  int n_classes = model.config.n_classes;
  std::span<const double> cp = model.cp_params(full_params);
  std::span<const double> h1 = model.qfc1_params(full_params);

  EvalResult out;
  out.confusion.assign(n_classes, std::vector<int>(n_classes, 0));
  SplitMix64 rng(options.seed);
  int correct = 0;
  for (size_t i = 0; i < dataset.size(); ++i) {
    int truth = dataset.labels[i];
    if (truth < 0 || truth >= n_classes)
      throw std::invalid_argument("label " + std::to_string(truth) +
                                  " outside the model's " + std::to_string(n_classes) +
                                  " classes");
    StateVector enc = exact_encode(dataset.samples[i]);
    std::vector<double> f = extract_features(model, cp, enc);
    std::vector<double> exps = head_forward(model.qfc1, h1, f, model.reencoding);
    if (options.shots > 0) {
      // Finite-shot readout: each expectation becomes a Bernoulli average.
      SplitMix64 sample_rng = rng.fork(i);
      for (size_t j = 0; j < exps.size(); ++j) {
        SplitMix64 bit_rng = sample_rng.fork(j);
        double p_plus = std::clamp((1.0 + exps[j]) / 2.0, 0.0, 1.0);
        long ones = 0;
        for (int s = 0; s < options.shots; ++s)
          if (bit_rng.uniform() < p_plus) ++ones;
        exps[j] = 2.0 * (double)ones / options.shots - 1.0;
      }
    }
    int pred = classify_mary(exps);
    out.confusion[truth][pred] += 1;
    if (pred == truth) ++correct;
  }
  out.accuracy = (double)correct / (double)dataset.size();
  out.per_class_accuracy.assign(n_classes, 0.0);
  for (int c = 0; c < n_classes; ++c) {
    long row = 0;
    for (int p = 0; p < n_classes; ++p) row += out.confusion[c][p];
    out.per_class_accuracy[c] = row > 0 ? (double)out.confusion[c][c] / (double)row : 0.0;
  }
  return out;
}

TrainReport train(const DomainDataset& source, const DomainDataset& target,
                  const VqdaModel& model, const TrainConfig& config,
                  const DomainDataset* source_eval, const DomainDataset* target_eval) {
  if (!source.labeled())
    throw std::invalid_argument("source domain must be labeled");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be positive");
  if (config.batch_size < 1) throw std::invalid_argument("batch size must be positive");
  size_t steps_per_epoch =
      std::min(source.size(), target.size()) / (size_t)config.batch_size;
  if (steps_per_epoch == 0)
    throw std::invalid_argument("batch size " + std::to_string(config.batch_size) +
                                " exceeds a domain with " +
                                std::to_string(std::min(source.size(), target.size())) +
                                " samples");
  for (int lab : source.labels)
    if (lab < 0 || lab >= model.config.n_classes)
      throw std::invalid_argument("source label " + std::to_string(lab) +
                                  " outside the model's " +
                                  std::to_string(model.config.n_classes) + " classes");

  auto t0 = std::chrono::steady_clock::now();

  // Everything random flows from forked streams of the one seed: parameter
  // init, then one shuffle stream per domain.
  SplitMix64 root(config.seed);
  SplitMix64 init_rng = root.fork(0);
  SplitMix64 shuffle_src = root.fork(1);
  SplitMix64 shuffle_tgt = root.fork(2);

  std::vector<double> params((size_t)model.n_params());
  for (double& p : params) p = init_rng.angle();

  std::vector<StateVector> src_states, tgt_states;
  src_states.reserve(source.size());
  for (const AmplitudeTarget& t : source.samples) src_states.push_back(exact_encode(t));
  tgt_states.reserve(target.size());
  for (const AmplitudeTarget& t : target.samples) tgt_states.push_back(exact_encode(t));

  Optimizer opt(config.optimizer, params.size());
  long total_steps = (long)config.epochs * (long)steps_per_epoch;
  long step_counter = 0;

  TrainReport report;
  report.config = config;
  report.total_steps = (int)total_steps;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<size_t> perm_s = shuffle_src.permutation(source.size());
    std::vector<size_t> perm_t = shuffle_tgt.permutation(target.size());

    double epoch_label_loss = 0.0, epoch_domain_loss = 0.0, lambda = 0.0;
    for (size_t a = 0; a < steps_per_epoch; ++a) {
      double p = (double)step_counter / (double)total_steps;
      if (config.source_only)
        lambda = 0.0;
      else if (config.lambda_override.has_value())
        lambda = *config.lambda_override;
      else
        lambda = lambda_schedule(p, config.gamma);

      std::vector<StateVector> batch_s, batch_t;
      std::vector<int> labels_s;
      batch_s.reserve(config.batch_size);
      labels_s.reserve(config.batch_size);
      for (int b = 0; b < config.batch_size; ++b) {
        size_t idx = perm_s[a * config.batch_size + b];
        batch_s.push_back(src_states[idx]);
        labels_s.push_back(source.labels[idx]);
      }
      if (!config.source_only) {
        batch_t.reserve(config.batch_size);
        for (int b = 0; b < config.batch_size; ++b)
          batch_t.push_back(tgt_states[perm_t[a * config.batch_size + b]]);
      }

      StepGrads grads = compute_step_gradients(model, params, batch_s, labels_s, batch_t,
                                               lambda, config.engine, config.threads,
                                               config.source_only);
      std::vector<double> flat = grads.concat();
      opt.step(params, flat, lr_decay_scale(config.optimizer, p));
      ++step_counter;
      epoch_label_loss += grads.label_loss;
      epoch_domain_loss += grads.domain_loss;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lambda = lambda;
    rec.label_loss = epoch_label_loss / (double)steps_per_epoch;
    rec.domain_loss = epoch_domain_loss / (double)steps_per_epoch;
    const DomainDataset& se = source_eval ? *source_eval : source;
    const DomainDataset& te = target_eval ? *target_eval : target;
    rec.source_accuracy = se.labeled() ? evaluate(se, model, params).accuracy
                                       : std::nan("");
    rec.target_accuracy = te.labeled() ? evaluate(te, model, params).accuracy
                                       : std::nan("");
    report.epochs.push_back(rec);
  }

  report.final_params = std::move(params);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace vqda
