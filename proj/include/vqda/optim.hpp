#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vqda {

enum class OptimizerKind { Adam, Sgd };

inline const char* optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::Adam ? "adam" : "sgd";
}

inline OptimizerKind optimizer_from_name(const std::string& name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd") return OptimizerKind::Sgd;
  throw std::invalid_argument("unknown optimizer '" + name + "' (expected adam or sgd)");
}

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Annealing lr / (1 + alpha * p)^beta over training progress p in [0, 1].
  // alpha = 0 disables decay and leaves every update bitwise unchanged.
  double lr_decay_alpha = 0.0;
  double lr_decay_beta = 0.75;
};

// Effective step-size multiplier at progress p.
inline double lr_decay_scale(const OptimizerConfig& config, double p) {
  if (config.lr_decay_alpha == 0.0) return 1.0;
  return std::pow(1.0 + config.lr_decay_alpha * p, -config.lr_decay_beta);
}

// First-order update on a flat parameter vector. Adam keeps the usual
// bias-corrected moment estimates; Sgd is the plain descent step used as
// a didactic fallback.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, size_t n_params)
      : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {
    if (!(config.lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  }

  void step(std::span<double> params, std::span<const double> grad,
            double lr_scale = 1.0) {
    if (params.size() != m_.size() || grad.size() != m_.size())
      throw std::invalid_argument("optimizer sized for " + std::to_string(m_.size()) +
                                  " parameters, got " + std::to_string(params.size()));
    double lr = config_.lr * lr_scale;
    if (config_.kind == OptimizerKind::Sgd) {
      for (size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
      return;
    }
    ++t_;
    double bc1 = 1.0 - std::pow(config_.beta1, (double)t_);
    double bc2 = 1.0 - std::pow(config_.beta2, (double)t_);
    for (size_t i = 0; i < params.size(); ++i) {
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
      double mhat = m_[i] / bc1;
      double vhat = v_[i] / bc2;
      params[i] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }

  const OptimizerConfig& config() const { return config_; }
  long steps_taken() const { return t_; }

 private:
  OptimizerConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

}  // namespace vqda
