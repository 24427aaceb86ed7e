#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vqda/grad.hpp"

namespace vqda {

// Deliberate bug switch for exercising the harness itself: a checker that
// cannot fail proves nothing, so the CLI can flip one engine's sign and show
// the suite goes red.
enum class FaultInjection { None, WrongSignAdjoint };

struct GradCheckConfig {
  int cases = 100;
  int pipeline_cases = 8;
  int min_qubits = 2;
  int max_qubits = 6;
  int max_depth = 40;
  int max_params = 60;
  std::uint64_t seed = 0;
  double tol_shift_vs_adjoint = 1e-9;
  double tol_vs_fd = 1e-6;
  double fd_step = 1e-4;
  double tol_pipeline = 1e-5;
  FaultInjection fault = FaultInjection::None;
};

struct GradCheckReport {
  int circuit_cases = 0;
  int pipeline_cases = 0;
  double max_dev_shift_vs_adjoint = 0.0;
  double max_dev_vs_fd = 0.0;
  double max_dev_pipeline = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
};

// Random circuits (mixed gate set, shared slots, universal blocks, poolers,
// random observables and weights) checked three ways: parameter shift vs
// adjoint, both vs central finite differences. Pipeline cases additionally
// differentiate a full extractor -> re-encode -> head -> cross-entropy path
// and a whole adversarial training step against finite differences.
GradCheckReport run_gradcheck(const GradCheckConfig& config);

}  // namespace vqda
