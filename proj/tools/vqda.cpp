#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vqda/config.hpp"
#include "vqda/encoder.hpp"
#include "vqda/gradcheck.hpp"
#include "vqda/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

vqda::VqdaModel model_from(const vqda::RunConfig& config) {
  return vqda::build_model(config.model);
}

int cmd_describe(const std::string& config_path, bool with_circuit) {
  vqda::RunConfig config = vqda::load_run_config(config_path);
  vqda::VqdaModel model = model_from(config);
  std::cout << vqda::describe_model_json(model) << "\n";
  std::cout << "config_hash: " << vqda::config_hash(config) << "\n";
  if (with_circuit) std::cout << vqda::circuit_to_json(model.extractor) << "\n";
  return kExitOk;
}

int cmd_gradcheck(const vqda::GradCheckConfig& gc) {
  vqda::GradCheckReport report = vqda::run_gradcheck(gc);
  std::cout << "circuit cases:            " << report.circuit_cases << "\n";
  std::cout << "pipeline cases:           " << report.pipeline_cases << "\n";
  std::cout << "max |shift - adjoint|:    " << report.max_dev_shift_vs_adjoint << "\n";
  std::cout << "max |analytic - fd|:      " << report.max_dev_vs_fd << "\n";
  std::cout << "max pipeline deviation:   " << report.max_dev_pipeline << "\n";
  for (const std::string& f : report.failures) std::cout << "FAIL " << f << "\n";
  std::cout << (report.pass ? "gradcheck: PASS" : "gradcheck: FAIL") << "\n";
  return report.pass ? kExitOk : kExitCheckFailed;
}

int cmd_encode_train(int n_qubits, int layers, int steps, double lr, int restarts,
                     int n_targets, bool basis_targets, std::uint64_t seed,
                     double min_median) {
  vqda::EncoderConfig ec;
  ec.n_qubits = n_qubits;
  ec.n_layers = layers;
  vqda::EncoderTrainConfig tc;
  tc.steps = steps;
  tc.lr = lr;
  tc.restarts = restarts;

  std::vector<vqda::AmplitudeTarget> targets;
  vqda::SplitMix64 rng(seed);
  if (basis_targets) {
    for (int i = 0; i < (1 << n_qubits); ++i) {
      std::vector<double> raw((size_t)1 << n_qubits, 0.0);
      raw[i] = 1.0;
      targets.push_back(vqda::AmplitudeTarget::from_raw(std::move(raw)));
    }
  } else {
    for (int t = 0; t < n_targets; ++t) {
      std::vector<double> raw((size_t)1 << n_qubits);
      for (double& v : raw) v = rng.gaussian();
      targets.push_back(vqda::AmplitudeTarget::from_raw(std::move(raw)));
    }
  }

  std::vector<double> fidelities;
  for (size_t t = 0; t < targets.size(); ++t) {
    vqda::EncoderResult res = vqda::train_encoder(targets[t], ec, tc, seed + 1000 + t);
    fidelities.push_back(res.fidelity);
    std::printf("target %2zu: objective %+.6f fidelity %.6f steps %d restarts %d\n", t,
                res.final_objective, res.fidelity, res.steps_used, res.restarts_used);
  }
  std::vector<double> sorted = fidelities;
  std::sort(sorted.begin(), sorted.end());
  double median = sorted.size() % 2 == 1
                      ? sorted[sorted.size() / 2]
                      : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  std::printf("median fidelity: %.6f  min: %.6f\n", median, sorted.front());
  if (min_median > 0.0 && median < min_median) {
    std::printf("below required median %.6f\n", min_median);
    return kExitCheckFailed;
  }
  return kExitOk;
}

void write_dataset_csv(const vqda::DomainDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (size_t i = 0; i < d.size(); ++i) {
    out << (d.labeled() ? d.labels[i] : -1);
    for (double v : d.samples[i].raw) out << "," << v;
    out << "\n";
  }
}

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
  vqda::RunConfig config = vqda::load_run_config(config_path);
  if (config.data.kind != "synthetic")
    throw std::runtime_error("synth needs a config with data.kind = synthetic");
  vqda::ResolvedData data = vqda::resolve_datasets(config.data);
  std::filesystem::create_directories(out_dir);
  write_dataset_csv(data.source_train, out_dir + "/source_train.csv");
  write_dataset_csv(data.source_test, out_dir + "/source_test.csv");
  write_dataset_csv(data.target_train, out_dir + "/target_train.csv");
  write_dataset_csv(data.target_test, out_dir + "/target_test.csv");
  std::cout << "wrote 4 splits to " << out_dir << " (source "
            << data.source_train.size() << "/" << data.source_test.size() << ", target "
            << data.target_train.size() << "/" << data.target_test.size() << ")\n";
  return kExitOk;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::optional<double> lambda_override,
              bool source_only, std::optional<int> threads, std::optional<int> epochs) {
  vqda::RunConfig config = vqda::load_run_config(config_path);
  if (seed) config.train.seed = *seed;
  if (lambda_override) config.train.lambda_override = *lambda_override;
  if (source_only) config.train.source_only = true;
  if (threads) config.train.threads = *threads;
  if (epochs) config.train.epochs = *epochs;

  vqda::ResolvedData data = vqda::resolve_datasets(config.data);
  vqda::VqdaModel model = model_from(config);
  vqda::TrainReport report = vqda::train(data.source_train, data.target_train, model,
                                         config.train, &data.source_test,
                                         &data.target_test);
  vqda::EvalResult src = vqda::evaluate(data.source_test, model, report.final_params);
  vqda::EvalResult tgt = vqda::evaluate(data.target_test, model, report.final_params);

  std::filesystem::create_directories(out_dir);
  vqda::write_text_file(out_dir + "/summary.json",
                        vqda::summary_json(config, model, report, src, tgt));
  vqda::write_epochs_jsonl(report, out_dir + "/epochs.jsonl");
  vqda::write_text_file(out_dir + "/params.json",
                        vqda::params_to_json(report.final_params));
  // Wall time lives apart from the deterministic artifacts.
  std::ostringstream timing;
  timing << "{\"wall_seconds\": " << report.wall_seconds << "}";
  vqda::write_text_file(out_dir + "/timing.json", timing.str());

  std::printf("trained %d epochs (%d steps) in %.1fs\n", (int)report.epochs.size(),
              report.total_steps, report.wall_seconds);
  std::printf("source accuracy %.4f  target accuracy %.4f\n", src.accuracy, tgt.accuracy);
  std::printf("artifacts in %s\n", out_dir.c_str());
  return kExitOk;
}

int cmd_eval(const std::string& config_path, const std::string& params_path,
             const std::string& split, int shots, std::uint64_t shot_seed) {
  vqda::RunConfig config = vqda::load_run_config(config_path);
  vqda::ResolvedData data = vqda::resolve_datasets(config.data);
  const vqda::DomainDataset* ds = nullptr;
  if (split == "source-train") ds = &data.source_train;
  else if (split == "source-test") ds = &data.source_test;
  else if (split == "target-train") ds = &data.target_train;
  else if (split == "target-test") ds = &data.target_test;
  else throw std::runtime_error("unknown split '" + split + "'");

  std::ifstream in(params_path);
  if (!in) throw std::runtime_error("cannot open params " + params_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<double> params = vqda::params_from_json(buf.str());

  vqda::VqdaModel model = model_from(config);
  vqda::EvalOptions opts;
  opts.shots = shots;
  opts.seed = shot_seed;
  vqda::EvalResult res = vqda::evaluate(*ds, model, params, opts);
  std::cout << vqda::eval_result_to_json(res) << "\n";
  return kExitOk;
}

int cmd_report(const std::string& out_dir) {
  std::ifstream in(out_dir + "/epochs.jsonl");
  if (!in) throw std::runtime_error("no epochs.jsonl under " + out_dir);
  std::cout << "epoch  lambda   label_loss  domain_loss  src_acc  tgt_acc\n";
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Rough extraction keeps this dependency-free; the JSONL is machine truth.
    auto field = [&](const std::string& key) -> std::string {
      size_t pos = line.find("\"" + key + "\":");
      if (pos == std::string::npos) return "?";
      pos += key.size() + 3;
      size_t end = line.find_first_of(",}", pos);
      return line.substr(pos, end - pos);
    };
    std::printf("%5s  %7.7s  %10.10s  %11.11s  %7.7s  %7.7s\n", field("epoch").c_str(),
                field("lambda").c_str(), field("label_loss").c_str(),
                field("domain_loss").c_str(), field("source_accuracy").c_str(),
                field("target_accuracy").c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statevector simulator and adversarial domain-adaptation trainer"};
  app.require_subcommand(1);

  // describe
  auto* describe = app.add_subcommand("describe", "print model architecture and counts");
  std::string describe_config;
  bool with_circuit = false;
  describe->add_option("--config", describe_config, "run config JSON")->required();
  describe->add_flag("--circuit", with_circuit, "also dump the extractor gate list");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "randomized gradient cross-checks");
  vqda::GradCheckConfig gc;
  std::string fault = "none";
  gradcheck->add_option("--cases", gc.cases, "random circuit cases");
  gradcheck->add_option("--pipeline-cases", gc.pipeline_cases, "full-model cases");
  gradcheck->add_option("--max-qubits", gc.max_qubits, "largest random register");
  gradcheck->add_option("--seed", gc.seed, "suite seed");
  gradcheck->add_option("--inject-fault", fault,
                        "none | wrong-sign (prove the checker can fail)");

  // encode-train
  auto* encode = app.add_subcommand("encode-train", "variationally learn state preparation");
  int enc_qubits = 4, enc_layers = 4, enc_steps = 350, enc_restarts = 3, enc_targets = 20;
  double enc_lr = 0.01, enc_min_median = 0.0;
  bool enc_basis = false;
  std::uint64_t enc_seed = 0;
  encode->add_option("--n-qubits", enc_qubits, "register width");
  encode->add_option("--layers", enc_layers, "ansatz layers");
  encode->add_option("--steps", enc_steps, "optimizer steps per restart");
  encode->add_option("--lr", enc_lr, "Adam learning rate");
  encode->add_option("--restarts", enc_restarts, "independent restarts");
  encode->add_option("--targets", enc_targets, "number of random targets");
  encode->add_flag("--basis", enc_basis, "use all computational basis states as targets");
  encode->add_option("--seed", enc_seed, "target/init seed");
  encode->add_option("--min-median", enc_min_median,
                     "fail (exit 1) if the median fidelity drops below this");

  // synth
  auto* synth = app.add_subcommand("synth", "materialize the synthetic domain pair as CSV");
  std::string synth_config, synth_out = "out/synth";
  synth->add_option("--config", synth_config, "run config JSON")->required();
  synth->add_option("--out", synth_out, "output directory");

  // train
  auto* train = app.add_subcommand("train", "adversarial training run");
  std::string train_config, train_out = "out/run";
  std::optional<std::uint64_t> train_seed;
  std::optional<double> train_lambda;
  std::optional<int> train_threads, train_epochs;
  bool train_source_only = false;
  train->add_option("--config", train_config, "run config JSON")->required();
  train->add_option("--out", train_out, "artifact directory");
  train->add_option("--seed", train_seed, "override train.seed");
  train->add_option("--lambda-override", train_lambda, "freeze lambda at a constant");
  train->add_flag("--source-only", train_source_only, "drop the domain head (ablation)");
  train->add_option("--threads", train_threads, "batch-level worker threads");
  train->add_option("--epochs", train_epochs, "override train.epochs");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate saved parameters on a split");
  std::string eval_config, eval_params, eval_split = "target-test";
  int eval_shots = 0;
  std::uint64_t eval_shot_seed = 0;
  eval->add_option("--config", eval_config, "run config JSON")->required();
  eval->add_option("--params", eval_params, "params.json from a training run")->required();
  eval->add_option("--split", eval_split,
                   "source-train | source-test | target-train | target-test");
  eval->add_option("--shots", eval_shots, "finite-shot readout (0 = exact)");
  eval->add_option("--shot-seed", eval_shot_seed, "seed for shot noise");

  // report
  auto* report = app.add_subcommand("report", "tabulate a run directory");
  std::string report_out = "out/run";
  report->add_option("--out", report_out, "artifact directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*describe) return cmd_describe(describe_config, with_circuit);
    if (*gradcheck) {
      if (fault == "wrong-sign")
        gc.fault = vqda::FaultInjection::WrongSignAdjoint;
      else if (fault != "none")
        throw std::runtime_error("unknown fault '" + fault + "'");
      return cmd_gradcheck(gc);
    }
    if (*encode)
      return cmd_encode_train(enc_qubits, enc_layers, enc_steps, enc_lr, enc_restarts,
                              enc_targets, enc_basis, enc_seed, enc_min_median);
    if (*synth) return cmd_synth(synth_config, synth_out);
    if (*train)
      return cmd_train(train_config, train_out, train_seed, train_lambda,
                       train_source_only, train_threads, train_epochs);
    if (*eval) return cmd_eval(eval_config, eval_params, eval_split, eval_shots,
                               eval_shot_seed);
    if (*report) return cmd_report(report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
