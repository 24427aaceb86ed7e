#pragma once

#include <cstdint>
#include <string>

#include "vqda/ansatz.hpp"
#include "vqda/data.hpp"
#include "vqda/training.hpp"

namespace vqda {

// One domain's file-backed sources. format is "idx" (image/label pair per
// split) or "csv" (one file per split).
struct DomainFilesConfig {
  std::string format = "idx";
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::string train_csv;
  std::string test_csv;
  int width = 16;
  int height = 16;
  int channels = 1;
};

struct DataConfig {
  std::string kind = "synthetic";  // "synthetic" | "real"
  SyntheticDomainSpec synthetic;
  DomainFilesConfig source;
  DomainFilesConfig target;
  int digit_a = 3;
  int digit_b = 6;
  int target_size = 16;
  // caps applied after task filtering; negative keeps everything
  int source_train_count = -1;
  int source_test_count = -1;
  int target_train_count = -1;
  int target_test_count = -1;
};

struct RunConfig {
  std::string name = "run";
  ModelConfig model;
  TrainConfig train;
  DataConfig data;
};

// Strict parse: unknown keys anywhere in the document are errors, so a typo
// cannot silently fall back to a default.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Canonical serialization (sorted keys, fixed field set); two configs hash
// equal iff this text is equal.
std::string run_config_to_json(const RunConfig& config);

// FNV-1a 64-bit over the canonical text, as a hex string.
std::string config_hash(const RunConfig& config);

struct ResolvedData {
  DomainDataset source_train;
  DomainDataset source_test;
  DomainDataset target_train;
  DomainDataset target_test;
};

ResolvedData resolve_datasets(const DataConfig& data);

// Architecture summary: parameter partition, per-block gate and slot counts,
// head shapes. Used by `describe` and embedded in training summaries.
std::string describe_model_json(const VqdaModel& model);

std::string eval_result_to_json(const EvalResult& result);

// One JSON object per line, one line per epoch.
void write_epochs_jsonl(const TrainReport& report, const std::string& path);

// Full run summary: canonical config echo, config hash, model description,
// per-epoch records, final accuracies. Deterministic given the same run;
// wall-clock time goes to a separate sidecar so byte comparisons stay clean.
std::string summary_json(const RunConfig& config, const VqdaModel& model,
                         const TrainReport& report, const EvalResult& source_eval,
                         const EvalResult& target_eval);

void write_text_file(const std::string& path, const std::string& text);

std::string params_to_json(std::span<const double> params);
std::vector<double> params_from_json(const std::string& text);

}  // namespace vqda
