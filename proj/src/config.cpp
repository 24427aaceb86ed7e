#include "vqda/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vqda {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const std::string& ctx,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw std::runtime_error(ctx + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key()))
      throw std::runtime_error(ctx + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_or(const json& j, const std::string& ctx, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::runtime_error(ctx + "." + key + ": " + e.what());
  }
}

std::string get_required_string(const json& j, const std::string& ctx, const char* key) {
  if (!j.contains(key))
    throw std::runtime_error(ctx + ": missing required key '" + key + "'");
  return get_or<std::string>(j, ctx, key, "");
}

ModelConfig parse_model(const json& j) {
  expect_keys(j, "model",
              {"n_qubits", "n_stages", "shared_qcl", "pool_control_state", "qfc1_layers",
               "qfc2_layers", "qfc1_basis", "qfc2_basis", "n_classes"});
  ModelConfig m;
  m.n_qubits = get_or(j, "model", "n_qubits", m.n_qubits);
  m.n_stages = get_or(j, "model", "n_stages", m.n_stages);
  m.shared_qcl = get_or(j, "model", "shared_qcl", m.shared_qcl);
  m.pool_control_state = get_or(j, "model", "pool_control_state", m.pool_control_state);
  m.qfc1_layers = get_or(j, "model", "qfc1_layers", m.qfc1_layers);
  m.qfc2_layers = get_or(j, "model", "qfc2_layers", m.qfc2_layers);
  m.qfc1_basis = basis_from_name(get_or<std::string>(j, "model", "qfc1_basis", "X"));
  m.qfc2_basis = basis_from_name(get_or<std::string>(j, "model", "qfc2_basis", "Z"));
  m.n_classes = get_or(j, "model", "n_classes", m.n_classes);
  return m;
}

TrainConfig parse_train(const json& j) {
  expect_keys(j, "train",
              {"epochs", "batch_size", "gamma", "seed", "optimizer", "engine",
               "lambda_override", "source_only", "threads"});
  TrainConfig t;
  t.epochs = get_or(j, "train", "epochs", t.epochs);
  t.batch_size = get_or(j, "train", "batch_size", t.batch_size);
  t.gamma = get_or(j, "train", "gamma", t.gamma);
  t.seed = get_or<std::uint64_t>(j, "train", "seed", t.seed);
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    expect_keys(o, "train.optimizer",
                {"kind", "lr", "beta1", "beta2", "eps", "lr_decay_alpha",
                 "lr_decay_beta"});
    t.optimizer.kind =
        optimizer_from_name(get_or<std::string>(o, "train.optimizer", "kind", "adam"));
    t.optimizer.lr = get_or(o, "train.optimizer", "lr", t.optimizer.lr);
    t.optimizer.beta1 = get_or(o, "train.optimizer", "beta1", t.optimizer.beta1);
    t.optimizer.beta2 = get_or(o, "train.optimizer", "beta2", t.optimizer.beta2);
    t.optimizer.eps = get_or(o, "train.optimizer", "eps", t.optimizer.eps);
    t.optimizer.lr_decay_alpha =
        get_or(o, "train.optimizer", "lr_decay_alpha", t.optimizer.lr_decay_alpha);
    t.optimizer.lr_decay_beta =
        get_or(o, "train.optimizer", "lr_decay_beta", t.optimizer.lr_decay_beta);
  }
  std::string engine = get_or<std::string>(j, "train", "engine", "adjoint");
  if (engine == "adjoint")
    t.engine = GradEngine::Adjoint;
  else if (engine == "param-shift")
    t.engine = GradEngine::ParamShift;
  else
    throw std::runtime_error("train.engine: unknown engine '" + engine +
                             "' (expected adjoint or param-shift)");
  if (j.contains("lambda_override") && !j.at("lambda_override").is_null())
    t.lambda_override = get_or(j, "train", "lambda_override", 0.0);
  t.source_only = get_or(j, "train", "source_only", t.source_only);
  t.threads = get_or(j, "train", "threads", t.threads);
  return t;
}

DomainFilesConfig parse_domain_files(const json& j, const std::string& ctx) {
  expect_keys(j, ctx,
              {"format", "train_images", "train_labels", "test_images", "test_labels",
               "train_csv", "test_csv", "width", "height", "channels"});
  DomainFilesConfig d;
  d.format = get_required_string(j, ctx, "format");
  if (d.format == "idx") {
    d.train_images = get_required_string(j, ctx, "train_images");
    d.train_labels = get_required_string(j, ctx, "train_labels");
    d.test_images = get_required_string(j, ctx, "test_images");
    d.test_labels = get_required_string(j, ctx, "test_labels");
  } else if (d.format == "csv") {
    d.train_csv = get_required_string(j, ctx, "train_csv");
    d.test_csv = get_required_string(j, ctx, "test_csv");
    d.width = get_or(j, ctx, "width", d.width);
    d.height = get_or(j, ctx, "height", d.height);
    d.channels = get_or(j, ctx, "channels", d.channels);
  } else {
    throw std::runtime_error(ctx + ".format: unknown format '" + d.format +
                             "' (expected idx or csv)");
  }
  return d;
}

SyntheticDomainSpec parse_synthetic(const json& j) {
  expect_keys(j, "data.synthetic",
              {"n_qubits", "n_source_train", "n_source_test", "n_target_train",
               "n_target_test", "shift", "seed"});
  SyntheticDomainSpec s;
  s.n_qubits = get_or(j, "data.synthetic", "n_qubits", s.n_qubits);
  s.n_source_train = get_or(j, "data.synthetic", "n_source_train", s.n_source_train);
  s.n_source_test = get_or(j, "data.synthetic", "n_source_test", s.n_source_test);
  s.n_target_train = get_or(j, "data.synthetic", "n_target_train", s.n_target_train);
  s.n_target_test = get_or(j, "data.synthetic", "n_target_test", s.n_target_test);
  s.seed = get_or<std::uint64_t>(j, "data.synthetic", "seed", s.seed);
  if (j.contains("shift")) {
    const json& sh = j.at("shift");
    expect_keys(sh, "data.synthetic.shift",
                {"brightness", "blur", "blur_rows", "ramp", "noise_source",
                 "noise_target"});
    s.shift.brightness = get_or(sh, "data.synthetic.shift", "brightness", s.shift.brightness);
    s.shift.blur = get_or(sh, "data.synthetic.shift", "blur", s.shift.blur);
    s.shift.blur_rows =
        get_or(sh, "data.synthetic.shift", "blur_rows", s.shift.blur_rows);
    s.shift.ramp = get_or(sh, "data.synthetic.shift", "ramp", s.shift.ramp);
    s.shift.noise_source =
        get_or(sh, "data.synthetic.shift", "noise_source", s.shift.noise_source);
    s.shift.noise_target =
        get_or(sh, "data.synthetic.shift", "noise_target", s.shift.noise_target);
  }
  return s;
}

DataConfig parse_data(const json& j) {
  expect_keys(j, "data",
              {"kind", "synthetic", "source", "target", "digit_a", "digit_b",
               "target_size", "source_train_count", "source_test_count",
               "target_train_count", "target_test_count"});
  DataConfig d;
  d.kind = get_or<std::string>(j, "data", "kind", d.kind);
  if (d.kind == "synthetic") {
    if (j.contains("synthetic")) d.synthetic = parse_synthetic(j.at("synthetic"));
  } else if (d.kind == "real") {
    if (!j.contains("source") || !j.contains("target"))
      throw std::runtime_error("data: kind 'real' needs 'source' and 'target' sections");
    d.source = parse_domain_files(j.at("source"), "data.source");
    d.target = parse_domain_files(j.at("target"), "data.target");
  } else {
    throw std::runtime_error("data.kind: unknown kind '" + d.kind +
                             "' (expected synthetic or real)");
  }
  d.digit_a = get_or(j, "data", "digit_a", d.digit_a);
  d.digit_b = get_or(j, "data", "digit_b", d.digit_b);
  d.target_size = get_or(j, "data", "target_size", d.target_size);
  d.source_train_count = get_or(j, "data", "source_train_count", d.source_train_count);
  d.source_test_count = get_or(j, "data", "source_test_count", d.source_test_count);
  d.target_train_count = get_or(j, "data", "target_train_count", d.target_train_count);
  d.target_test_count = get_or(j, "data", "target_test_count", d.target_test_count);
  return d;
}

json model_to_json(const ModelConfig& m) {
  return json{{"n_qubits", m.n_qubits},
              {"n_stages", m.n_stages},
              {"shared_qcl", m.shared_qcl},
              {"pool_control_state", m.pool_control_state},
              {"qfc1_layers", m.qfc1_layers},
              {"qfc2_layers", m.qfc2_layers},
              {"qfc1_basis", basis_name(m.qfc1_basis)},
              {"qfc2_basis", basis_name(m.qfc2_basis)},
              {"n_classes", m.n_classes}};
}

json train_to_json(const TrainConfig& t) {
  json o{{"epochs", t.epochs},
         {"batch_size", t.batch_size},
         {"gamma", t.gamma},
         {"seed", t.seed},
         {"optimizer",
          json{{"kind", optimizer_name(t.optimizer.kind)},
               {"lr", t.optimizer.lr},
               {"beta1", t.optimizer.beta1},
               {"beta2", t.optimizer.beta2},
               {"eps", t.optimizer.eps},
               {"lr_decay_alpha", t.optimizer.lr_decay_alpha},
               {"lr_decay_beta", t.optimizer.lr_decay_beta}}},
         {"engine", grad_engine_name(t.engine)},
         {"source_only", t.source_only},
         {"threads", t.threads}};
  o["lambda_override"] =
      t.lambda_override.has_value() ? json(*t.lambda_override) : json(nullptr);
  return o;
}

json domain_files_to_json(const DomainFilesConfig& d) {
  if (d.format == "idx")
    return json{{"format", d.format},
                {"train_images", d.train_images},
                {"train_labels", d.train_labels},
                {"test_images", d.test_images},
                {"test_labels", d.test_labels}};
  return json{{"format", d.format},   {"train_csv", d.train_csv},
              {"test_csv", d.test_csv}, {"width", d.width},
              {"height", d.height},   {"channels", d.channels}};
}

json data_to_json(const DataConfig& d) {
  json o{{"kind", d.kind},
         {"digit_a", d.digit_a},
         {"digit_b", d.digit_b},
         {"target_size", d.target_size},
         {"source_train_count", d.source_train_count},
         {"source_test_count", d.source_test_count},
         {"target_train_count", d.target_train_count},
         {"target_test_count", d.target_test_count}};
  if (d.kind == "synthetic") {
    o["synthetic"] = json{{"n_qubits", d.synthetic.n_qubits},
                          {"n_source_train", d.synthetic.n_source_train},
                          {"n_source_test", d.synthetic.n_source_test},
                          {"n_target_train", d.synthetic.n_target_train},
                          {"n_target_test", d.synthetic.n_target_test},
                          {"seed", d.synthetic.seed},
                          {"shift", json{{"brightness", d.synthetic.shift.brightness},
                                         {"blur", d.synthetic.shift.blur},
                                         {"blur_rows", d.synthetic.shift.blur_rows},
                                         {"ramp", d.synthetic.shift.ramp},
                                         {"noise_source", d.synthetic.shift.noise_source},
                                         {"noise_target", d.synthetic.shift.noise_target}}}};
  } else {
    o["source"] = domain_files_to_json(d.source);
    o["target"] = domain_files_to_json(d.target);
  }
  return o;
}

void truncate_dataset(DomainDataset& d, int limit) {
  if (limit < 0 || (size_t)limit >= d.size()) return;
  d.samples.resize(limit);
  if (!d.labels.empty()) d.labels.resize(limit);
}

DomainDataset load_domain_split(const DomainFilesConfig& files, bool train_split,
                                const DataConfig& data, const std::string& domain) {
  RawImageSet set;
  if (files.format == "idx") {
    set = load_idx(train_split ? files.train_images : files.test_images,
                   train_split ? files.train_labels : files.test_labels);
  } else {
    set = load_csv(train_split ? files.train_csv : files.test_csv, files.width,
                   files.height, files.channels);
  }
  std::string task =
      std::to_string(data.digit_a) + "-vs-" + std::to_string(data.digit_b);
  return make_binary_task(set, data.digit_a, data.digit_b, data.target_size, domain, task);
}

json epoch_to_json(const EpochRecord& r) {
  return json{{"epoch", r.epoch},
              {"lambda", r.lambda},
              {"label_loss", r.label_loss},
              {"domain_loss", r.domain_loss},
              {"source_accuracy", r.source_accuracy},
              {"target_accuracy", r.target_accuracy}};
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }
  expect_keys(j, "config", {"name", "model", "train", "data"});
  RunConfig c;
  c.name = get_or<std::string>(j, "config", "name", c.name);
  if (j.contains("model")) c.model = parse_model(j.at("model"));
  if (j.contains("train")) c.train = parse_train(j.at("train"));
  if (j.contains("data")) c.data = parse_data(j.at("data"));
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string run_config_to_json(const RunConfig& config) {
  json j{{"name", config.name},
         {"model", model_to_json(config.model)},
         {"train", train_to_json(config.train)},
         {"data", data_to_json(config.data)}};
  return j.dump(2);
}

std::string config_hash(const RunConfig& config) {
  std::string text = run_config_to_json(config);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

ResolvedData resolve_datasets(const DataConfig& data) {
  ResolvedData out;
  if (data.kind == "synthetic") {
    SyntheticData s = gen_synthetic(data.synthetic);
    out.source_train = std::move(s.source_train);
    out.source_test = std::move(s.source_test);
    out.target_train = std::move(s.target_train);
    out.target_test = std::move(s.target_test);
  } else {
    out.source_train = load_domain_split(data.source, true, data, "source");
    out.source_test = load_domain_split(data.source, false, data, "source");
    out.target_train = load_domain_split(data.target, true, data, "target");
    out.target_test = load_domain_split(data.target, false, data, "target");
  }
  truncate_dataset(out.source_train, data.source_train_count);
  truncate_dataset(out.source_test, data.source_test_count);
  truncate_dataset(out.target_train, data.target_train_count);
  truncate_dataset(out.target_test, data.target_test_count);
  return out;
}

std::string describe_model_json(const VqdaModel& model) {
  ParamPartition part = model.partition();
  json blocks = json::object();
  CountReport extractor = count_report(model.extractor);
  for (const auto& [tag, counts] : extractor.blocks)
    blocks[tag] = json{{"rotations", counts.rotations},
                       {"cnots", counts.cnots},
                       {"others", counts.others},
                       {"params", counts.params}};
  for (const QfcHead* head : {&model.qfc1, &model.qfc2}) {
    CountReport hc = count_report(head->circuit);
    for (const auto& [tag, counts] : hc.blocks)
      blocks[tag] = json{{"rotations", counts.rotations},
                         {"cnots", counts.cnots},
                         {"others", counts.others},
                         {"params", counts.params}};
  }
  json j{{"n_qubits", model.config.n_qubits},
         {"active_qubits", model.active_qubits},
         {"partition",
          json{{"cp", part.cp_count},
               {"qfc1", part.qfc1_count},
               {"qfc2", part.qfc2_count},
               {"total", part.total()}}},
         {"blocks", blocks},
         {"qfc1", json{{"layers", model.qfc1.n_layers},
                       {"basis", basis_name(model.qfc1.readout)},
                       {"measured", model.qfc1.measured}}},
         {"qfc2", json{{"layers", model.qfc2.n_layers},
                       {"basis", basis_name(model.qfc2.readout)},
                       {"measured", model.qfc2.measured}}}};
  return j.dump(2);
}

std::string eval_result_to_json(const EvalResult& result) {
  json j{{"accuracy", result.accuracy},
         {"per_class_accuracy", result.per_class_accuracy},
         {"confusion", result.confusion}};
  return j.dump(2);
}

void write_epochs_jsonl(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const EpochRecord& r : report.epochs) out << epoch_to_json(r).dump() << "\n";
}

std::string summary_json(const RunConfig& config, const VqdaModel& model,
                         const TrainReport& report, const EvalResult& source_eval,
                         const EvalResult& target_eval) {
  json epochs = json::array();
  for (const EpochRecord& r : report.epochs) epochs.push_back(epoch_to_json(r));
  json j{{"name", config.name},
         {"config", json::parse(run_config_to_json(config))},
         {"config_hash", config_hash(config)},
         {"model", json::parse(describe_model_json(model))},
         {"total_steps", report.total_steps},
         {"epochs", epochs},
         {"final", json{{"source", json::parse(eval_result_to_json(source_eval))},
                        {"target", json::parse(eval_result_to_json(target_eval))}}}};
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << "\n";
}

std::string params_to_json(std::span<const double> params) {
  json j = json::array();
  for (double p : params) j.push_back(p);
  return json{{"params", j}}.dump();
}

std::vector<double> params_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("params file: ") + e.what());
  }
  if (!j.contains("params") || !j.at("params").is_array())
    throw std::runtime_error("params file: missing 'params' array");
  return j.at("params").get<std::vector<double>>();
}

}  // namespace vqda
