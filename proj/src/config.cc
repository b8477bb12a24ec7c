/*
 * Copyright 2026 The sgnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sgnn/config.h"

#include <cmath>
#include <set>

#include "sgnn/errors.h"
#include "sgnn/io.h"

namespace sgnn {

using nlohmann::json;

namespace {

// Reads the members of one JSON object, remembering which keys were
// consumed so that leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type (got " + j_.at(key).dump() + ")");
    }
  }

  void read_size(const char* key, std::size_t& out, std::size_t min_value = 0) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value)) {
      throw ConfigError(field(key) + ": expected an integer >= " + std::to_string(min_value) +
                        " (got " + v.dump() + ")");
    }
    out = v.get<std::size_t>();
  }

  void read_real(const char* key, double& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key) + ": expected a number (got " + v.dump() + ")");
    out = v.get<double>();
  }

  // Nested object, or nullptr when absent.
  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key '" + field(key) + "'");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError(field + ": " + why);
}

const char* class_weight_mode_name(ClassWeightMode m) {
  switch (m) {
    case ClassWeightMode::kInverseFrequency:
      return "inverse_frequency";
    case ClassWeightMode::kUniform:
      return "uniform";
    case ClassWeightMode::kExplicit:
      return "explicit";
  }
  return "?";
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  Section root(j, "");
  root.read("seed", cfg.seed);

  if (const json* p = root.child("paths")) {
    Section s(*p, "paths");
    s.read("annotations", cfg.paths.annotations);
    s.read("lexicon", cfg.paths.lexicon);
    s.read("manifest", cfg.paths.manifest);
    s.read("labels", cfg.paths.labels);
    s.read("graphs", cfg.paths.graphs);
    s.read("checkpoint", cfg.paths.checkpoint);
    s.read("ground_truth", cfg.paths.ground_truth);
    s.read("parcel_names", cfg.paths.parcel_names);
    s.read("output_dir", cfg.paths.output_dir);
    s.finish();
  }

  if (const json* p = root.child("labels")) {
    Section s(*p, "labels");
    s.read("alpha", cfg.alpha);
    s.read("split_ratios", cfg.split_ratios);
    s.finish();
    for (const auto& [name, a] : cfg.alpha) require(a >= 0.0 && a <= 1.0, "labels.alpha." + name, "must lie in [0,1]");
    double total = 0.0;
    for (double r : cfg.split_ratios) {
      require(r > 0.0, "labels.split_ratios", "ratios must be positive");
      total += r;
    }
    require(std::abs(total - 1.0) < 1e-9, "labels.split_ratios", "ratios must sum to 1");
  }

  if (const json* p = root.child("graphs")) {
    Section s(*p, "graphs");
    s.read_size("block_size", cfg.block_size, 1);
    s.finish();
  }

  if (const json* p = root.child("model")) {
    Section s(*p, "model");
    s.read_size("conv1", cfg.conv1, 1);
    s.read_size("conv2", cfg.conv2, 1);
    s.read_size("hidden", cfg.hidden, 1);
    s.finish();
  }

  if (const json* p = root.child("loss")) {
    Section s(*p, "loss");
    s.read_real("label_smoothing", cfg.label_smoothing);
    s.read_real("lambda_l1", cfg.lambda_l1);
    s.read_real("lambda_binary", cfg.lambda_binary);
    if (const json* w = s.child("class_weights")) {
      if (w->is_string() && *w == "inverse_frequency") {
        cfg.class_weight_mode = ClassWeightMode::kInverseFrequency;
      } else if (w->is_string() && *w == "uniform") {
        cfg.class_weight_mode = ClassWeightMode::kUniform;
      } else if (w->is_array()) {
        cfg.class_weight_mode = ClassWeightMode::kExplicit;
        for (const auto& v : *w) {
          require(v.is_number() && v.get<double>() > 0.0, "loss.class_weights",
                  "explicit weights must be positive numbers");
          cfg.class_weights.push_back(v.get<double>());
        }
      } else {
        throw ConfigError("loss.class_weights: expected \"inverse_frequency\", \"uniform\" or a list");
      }
    }
    s.finish();
    require(cfg.label_smoothing >= 0.0 && cfg.label_smoothing < 1.0, "loss.label_smoothing",
            "must lie in [0,1)");
    require(cfg.lambda_l1 >= 0.0, "loss.lambda_l1", "must be >= 0");
    require(cfg.lambda_binary >= 0.0, "loss.lambda_binary", "must be >= 0");
  }

  if (const json* p = root.child("optimizer")) {
    Section s(*p, "optimizer");
    s.read_real("lr", cfg.optimizer.lr);
    s.read_real("weight_decay", cfg.optimizer.weight_decay);
    s.read_real("beta1", cfg.optimizer.beta1);
    s.read_real("beta2", cfg.optimizer.beta2);
    s.read_real("eps", cfg.optimizer.eps);
    s.finish();
    require(cfg.optimizer.lr > 0.0, "optimizer.lr", "must be positive");
    require(cfg.optimizer.weight_decay >= 0.0, "optimizer.weight_decay", "must be >= 0");
    require(cfg.optimizer.beta1 >= 0.0 && cfg.optimizer.beta1 < 1.0, "optimizer.beta1", "must lie in [0,1)");
    require(cfg.optimizer.beta2 >= 0.0 && cfg.optimizer.beta2 < 1.0, "optimizer.beta2", "must lie in [0,1)");
    require(cfg.optimizer.eps > 0.0, "optimizer.eps", "must be positive");
  }

  if (const json* p = root.child("training")) {
    Section s(*p, "training");
    s.read_size("batch_size", cfg.batch_size, 1);
    s.read_size("max_epochs", cfg.max_epochs, 1);
    s.read_size("patience", cfg.patience, 0);
    s.finish();
  }

  if (const json* p = root.child("explain")) {
    Section s(*p, "explain");
    s.read_size("top_k", cfg.top_k, 1);
    s.finish();
  }

  if (const json* p = root.child("synth")) {
    Section s(*p, "synth");
    auto& sc = cfg.synth;
    s.read_size("nodes", sc.nodes, 2);
    s.read_size("timepoints", sc.timepoints, 2);
    s.read_size("classes", sc.classes, 1);
    s.read_size("edges_per_class", sc.edges_per_class, 0);
    s.read_size("negative_edges_per_class", sc.negative_edges_per_class, 0);
    s.read_real("rho", sc.rho);
    s.read_real("noise_std", sc.noise_std);
    s.read("disjoint", sc.disjoint);
    s.read_size("train_blocks", sc.train_blocks, 1);
    s.read_size("val_blocks", sc.val_blocks, 1);
    s.read_size("test_blocks", sc.test_blocks, 1);
    s.finish();
    require(sc.rho >= 0.0 && sc.rho < 1.0, "synth.rho", "must lie in [0,1)");
    require(sc.noise_std > 0.0, "synth.noise_std", "must be positive");
  }

  root.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(j);
}

json to_json(const RunConfig& cfg) {
  json weights = cfg.class_weight_mode == ClassWeightMode::kExplicit
                     ? json(cfg.class_weights)
                     : json(class_weight_mode_name(cfg.class_weight_mode));
  const auto& sc = cfg.synth;
  return {
      {"seed", cfg.seed},
      {"paths",
       {{"annotations", cfg.paths.annotations},
        {"lexicon", cfg.paths.lexicon},
        {"manifest", cfg.paths.manifest},
        {"labels", cfg.paths.labels},
        {"graphs", cfg.paths.graphs},
        {"checkpoint", cfg.paths.checkpoint},
        {"ground_truth", cfg.paths.ground_truth},
        {"parcel_names", cfg.paths.parcel_names},
        {"output_dir", cfg.paths.output_dir}}},
      {"labels", {{"alpha", cfg.alpha}, {"split_ratios", cfg.split_ratios}}},
      {"graphs", {{"block_size", cfg.block_size}}},
      {"model", {{"conv1", cfg.conv1}, {"conv2", cfg.conv2}, {"hidden", cfg.hidden}}},
      {"loss",
       {{"label_smoothing", cfg.label_smoothing},
        {"lambda_l1", cfg.lambda_l1},
        {"lambda_binary", cfg.lambda_binary},
        {"class_weights", weights}}},
      {"optimizer",
       {{"lr", cfg.optimizer.lr},
        {"weight_decay", cfg.optimizer.weight_decay},
        {"beta1", cfg.optimizer.beta1},
        {"beta2", cfg.optimizer.beta2},
        {"eps", cfg.optimizer.eps}}},
      {"training",
       {{"batch_size", cfg.batch_size}, {"max_epochs", cfg.max_epochs}, {"patience", cfg.patience}}},
      {"explain", {{"top_k", cfg.top_k}}},
      {"synth",
       {{"nodes", sc.nodes},
        {"timepoints", sc.timepoints},
        {"classes", sc.classes},
        {"edges_per_class", sc.edges_per_class},
        {"negative_edges_per_class", sc.negative_edges_per_class},
        {"rho", sc.rho},
        {"noise_std", sc.noise_std},
        {"disjoint", sc.disjoint},
        {"train_blocks", sc.train_blocks},
        {"val_blocks", sc.val_blocks},
        {"test_blocks", sc.test_blocks}}},
  };
}

std::string config_hash(const RunConfig& cfg) {
  // Paths do not change results, so they stay out of the fingerprint.
  json j = to_json(cfg);
  j.erase("paths");
  return hex64(fnv1a64(j.dump()));
}

ModelDims model_dims(const RunConfig& cfg) {
  ModelDims d;
  d.conv1 = cfg.conv1;
  d.conv2 = cfg.conv2;
  d.hidden = cfg.hidden;
  return d;
}

TrainConfig train_config(const RunConfig& cfg, std::size_t threads) {
  TrainConfig t;
  t.batch_size = cfg.batch_size;
  t.max_epochs = cfg.max_epochs;
  t.patience = cfg.patience;
  t.seed = cfg.seed;
  t.threads = threads;
  t.optimizer = cfg.optimizer;
  t.loss.label_smoothing = cfg.label_smoothing;
  t.loss.lambda_l1 = cfg.lambda_l1;
  t.loss.lambda_binary = cfg.lambda_binary;
  // Inverse frequency is what train() derives from an empty weight list.
  if (cfg.class_weight_mode == ClassWeightMode::kExplicit) t.loss.class_weights = cfg.class_weights;
  return t;
}

SynthConfig synth_config(const RunConfig& cfg) {
  SynthConfig s = cfg.synth;
  s.block_size = cfg.block_size;
  s.seed = cfg.seed;
  return s;
}

std::string config_help() {
  return R"(Configuration (JSON; every field optional, unknown keys rejected):

  seed                             0          seed for splits, balancing, init, shuffling, synth
  paths.annotations                ""         annotations.json (fuse-labels)
  paths.lexicon                    ""         lexicon.json (fuse-labels)
  paths.manifest                   ""         time-series manifest.json (build-graphs)
  paths.labels                     ""         labels.json; default <run>/labels.json
  paths.graphs                     ""         graphs.bin; default <run>/graphs.bin
  paths.checkpoint                 ""         checkpoint; default <run>/checkpoint.bin
  paths.ground_truth               ""         ground_truth.json; default <run>/ground_truth.json
  paths.parcel_names               ""         optional JSON list of parcel names for nodes_*.csv
  paths.output_dir                 "runs"     parent of timestamped run directories
  labels.alpha                     {}         per-category text weight, overrides the lexicon (0.5)
  labels.split_ratios              [0.8,0.1,0.1]  image-level train/validation/test ratios
  graphs.block_size                5          trials per connectivity block (K)
  model.conv1                      64         width of signed conv layer 1
  model.conv2                      64         width of signed conv layer 2
  model.hidden                     32         width of the MLP hidden layer
  loss.label_smoothing             0.1        epsilon of the smoothed target
  loss.lambda_l1                   0.001      weight of mean |M|
  loss.lambda_binary               0.001      weight of mean M(1-M)
  loss.class_weights               "inverse_frequency"  or "uniform" or a list of C positives
  optimizer.lr                     0.0003     AdamW learning rate
  optimizer.weight_decay           0.001      decoupled decay on conv/MLP weights
  optimizer.beta1                  0.9
  optimizer.beta2                  0.999
  optimizer.eps                    1e-08
  training.batch_size              32
  training.max_epochs              200
  training.patience                10         epochs without val-loss improvement before stopping
  explain.top_k                    100        edges written per relevance map
  synth.nodes                      30         parcels P
  synth.timepoints                 40         timepoints per trial T
  synth.classes                    3
  synth.edges_per_class            10         planted positive edges per class
  synth.negative_edges_per_class   0          planted anti-correlated edges per class
  synth.rho                        0.7        planted population correlation
  synth.noise_std                  1.0        signal amplitude
  synth.disjoint                   true       planted sets disjoint across classes
  synth.train_blocks               60         blocks per class in each split
  synth.val_blocks                 20
  synth.test_blocks                20

Environment: SGNN_THREADS sets worker threads (default 1); results do not depend on it.
)";
}

}  // namespace sgnn
