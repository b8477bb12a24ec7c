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

#include "sgnn/pipeline.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <optional>
#include <stdexcept>

#include "sgnn/errors.h"
#include "sgnn/eval.h"
#include "sgnn/explain.h"
#include "sgnn/graphs.h"
#include "sgnn/io.h"
#include "sgnn/labels.h"
#include "sgnn/model.h"
#include "sgnn/synth.h"
#include "sgnn/training.h"

namespace sgnn {

namespace fs = std::filesystem;

namespace {

// Stream tags for the seed-derived RNGs of each pipeline stage.
constexpr std::uint64_t kSplitTag = 0x5101;
constexpr std::uint64_t kBalanceTag = 0xba1a;

void say(const RunContext& ctx, const std::string& line) {
  if (ctx.log) ctx.log(line);
}

fs::path input_path(const RunContext& ctx, const std::string& configured, const char* default_name,
                    const char* what) {
  fs::path p = configured.empty() ? ctx.run_dir / default_name : fs::path(configured);
  if (!fs::exists(p)) {
    throw InputError(std::string("missing ") + what + ": " + p.string() +
                     (configured.empty() ? " (set paths in the config or run the producing step)" : ""));
  }
  return p;
}

fs::path required_path(const std::string& configured, const char* key) {
  if (configured.empty()) throw ConfigError(std::string("paths.") + key + " is required for this command");
  if (!fs::exists(configured)) throw InputError(std::string("missing ") + key + ": " + configured);
  return configured;
}

void record_run(const RunContext& ctx, const std::string& command) {
  fs::create_directories(ctx.run_dir);
  write_json(ctx.run_dir / "config.json", to_json(ctx.config));
  write_json(ctx.run_dir / (command + ".run.json"),
             {{"command", command},
              {"seed", ctx.config.seed},
              {"config_hash", config_hash(ctx.config)},
              {"version", kVersion}});
}

std::uint64_t hash_value(const RunConfig& cfg) { return std::stoull(config_hash(cfg), nullptr, 16); }

GraphDataset load_dataset(const RunContext& ctx) {
  return load_graphs(input_path(ctx, ctx.config.paths.graphs, "graphs.bin", "graphs"));
}

ModelParams load_model(const RunContext& ctx, const GraphDataset& d) {
  Checkpoint ckpt = load_checkpoint(input_path(ctx, ctx.config.paths.checkpoint, "checkpoint.bin", "checkpoint"));
  if (ckpt.params.dims.nodes != d.num_nodes || ckpt.params.dims.classes != d.num_classes) {
    throw InputError("checkpoint is for P=" + std::to_string(ckpt.params.dims.nodes) + ", C=" +
                     std::to_string(ckpt.params.dims.classes) + " but graphs have P=" +
                     std::to_string(d.num_nodes) + ", C=" + std::to_string(d.num_classes));
  }
  return std::move(ckpt.params);
}

std::string file_safe(std::string name) {
  for (char& ch : name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  return name;
}

}  // namespace

void run_fuse_labels(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  auto annotations = annotations_from_json(read_json(required_path(cfg.paths.annotations, "annotations")));
  auto lexicons = lexicons_from_json(read_json(required_path(cfg.paths.lexicon, "lexicon")));
  for (const auto& [name, alpha] : cfg.alpha) {
    auto it = std::find_if(lexicons.begin(), lexicons.end(),
                           [&](const CategoryLexicon& l) { return l.name == name; });
    if (it == lexicons.end()) throw ConfigError("labels.alpha." + name + ": no such category in the lexicon");
    it->alpha = alpha;
  }
  Rng rng = Rng(cfg.seed).fork(kSplitTag);
  const LabelSet labels = fuse_labels(annotations, lexicons, cfg.split_ratios, rng);
  record_run(ctx, "fuse-labels");
  save_labels(ctx.run_dir / "labels.json", labels);
  say(ctx, "scored " + std::to_string(labels.images.size()) + " images over " +
               std::to_string(labels.categories.size()) + " categories");
}

void run_build_graphs(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const auto trials = load_time_series(required_path(cfg.paths.manifest, "manifest"));
  const LabelSet labels = load_labels(input_path(ctx, cfg.paths.labels, "labels.json", "labels"));
  Rng rng = Rng(cfg.seed).fork(kBalanceTag);
  const GraphDataset d = assemble_dataset(trials, labels, cfg.block_size, rng);
  record_run(ctx, "build-graphs");
  save_graphs(ctx.run_dir / "graphs.bin", d);
  say(ctx, "built " + std::to_string(d.graphs.size()) + " graphs with P=" + std::to_string(d.num_nodes));
}

void run_synth(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const SynthData data = generate(synth_config(cfg));
  record_run(ctx, "synth");
  save_time_series(ctx.run_dir, data.trials);
  save_labels(ctx.run_dir / "labels.json", data.labels);
  write_json(ctx.run_dir / "ground_truth.json", to_json(data.truth));
  Rng rng = Rng(cfg.seed).fork(kBalanceTag);
  const GraphDataset d = assemble_dataset(data.trials, data.labels, cfg.block_size, rng);
  save_graphs(ctx.run_dir / "graphs.bin", d);
  say(ctx, "generated " + std::to_string(data.trials.size()) + " trials, " +
               std::to_string(d.graphs.size()) + " graphs");
}

void run_train(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const GraphDataset d = load_dataset(ctx);
  check_dataset_invariants(d);
  TrainConfig tc = train_config(cfg, ctx.threads);
  if (cfg.class_weight_mode == ClassWeightMode::kUniform) tc.loss.class_weights.assign(d.num_classes, 1.0);
  const TrainResult result = train(d, model_dims(cfg), tc, [&](const EpochRecord& e) {
    say(ctx, "epoch " + std::to_string(e.epoch) + " train_loss " + format_double(e.train_loss) +
                 " val_loss " + format_double(e.val_loss) + " val_acc " + format_double(e.val_accuracy));
  });
  record_run(ctx, "train");
  save_checkpoint(ctx.run_dir / "checkpoint.bin",
                  {result.params, hash_value(cfg), static_cast<std::uint32_t>(result.history.best_epoch)});
  write_file(ctx.run_dir / "history.csv", result.history.to_csv());
  say(ctx, "best epoch " + std::to_string(result.history.best_epoch) + " (" + result.history.stop_reason + ")");
}

void run_eval(const RunContext& ctx) {
  const GraphDataset d = load_dataset(ctx);
  const ModelParams params = load_model(ctx, d);
  const PredictionSet preds = predict(params, d, Split::kTest, ctx.threads);
  const auto metrics = metrics_json(preds, d.class_names, ctx.config.seed, config_hash(ctx.config));
  record_run(ctx, "eval");
  write_json(ctx.run_dir / "metrics.json", metrics);
  say(ctx, "accuracy " + format_double(metrics["accuracy"].get<double>()) + " macro_ap " +
               format_double(metrics["macro_ap"].get<double>()));
}

void run_explain(const RunContext& ctx) {
  const auto& cfg = ctx.config;
  const GraphDataset d = load_dataset(ctx);
  const ModelParams params = load_model(ctx, d);
  std::vector<std::string> names;
  if (!cfg.paths.parcel_names.empty()) {
    try {
      names = read_json(required_path(cfg.paths.parcel_names, "parcel_names")).get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("parcel_names: ") + e.what());
    }
  }
  const std::size_t p = d.num_nodes;
  const std::size_t k = std::min(cfg.top_k, p * (p - 1) / 2);
  record_run(ctx, "explain");

  const RelevanceMap global = global_mask_relevance(materialize_mask(params.mask_raw));
  write_file(ctx.run_dir / "relevance_global.csv", edges_csv(topk_edges(global, k)));
  write_file(ctx.run_dir / "nodes_global.csv", nodes_csv(global.node_values, names));

  std::optional<GroundTruth> truth;
  {
    const fs::path gt = cfg.paths.ground_truth.empty() ? ctx.run_dir / "ground_truth.json"
                                                       : fs::path(cfg.paths.ground_truth);
    if (fs::exists(gt)) truth = ground_truth_from_json(read_json(gt));
  }
  nlohmann::json recovery = nlohmann::json::object();
  for (std::size_t c = 0; c < d.num_classes; ++c) {
    const RelevanceMap map = aggregate_class_saliency(params, d, static_cast<int>(c), Split::kTest, ctx.threads);
    const std::string tag = file_safe(d.class_names[c]);
    write_file(ctx.run_dir / ("relevance_class_" + tag + ".csv"), edges_csv(topk_edges(map, k)));
    write_file(ctx.run_dir / ("nodes_class_" + tag + ".csv"), nodes_csv(map.node_values, names));
    if (map.num_graphs == 0) say(ctx, "warning: no correctly classified test graph for " + d.class_names[c]);
    if (truth && c < truth->positive.size()) {
      const std::size_t planted = truth->positive[c].size() + truth->negative[c].size();
      std::vector<Edge> top;
      for (const auto& e : topk_edges(map, std::min(planted, p * (p - 1) / 2))) top.push_back({e.i, e.j});
      const Recovery r = recovery_score(top, *truth, c);
      recovery[d.class_names[c]] = {{"precision", r.precision}, {"recall", r.recall},
                                    {"jaccard", r.jaccard}, {"k", top.size()},
                                    {"graphs_averaged", map.num_graphs}};
    }
  }
  if (truth) write_json(ctx.run_dir / "recovery.json", recovery);
  say(ctx, "wrote relevance maps for " + std::to_string(d.num_classes) + " classes");
}

void run_embed(const RunContext& ctx) {
  const GraphDataset d = load_dataset(ctx);
  const ModelParams params = load_model(ctx, d);
  record_run(ctx, "embed");
  write_file(ctx.run_dir / "embeddings.csv", export_embeddings(params, d, ctx.threads));
}

void run_command(const std::string& command, const RunContext& ctx) {
  if (command == "fuse-labels") return run_fuse_labels(ctx);
  if (command == "build-graphs") return run_build_graphs(ctx);
  if (command == "synth") return run_synth(ctx);
  if (command == "train") return run_train(ctx);
  if (command == "eval") return run_eval(ctx);
  if (command == "explain") return run_explain(ctx);
  if (command == "embed") return run_embed(ctx);
  throw std::invalid_argument("unknown subcommand '" + command + "'");
}

fs::path timestamped_run_dir(const RunConfig& cfg, const std::string& command) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &utc);
  return fs::path(cfg.paths.output_dir) / (std::string(stamp) + "-" + command);
}

}  // namespace sgnn
