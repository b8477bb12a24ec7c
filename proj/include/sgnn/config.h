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

// Run configuration: one strict JSON document governs every subcommand.
// Unknown keys and wrongly typed values are ConfigErrors naming the field.

#ifndef SGNN_CONFIG_H_
#define SGNN_CONFIG_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgnn/model.h"
#include "sgnn/synth.h"
#include "sgnn/training.h"

namespace sgnn {

struct PathsConfig {
  // Empty paths resolve to the default file name inside the run directory.
  std::string annotations;
  std::string lexicon;
  std::string manifest;
  std::string labels;
  std::string graphs;
  std::string checkpoint;
  std::string ground_truth;
  std::string parcel_names;
  std::string output_dir = "runs";
};

enum class ClassWeightMode { kInverseFrequency, kUniform, kExplicit };

struct RunConfig {
  std::uint64_t seed = 0;
  PathsConfig paths;

  // labels
  std::map<std::string, double> alpha;  // per-category override of the lexicon
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};

  // graphs
  std::size_t block_size = 5;

  // model
  std::size_t conv1 = 64;
  std::size_t conv2 = 64;
  std::size_t hidden = 32;

  // loss
  double label_smoothing = 0.1;
  double lambda_l1 = 1e-3;
  double lambda_binary = 1e-3;
  ClassWeightMode class_weight_mode = ClassWeightMode::kInverseFrequency;
  std::vector<double> class_weights;  // kExplicit only

  OptimizerConfig optimizer;

  // training
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;

  // explain
  std::size_t top_k = 100;

  SynthConfig synth;
};

// Strict parse over the defaults above.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
// Fully resolved document, every field present.
nlohmann::json to_json(const RunConfig& cfg);
// FNV-1a of the canonical (sorted-key, compact) resolved JSON, as hex.
std::string config_hash(const RunConfig& cfg);

ModelDims model_dims(const RunConfig& cfg);
TrainConfig train_config(const RunConfig& cfg, std::size_t threads);
// synth block size mirrors block_size; synth seed mirrors seed.
SynthConfig synth_config(const RunConfig& cfg);

// Field reference for --help.
std::string config_help();

}  // namespace sgnn

#endif  // SGNN_CONFIG_H_
