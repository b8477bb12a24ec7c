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

#ifndef SGNN_EVAL_H_
#define SGNN_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgnn/graphs.h"
#include "sgnn/model.h"

namespace sgnn {

struct Prediction {
  std::size_t graph_index = 0;
  int label = 0;
  int predicted = 0;            // argmax of scores, lowest index on ties
  std::vector<double> scores;   // ŷ
};

using PredictionSet = std::vector<Prediction>;

// Lowest index among the maxima.
int argmax_label(std::span<const double> scores);

PredictionSet predict(const ModelParams& params, const GraphDataset& dataset, Split split,
                      std::size_t threads = 1);

// Throws std::invalid_argument on an empty set.
double accuracy(const PredictionSet& preds);

// Non-interpolated AP: rank by descending score (ties keep input order) and
// average the precision at each positive. Throws std::invalid_argument when
// there are no positives or the lengths differ.
double average_precision(std::span<const double> scores, std::span<const int> positives);

struct MacroAp {
  std::vector<double> per_class;
  double macro = 0.0;
};
// One-vs-rest AP per class using ŷ_c as the score.
MacroAp macro_ap(const PredictionSet& preds, std::size_t num_classes);

// CSV rows "graph_id,split,label,g0,...,g{d2-1}" of pooled embeddings.
std::string export_embeddings(const ModelParams& params, const GraphDataset& dataset,
                              std::size_t threads = 1);

// metrics.json: accuracy, per_class_ap (by class name), macro_ap, n_test,
// seed, config_hash.
nlohmann::json metrics_json(const PredictionSet& preds, const std::vector<std::string>& class_names,
                            std::uint64_t seed, const std::string& config_hash);

}  // namespace sgnn

#endif  // SGNN_EVAL_H_
