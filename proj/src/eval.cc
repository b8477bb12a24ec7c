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

#include "sgnn/eval.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sgnn/io.h"
#include "sgnn/parallel.h"

namespace sgnn {

int argmax_label(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("argmax of an empty score vector");
  return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

PredictionSet predict(const ModelParams& params, const GraphDataset& dataset, Split split,
                      std::size_t threads) {
  const auto idx = dataset.indices(split);
  PredictionSet out(idx.size());
  parallel_for(idx.size(), threads, [&](std::size_t k) {
    const auto& g = dataset.graphs[idx[k]];
    const ForwardCache cache = forward(g, params);
    auto& p = out[k];
    p.graph_index = idx[k];
    p.label = g.label;
    p.scores = cache.probs.values();
    p.predicted = argmax_label(p.scores);
  });
  return out;
}

double accuracy(const PredictionSet& preds) {
  if (preds.empty()) throw std::invalid_argument("accuracy: empty prediction set");
  const auto hits = std::count_if(preds.begin(), preds.end(),
                                  [](const Prediction& p) { return p.predicted == p.label; });
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

double average_precision(std::span<const double> scores, std::span<const int> positives) {
  if (scores.size() != positives.size()) {
    throw std::invalid_argument("average_precision: scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (positives[order[rank]] == 0) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  if (hits == 0) throw std::invalid_argument("average_precision: no positive examples");
  return sum / static_cast<double>(hits);
}

MacroAp macro_ap(const PredictionSet& preds, std::size_t num_classes) {
  MacroAp out;
  std::vector<double> scores(preds.size());
  std::vector<int> positives(preds.size());
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::size_t k = 0; k < preds.size(); ++k) {
      scores[k] = preds[k].scores.at(c);
      positives[k] = preds[k].label == static_cast<int>(c) ? 1 : 0;
    }
    try {
      out.per_class.push_back(average_precision(scores, positives));
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("macro_ap: class " + std::to_string(c) +
                                  " has no positive example");
    }
  }
  out.macro = out.per_class.empty()
                  ? 0.0
                  : std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) /
                        static_cast<double>(out.per_class.size());
  return out;
}

std::string export_embeddings(const ModelParams& params, const GraphDataset& dataset,
                              std::size_t threads) {
  std::vector<Matrix> pooled(dataset.graphs.size());
  parallel_for(dataset.graphs.size(), threads,
               [&](std::size_t i) { pooled[i] = forward(dataset.graphs[i], params).pooled; });
  std::string out = "graph_id,split,label";
  for (std::size_t j = 0; j < params.dims.conv2; ++j) out += ",g" + std::to_string(j);
  out += '\n';
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    const auto& g = dataset.graphs[i];
    out += std::to_string(i) + "," + split_name(g.split) + "," + std::to_string(g.label);
    for (double v : pooled[i].data()) out += "," + format_double(v);
    out += '\n';
  }
  return out;
}

nlohmann::json metrics_json(const PredictionSet& preds, const std::vector<std::string>& class_names,
                            std::uint64_t seed, const std::string& config_hash) {
  const MacroAp ap = macro_ap(preds, class_names.size());
  nlohmann::json per_class = nlohmann::json::object();
  for (std::size_t c = 0; c < class_names.size(); ++c) per_class[class_names[c]] = ap.per_class[c];
  return {{"accuracy", accuracy(preds)},
          {"per_class_ap", per_class},
          {"macro_ap", ap.macro},
          {"n_test", preds.size()},
          {"seed", seed},
          {"config_hash", config_hash}};
}

}  // namespace sgnn
