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

#include "sgnn/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "sgnn/errors.h"

namespace sgnn {

namespace {

constexpr std::uint64_t kEdgeStreamTag = 0xed6e5ULL;
constexpr int kMaxEdgeDrawAttempts = 1000;

Edge normalized(Edge e) { return e.first < e.second ? e : Edge{e.second, e.first}; }

// Random matching on 2 * count distinct nodes.
std::vector<Edge> draw_matching(std::size_t nodes, std::size_t count, Rng& rng) {
  std::vector<std::size_t> perm(nodes);
  std::iota(perm.begin(), perm.end(), 0);
  shuffle(perm, rng);
  std::vector<Edge> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(normalized({perm[2 * k], perm[2 * k + 1]}));
  return out;
}

void draw_edges(const SynthConfig& cfg, GroundTruth& truth) {
  const std::size_t per_class = cfg.edges_per_class + cfg.negative_edges_per_class;
  if (2 * per_class > cfg.nodes) {
    throw std::invalid_argument("synth: " + std::to_string(per_class) +
                                " planted edges per class need " + std::to_string(2 * per_class) +
                                " distinct nodes, only " + std::to_string(cfg.nodes) + " exist");
  }
  Rng rng = Rng(cfg.seed).fork(kEdgeStreamTag);
  std::set<Edge> used;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    std::vector<Edge> edges;
    for (int attempt = 0;; ++attempt) {
      if (attempt == kMaxEdgeDrawAttempts) {
        throw std::invalid_argument("synth: could not draw disjoint planted edge sets");
      }
      edges = draw_matching(cfg.nodes, per_class, rng);
      if (!cfg.disjoint ||
          std::none_of(edges.begin(), edges.end(), [&](const Edge& e) { return used.contains(e); }))
        break;
    }
    used.insert(edges.begin(), edges.end());
    truth.positive.emplace_back(edges.begin(), edges.begin() + cfg.edges_per_class);
    truth.negative.emplace_back(edges.begin() + cfg.edges_per_class, edges.end());
  }
}

void validate_edges(const SynthConfig& cfg, GroundTruth& truth) {
  std::set<Edge> other_classes;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    std::vector<int> degree(cfg.nodes, 0);
    std::set<Edge> mine;
    for (auto* list : {&truth.positive[c], &truth.negative[c]}) {
      for (const Edge& e : *list) {
        if (e.first >= e.second || e.second >= cfg.nodes) {
          throw std::invalid_argument("synth: edge (" + std::to_string(e.first) + "," +
                                      std::to_string(e.second) + ") is not an upper-triangle pair");
        }
        if (!mine.insert(e).second) {
          throw std::invalid_argument("synth: class " + std::to_string(c) + " plants edge (" +
                                      std::to_string(e.first) + "," + std::to_string(e.second) +
                                      ") twice or with both signs");
        }
        if (cfg.disjoint && other_classes.contains(e)) {
          throw std::invalid_argument("synth: edge shared between classes with disjoint=true");
        }
        ++degree[e.first];
        ++degree[e.second];
      }
    }
    for (std::size_t i = 0; i < cfg.nodes; ++i) {
      if (degree[i] * cfg.rho > 1.0 + 1e-12) {
        throw std::invalid_argument("synth: node " + std::to_string(i) + " has planted degree " +
                                    std::to_string(degree[i]) + " which rho=" +
                                    std::to_string(cfg.rho) + " cannot support");
      }
    }
    other_classes.insert(mine.begin(), mine.end());
    std::sort(truth.positive[c].begin(), truth.positive[c].end());
    std::sort(truth.negative[c].begin(), truth.negative[c].end());
  }
}

Matrix trial_signal(const SynthConfig& cfg, const std::vector<Edge>& pos,
                    const std::vector<Edge>& neg, Rng& rng) {
  const std::size_t p = cfg.nodes;
  const std::size_t t = cfg.timepoints;
  std::vector<int> degree(p, 0);
  for (auto* list : {&pos, &neg})
    for (const Edge& e : *list) {
      ++degree[e.first];
      ++degree[e.second];
    }
  Matrix x(p, t);
  for (std::size_t i = 0; i < p; ++i) {
    const double own = std::sqrt(std::max(0.0, 1.0 - degree[i] * cfg.rho));
    for (std::size_t k = 0; k < t; ++k) x(i, k) = own * rng.normal();
  }
  const double shared = std::sqrt(cfg.rho);
  for (auto* list : {&pos, &neg}) {
    const double sign = list == &pos ? 1.0 : -1.0;
    for (const Edge& e : *list) {
      for (std::size_t k = 0; k < t; ++k) {
        const double l = shared * rng.normal();
        x(e.first, k) += l;
        x(e.second, k) += sign * l;
      }
    }
  }
  scale_inplace(x, cfg.noise_std);
  return x;
}

}  // namespace

SynthData generate(const SynthConfig& cfg) {
  if (cfg.nodes < 2 || cfg.timepoints < 2 || cfg.block_size == 0 || cfg.classes == 0) {
    throw std::invalid_argument("synth: nodes, timepoints >= 2 and block_size, classes >= 1");
  }
  if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw std::invalid_argument("synth: rho must lie in [0,1)");
  if (!(cfg.noise_std > 0.0)) throw std::invalid_argument("synth: noise_std must be positive");
  if (cfg.train_blocks == 0 || cfg.val_blocks == 0 || cfg.test_blocks == 0) {
    throw std::invalid_argument("synth: every split needs at least one block per class");
  }

  SynthData out;
  if (cfg.positive_edges.empty() && cfg.negative_edges.empty()) {
    draw_edges(cfg, out.truth);
  } else {
    out.truth.positive = cfg.positive_edges;
    out.truth.negative = cfg.negative_edges;
    out.truth.positive.resize(cfg.classes);
    out.truth.negative.resize(cfg.classes);
    if (cfg.positive_edges.size() > cfg.classes || cfg.negative_edges.size() > cfg.classes) {
      throw std::invalid_argument("synth: more planted edge lists than classes");
    }
  }
  validate_edges(cfg, out.truth);

  for (std::size_t c = 0; c < cfg.classes; ++c) {
    out.labels.categories.push_back("class" + std::to_string(c));
    out.labels.alpha.push_back(0.5);
  }

  const Rng root(cfg.seed);
  const std::size_t k = cfg.block_size;
  const std::array<std::size_t, 3> blocks = {cfg.train_blocks, cfg.val_blocks, cfg.test_blocks};
  long order = 0;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    std::size_t n = 0;
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t b = 0; b < blocks[s] * k; ++b, ++n, ++order) {
        // One image per trial; evidence 0.1 for its own class gives one sample.
        const std::string id = "c" + std::to_string(c) + "_i" + std::to_string(n);
        Rng rng = root.fork(static_cast<std::uint64_t>(order));
        out.trials.push_back({"synth", "t" + std::to_string(order), id, order,
                              trial_signal(cfg, out.truth.positive[c], out.truth.negative[c], rng)});
        ScoredImage img;
        img.image_id = id;
        img.mask.assign(cfg.classes, 0.0);
        img.text.assign(cfg.classes, 0.0);
        img.score.assign(cfg.classes, 0.0);
        img.count.assign(cfg.classes, 0);
        img.mask[c] = img.text[c] = 0.1;
        img.score[c] = fuse_score(0.1, 0.1, 0.5);
        img.count[c] = duplication_count(img.score[c]);
        out.labels.images.push_back(std::move(img));
        out.labels.splits[id] = static_cast<Split>(s);
      }
    }
  }
  validate(out.labels);
  return out;
}

Recovery recovery_score(const std::vector<Edge>& top_edges, const GroundTruth& truth, std::size_t c) {
  std::set<Edge> planted;
  if (c < truth.positive.size()) planted.insert(truth.positive[c].begin(), truth.positive[c].end());
  if (c < truth.negative.size()) planted.insert(truth.negative[c].begin(), truth.negative[c].end());
  std::set<Edge> found;
  for (const Edge& e : top_edges) found.insert(normalized(e));

  std::size_t hits = 0;
  for (const Edge& e : found) hits += planted.contains(e) ? 1 : 0;
  Recovery r;
  if (!found.empty()) r.precision = static_cast<double>(hits) / static_cast<double>(found.size());
  if (!planted.empty()) r.recall = static_cast<double>(hits) / static_cast<double>(planted.size());
  const std::size_t uni = found.size() + planted.size() - hits;
  if (uni > 0) r.jaccard = static_cast<double>(hits) / static_cast<double>(uni);
  return r;
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t c = 0; c < truth.positive.size(); ++c) {
    nlohmann::json pos = nlohmann::json::array();
    nlohmann::json neg = nlohmann::json::array();
    for (const Edge& e : truth.positive[c]) pos.push_back({e.first, e.second});
    if (c < truth.negative.size())
      for (const Edge& e : truth.negative[c]) neg.push_back({e.first, e.second});
    classes.push_back({{"class", c}, {"positive", pos}, {"negative", neg}});
  }
  return {{"classes", classes}};
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
  GroundTruth t;
  try {
    for (const auto& rec : j.at("classes")) {
      auto read = [](const nlohmann::json& list) {
        std::vector<Edge> out;
        for (const auto& e : list) out.push_back(normalized({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()}));
        return out;
      };
      t.positive.push_back(read(rec.at("positive")));
      t.negative.push_back(read(rec.at("negative")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("ground_truth: ") + e.what());
  }
  return t;
}

}  // namespace sgnn
