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

// Synthetic trials with planted class-specific subnetworks.
//
// For a trial of class c, parcel i's signal at each timepoint is
//
//   x_i = s * ( sqrt(1 - deg_i * rho) * e_i + Σ_{edges e ∋ i} sign_{e,i} sqrt(rho) * l_e )
//
// with independent standard normals e_i and l_e, s = noise_std, and deg_i the
// number of planted edges of c touching i. Each planted edge therefore has
// population correlation +rho (or -rho for anti-coupled edges, where one
// endpoint takes the negated latent) and every other pair is uncorrelated.

#ifndef SGNN_SYNTH_H_
#define SGNN_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sgnn/graphs.h"
#include "sgnn/labels.h"

namespace sgnn {

using Edge = std::pair<std::size_t, std::size_t>;  // first < second

struct SynthConfig {
  std::size_t nodes = 30;
  std::size_t timepoints = 40;
  std::size_t block_size = 5;
  std::size_t classes = 3;
  std::size_t edges_per_class = 10;
  std::size_t negative_edges_per_class = 0;
  double rho = 0.7;
  double noise_std = 1.0;
  bool disjoint = true;
  // Blocks per class and split; trials per class = blocks * block_size.
  std::size_t train_blocks = 60;
  std::size_t val_blocks = 20;
  std::size_t test_blocks = 20;
  std::uint64_t seed = 0;
  // When non-empty (one list per class) these replace the random draw.
  std::vector<std::vector<Edge>> positive_edges;
  std::vector<std::vector<Edge>> negative_edges;
};

struct GroundTruth {
  std::vector<std::vector<Edge>> positive;  // per class, sorted
  std::vector<std::vector<Edge>> negative;
};

struct SynthData {
  std::vector<TrialTimeSeries> trials;
  LabelSet labels;
  GroundTruth truth;
};

// Throws std::invalid_argument on an invalid config: an edge that is not an
// upper-triangle pair, the same pair planted positive and negative in one
// class, a node whose planted degree times rho exceeds 1, or (with
// `disjoint`) an edge shared between classes.
SynthData generate(const SynthConfig& cfg);

struct Recovery {
  double precision = 0.0;
  double recall = 0.0;
  double jaccard = 0.0;
};

// Scores a ranked edge list against class c's planted positive and negative
// edges; edges may be given in either orientation.
Recovery recovery_score(const std::vector<Edge>& top_edges, const GroundTruth& truth, std::size_t c);

nlohmann::json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

}  // namespace sgnn

#endif  // SGNN_SYNTH_H_
