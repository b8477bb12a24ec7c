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

// Edge and node relevance maps.
//
// Global: the learned mask, symmetrized, with node relevance equal to the
// weighted degree. Class-specific: gradient x input saliency of the class
// logit with respect to the original (ungated) adjacency channels,
//
//   S = |∂f_c/∂A+ ⊙ A+| + |∂f_c/∂A- ⊙ A-|,   S̃ = ½(S + Sᵀ) with zero diagonal,
//
// and node relevance equal to the row sums of S̃.

#ifndef SGNN_EXPLAIN_H_
#define SGNN_EXPLAIN_H_

#include <cstddef>
#include <string>
#include <vector>

#include "sgnn/graphs.h"
#include "sgnn/model.h"
#include "sgnn/numerics.h"

namespace sgnn {

struct WeightedEdge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double value = 0.0;

  bool operator==(const WeightedEdge&) const = default;
};

enum class RelevanceKind { kGlobal, kClass };

struct RelevanceMap {
  RelevanceKind kind = RelevanceKind::kGlobal;
  int class_index = -1;
  Matrix edge_values;               // P x P, symmetric
  std::vector<double> node_values;  // row sums of edge_values
  std::vector<WeightedEdge> top_edges;
  // Graphs averaged into a class-level map.
  std::size_t num_graphs = 0;
};

RelevanceMap global_mask_relevance(const Matrix& mask);

RelevanceMap class_saliency(const ModelParams& params, const SignedGraph& graph, int c);

// Mean of per-graph class saliency over graphs of class c in `split` that
// the model classifies correctly. With no such graph the map is all zeros
// and num_graphs is 0.
RelevanceMap aggregate_class_saliency(const ModelParams& params, const GraphDataset& dataset,
                                      int c, Split split = Split::kTest, std::size_t threads = 1);

// The k largest upper-triangle entries, ties broken by (i, j). Throws
// std::invalid_argument when k > P(P-1)/2.
std::vector<WeightedEdge> topk_edges(const RelevanceMap& map, std::size_t k);

struct Consistency {
  Matrix correlations;  // pairwise Pearson of node relevance vectors
  double mean_off_diagonal = 0.0;
};
// Requires at least two maps of equal length. A constant map correlates 0
// with every other map.
Consistency consistency(const std::vector<std::vector<double>>& node_maps);

// "i,j,value" rows for the top edges.
std::string edges_csv(const std::vector<WeightedEdge>& edges);
// "parcel_index,parcel_name,value"; names may be empty.
std::string nodes_csv(const std::vector<double>& node_values, const std::vector<std::string>& names);

}  // namespace sgnn

#endif  // SGNN_EXPLAIN_H_
