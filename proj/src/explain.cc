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

#include "sgnn/explain.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgnn/io.h"
#include "sgnn/parallel.h"
#include "sgnn/training.h"

namespace sgnn {

namespace {

std::vector<double> row_sums(const Matrix& m) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (double v : m.row(i)) out[i] += v;
  return out;
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

RelevanceMap global_mask_relevance(const Matrix& mask) {
  RelevanceMap map;
  map.kind = RelevanceKind::kGlobal;
  map.edge_values = symmetrize(mask);
  map.node_values = row_sums(map.edge_values);
  return map;
}

RelevanceMap class_saliency(const ModelParams& params, const SignedGraph& graph, int c) {
  const InputGradients grad = logit_input_gradients(params, graph, c);
  const std::size_t p = graph.num_nodes();
  Matrix s(p, p);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.data()[i] = std::abs(grad.plus.data()[i] * graph.a_plus.data()[i]) +
                  std::abs(grad.minus.data()[i] * graph.a_minus.data()[i]);
  }
  RelevanceMap map;
  map.kind = RelevanceKind::kClass;
  map.class_index = c;
  map.edge_values = symmetrize(s);
  for (std::size_t i = 0; i < p; ++i) map.edge_values(i, i) = 0.0;
  map.node_values = row_sums(map.edge_values);
  map.num_graphs = 1;
  return map;
}

RelevanceMap aggregate_class_saliency(const ModelParams& params, const GraphDataset& dataset,
                                      int c, Split split, std::size_t threads) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < dataset.graphs.size(); ++i) {
    const auto& g = dataset.graphs[i];
    if (g.split == split && g.label == c) members.push_back(i);
  }
  std::vector<Matrix> maps(members.size());
  std::vector<bool> correct(members.size(), false);
  parallel_for(members.size(), threads, [&](std::size_t k) {
    const auto& g = dataset.graphs[members[k]];
    if (static_cast<int>(argmax(forward(g, params).probs.data())) != c) return;
    correct[k] = true;
    maps[k] = class_saliency(params, g, c).edge_values;
  });

  const std::size_t p = dataset.num_nodes;
  RelevanceMap out;
  out.kind = RelevanceKind::kClass;
  out.class_index = c;
  out.edge_values = Matrix(p, p);
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (!correct[k]) continue;
    add_inplace(out.edge_values, maps[k]);
    ++out.num_graphs;
  }
  if (out.num_graphs > 0) scale_inplace(out.edge_values, 1.0 / static_cast<double>(out.num_graphs));
  out.node_values = row_sums(out.edge_values);
  return out;
}

std::vector<WeightedEdge> topk_edges(const RelevanceMap& map, std::size_t k) {
  const std::size_t p = map.edge_values.rows();
  const std::size_t pairs = p * (p - (p > 0 ? 1 : 0)) / 2;
  if (k > pairs) {
    throw std::invalid_argument("topk_edges: k=" + std::to_string(k) + " exceeds the " +
                                std::to_string(pairs) + " available edges");
  }
  std::vector<WeightedEdge> edges;
  edges.reserve(pairs);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) edges.push_back({i, j, map.edge_values(i, j)});
  auto before = [](const WeightedEdge& a, const WeightedEdge& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  };
  std::partial_sort(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(k), edges.end(),
                    before);
  edges.resize(k);
  return edges;
}

Consistency consistency(const std::vector<std::vector<double>>& node_maps) {
  if (node_maps.size() < 2) throw std::invalid_argument("consistency: need at least two maps");
  const std::size_t n = node_maps[0].size();
  for (const auto& m : node_maps)
    if (m.size() != n) throw std::invalid_argument("consistency: maps differ in length");

  // Centered vectors and their norms; a constant map has norm 0.
  std::vector<std::vector<double>> centered;
  std::vector<double> norms;
  for (const auto& m : node_maps) {
    double mu = 0.0;
    for (double v : m) mu += v;
    mu /= static_cast<double>(n);
    std::vector<double> c(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = m[i] - mu;
      ss += c[i] * c[i];
    }
    centered.push_back(std::move(c));
    norms.push_back(std::sqrt(ss));
  }

  const std::size_t s = node_maps.size();
  Consistency out;
  out.correlations = Matrix(s, s);
  double off = 0.0;
  for (std::size_t a = 0; a < s; ++a) {
    out.correlations(a, a) = 1.0;
    for (std::size_t b = a + 1; b < s; ++b) {
      double r = 0.0;
      const double denom = norms[a] * norms[b];
      if (denom > 1e-300 && norms[a] > 1e-12 && norms[b] > 1e-12) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
        r = std::clamp(dot / denom, -1.0, 1.0);
      }
      out.correlations(a, b) = r;
      out.correlations(b, a) = r;
      off += 2.0 * r;
    }
  }
  out.mean_off_diagonal = off / static_cast<double>(s * (s - 1));
  return out;
}

std::string edges_csv(const std::vector<WeightedEdge>& edges) {
  std::string out = "i,j,value\n";
  for (const auto& e : edges)
    out += std::to_string(e.i) + "," + std::to_string(e.j) + "," + format_double(e.value) + "\n";
  return out;
}

std::string nodes_csv(const std::vector<double>& node_values, const std::vector<std::string>& names) {
  std::string out = "parcel_index,parcel_name,value\n";
  for (std::size_t i = 0; i < node_values.size(); ++i) {
    out += std::to_string(i) + "," + (i < names.size() ? names[i] : std::string()) + "," +
           format_double(node_values[i]) + "\n";
  }
  return out;
}

}  // namespace sgnn
