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

#include <gtest/gtest.h>

#include "sgnn/graphs.h"
#include "sgnn/training.h"
#include "test_util.h"

namespace sgnn {
namespace {

TEST(GlobalRelevanceTest, SymmetricMaskIsKept) {
  Rng rng(1);
  Matrix m(5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i; j < 5; ++j) m(i, j) = m(j, i) = rng.uniform();
  EXPECT_EQ(global_mask_relevance(m).edge_values, m);
}

TEST(GlobalRelevanceTest, HalfMaskNodeSums) {
  for (double r : global_mask_relevance(Matrix(4, 4, 0.5)).node_values) EXPECT_EQ(r, 2.0);
}

TEST(GlobalRelevanceTest, NodeValuesMatchLoopOracle) {
  Rng rng(2);
  Matrix m(6, 6);
  for (double& v : m.data()) v = rng.uniform();
  const RelevanceMap map = global_mask_relevance(m);
  for (std::size_t i = 0; i < 6; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 6; ++j) s += 0.5 * (m(i, j) + m(j, i));
    EXPECT_NEAR(map.node_values[i], s, 1e-12);
  }
}

TEST(ClassSaliencyTest, ZeroInputGivesZeroMap) {
  Rng rng(3);
  const ModelParams p = testing::random_params(testing::dims(5, 3, 4, 4, 3), rng);
  SignedGraph g = testing::random_graph(5, 20, rng);
  g.a_plus = Matrix(5, 5);
  g.a_minus = Matrix(5, 5);
  EXPECT_EQ(class_saliency(p, g, 1).edge_values, Matrix(5, 5));
}

TEST(ClassSaliencyTest, SymmetricWithZeroDiagonal) {
  Rng rng(4);
  for (int n = 0; n < 10; ++n) {
    const ModelParams p = testing::random_params(testing::dims(6, 3, 5, 5, 4), rng);
    const SignedGraph g = testing::random_graph(6, 20, rng);
    const RelevanceMap map = class_saliency(p, g, n % 3);
    EXPECT_TRUE(is_symmetric(map.edge_values));
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(map.edge_values(i, i), 0.0);
    for (double v : map.edge_values.data()) EXPECT_GE(v, 0.0);
  }
}

TEST(ClassSaliencyTest, InputGradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(10 + seed);
    const ModelParams p = testing::random_params(testing::dims(6, 3, 5, 5, 4), rng);
    const SignedGraph g = testing::random_graph(6, 20, rng);
    for (int c = 0; c < 3; ++c) EXPECT_LT(logit_grad_check(p, g, c, 1e-5).max_rel_error, 1e-4);
  }
}

TEST(ClassSaliencyTest, SaliencyIsGradientTimesInput) {
  Rng rng(5);
  const ModelParams p = testing::random_params(testing::dims(5, 2, 4, 4, 3), rng);
  const SignedGraph g = testing::random_graph(5, 20, rng);
  const InputGradients grad = logit_input_gradients(p, g, 0);
  const RelevanceMap map = class_saliency(p, g, 0);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == j) continue;
      auto s = [&](std::size_t a, std::size_t b) {
        return std::abs(grad.plus(a, b) * g.a_plus(a, b)) + std::abs(grad.minus(a, b) * g.a_minus(a, b));
      };
      EXPECT_NEAR(map.edge_values(i, j), 0.5 * (s(i, j) + s(j, i)), 1e-15);
    }
}

TEST(AggregateSaliencyTest, AveragesOnlyCorrectlyClassifiedGraphs) {
  const GraphDataset d = testing::synth_dataset(testing::small_synth(6));
  Rng rng(6);
  const ModelParams p = testing::random_params(testing::dims(12, 3, 4, 4, 3), rng);
  for (int c = 0; c < 3; ++c) {
    Matrix sum(12, 12);
    std::size_t n = 0;
    for (const auto& g : d.graphs) {
      if (g.split != Split::kTest || g.label != c) continue;
      const auto probs = forward(g, p).probs;
      if (std::max_element(probs.data().begin(), probs.data().end()) - probs.data().begin() != c) continue;
      add_inplace(sum, class_saliency(p, g, c).edge_values);
      ++n;
    }
    const RelevanceMap agg = aggregate_class_saliency(p, d, c, Split::kTest, 2);
    EXPECT_EQ(agg.num_graphs, n);
    if (n > 0) scale_inplace(sum, 1.0 / static_cast<double>(n));
    EXPECT_LT(max_abs_diff(agg.edge_values, sum), 1e-15);
  }
}

TEST(TopkTest, AllEdgesSortedAndTieBreak) {
  Matrix m(4, 4);
  m(0, 1) = m(1, 0) = 0.5;
  m(2, 3) = m(3, 2) = 0.5;
  m(0, 3) = m(3, 0) = 0.9;
  RelevanceMap map;
  map.edge_values = m;
  const auto all = topk_edges(map, 6);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all[0], (WeightedEdge{0, 3, 0.9}));
  EXPECT_EQ(all[1], (WeightedEdge{0, 1, 0.5}));
  EXPECT_EQ(all[2], (WeightedEdge{2, 3, 0.5}));
  EXPECT_EQ(all[3], (WeightedEdge{0, 2, 0.0}));
  EXPECT_THROW(topk_edges(map, 7), std::invalid_argument);
}

TEST(TopkTest, MatchesFullSortOracle) {
  Rng rng(7);
  for (int n = 0; n < 100; ++n) {
    const std::size_t p = 3 + rng.below(8);
    RelevanceMap map;
    map.edge_values = Matrix(p, p);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j)
        map.edge_values(i, j) = map.edge_values(j, i) = static_cast<double>(rng.below(5));
    std::vector<WeightedEdge> oracle;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j) oracle.push_back({i, j, map.edge_values(i, j)});
    std::stable_sort(oracle.begin(), oracle.end(),
                     [](const WeightedEdge& a, const WeightedEdge& b) { return a.value > b.value; });
    const std::size_t k = rng.below(oracle.size() + 1);
    oracle.resize(k);
    EXPECT_EQ(topk_edges(map, k), oracle);
  }
}

TEST(ConsistencyTest, IdenticalAndNegatedMaps) {
  const std::vector<double> a = {1, 3, 2, 5};
  const std::vector<double> neg = {-1, -3, -2, -5};
  const Consistency same = consistency({a, a, a});
  EXPECT_NEAR(same.mean_off_diagonal, 1.0, 1e-15);
  EXPECT_NEAR(consistency({a, neg}).correlations(0, 1), -1.0, 1e-15);
  EXPECT_EQ(consistency({a, {2, 2, 2, 2}}).correlations(0, 1), 0.0);
}

TEST(ConsistencyTest, MatchesPearsonOnStackedVectors) {
  Rng rng(8);
  Matrix stacked(5, 12);
  std::vector<std::vector<double>> maps(5, std::vector<double>(12));
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 12; ++j) maps[i][j] = stacked(i, j) = rng.normal();
  const Matrix oracle = pearson(zscore_rows(stacked));
  EXPECT_LT(max_abs_diff(consistency(maps).correlations, oracle), 1e-12);
}

TEST(CsvTest, Layouts) {
  EXPECT_EQ(edges_csv({{0, 2, 0.5}}), "i,j,value\n0,2,0.5\n");
  EXPECT_EQ(nodes_csv({1.5, 2}, {"L_V1", "R_V1"}), "parcel_index,parcel_name,value\n0,L_V1,1.5\n1,R_V1,2\n");
  EXPECT_EQ(nodes_csv({1.5}, {}), "parcel_index,parcel_name,value\n0,,1.5\n");
}

}  // namespace
}  // namespace sgnn
