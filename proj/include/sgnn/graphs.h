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

// Block-level signed connectivity graphs.
//
// K trials of one subject and category are concatenated along time, each
// parcel row is z-scored, and the Pearson matrix of the block is split into a
// positive channel A+ = max(A, 0) and a negative channel A- = max(-A, 0).

#ifndef SGNN_GRAPHS_H_
#define SGNN_GRAPHS_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgnn/labels.h"
#include "sgnn/numerics.h"

namespace sgnn {

struct TrialTimeSeries {
  std::string subject_id;
  std::string trial_id;
  std::string image_id;
  long order = 0;  // presentation order within the subject
  Matrix data;     // P x T
};

struct SignedGraph {
  Matrix a_plus;   // P x P, entries in [0,1], unit diagonal
  Matrix a_minus;  // P x P, entries in [0,1], zero diagonal
  int label = 0;
  Split split = Split::kTrain;
  std::string subject_id;
  std::vector<std::string> image_ids;

  std::size_t num_nodes() const { return a_plus.rows(); }
};

struct GraphDataset {
  std::vector<SignedGraph> graphs;
  std::size_t num_nodes = 0;
  std::size_t num_classes = 0;
  std::vector<std::string> class_names;

  std::vector<std::size_t> class_counts(Split split) const;
  std::vector<std::size_t> indices(Split split) const;
};

// Horizontal concatenation of exactly k trials, in the given order.
Matrix block_concat(std::span<const TrialTimeSeries> trials, std::size_t k);

// Per-row z-score with the population standard deviation. Rows whose spread
// is negligible relative to their mean become all zeros.
Matrix zscore_rows(const Matrix& x);

// Correlation of z-scored rows: (1/n)<row_i, row_j>, clipped to [-1, 1].
// All-zero rows correlate 0 with everything; the diagonal is always 1.
Matrix pearson(const Matrix& z);

struct SignedChannels {
  Matrix a_plus;
  Matrix a_minus;
};
SignedChannels signed_split(const Matrix& a);

// block_concat -> zscore_rows -> pearson -> signed_split.
SignedChannels connectivity(std::span<const TrialTimeSeries> trials, std::size_t k);

// Throws InvariantError naming the violated law: range, disjoint support,
// symmetry of A+ - A-, diagonal convention.
void check_graph_invariants(const SignedGraph& g);
// Per-graph invariants plus equal train class counts and no image id shared
// between splits.
void check_dataset_invariants(const GraphDataset& d, bool require_balanced_train = true);

// Groups trials into consecutive k-blocks within each (category, split,
// subject), honoring duplication counts from `labels`, then downsamples the
// training split to the smallest class count. See docs/pipeline.md for the
// exact grouping rule.
GraphDataset assemble_dataset(const std::vector<TrialTimeSeries>& trials, const LabelSet& labels,
                              std::size_t k, Rng& rng);

// Downsamples the training split of `d` in place to equal class counts.
void balance_training_split(GraphDataset& d, Rng& rng);

// Per-trial CSV files plus manifest.json; file paths in the manifest are
// relative to the manifest's directory.
std::vector<TrialTimeSeries> load_time_series(const std::filesystem::path& manifest);
void save_time_series(const std::filesystem::path& dir, const std::vector<TrialTimeSeries>& trials);
Matrix read_csv_matrix(const std::filesystem::path& path);
std::string csv_matrix(const Matrix& m);

// graphs.bin, little-endian:
//   "SGNN1" | P u32 | C u32 | count u64 |
//   per graph: label u8 | split u8 | A+ P*P f64 | A- P*P f64
std::string encode_graphs(const GraphDataset& d);
GraphDataset decode_graphs(std::string bytes, const std::string& what = "graphs.bin");
void save_graphs(const std::filesystem::path& path, const GraphDataset& d);
// Also reads the optional "<path>.meta.json" sidecar (class names, subjects,
// image ids) when it exists.
GraphDataset load_graphs(const std::filesystem::path& path);

}  // namespace sgnn

#endif  // SGNN_GRAPHS_H_
