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

// Category labels for stimulus images.
//
// Each image gets, per super-category c, a fused evidence score
//
//   score_c = alpha_c * text_c + (1 - alpha_c) * mask_c
//
// from the fraction of image area covered by c's objects (mask_c) and the
// fraction of caption tokens that are c's terms (text_c). The score becomes a
// sample multiplicity n_c = round(10 * score_c). Train/validation/test splits
// are assigned per image before any duplication, so copies of one image never
// straddle splits.

#ifndef SGNN_LABELS_H_
#define SGNN_LABELS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgnn/numerics.h"

namespace sgnn {

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

const char* split_name(Split s);
// Accepts "train", "validation"/"val", "test". Throws std::invalid_argument.
Split parse_split(const std::string& name);

struct Instance {
  std::string category;
  double area = 0.0;
};

struct ImageAnnotation {
  std::string image_id;
  double image_area = 0.0;
  std::vector<Instance> instances;
  std::vector<std::string> caption;  // lower-cased tokens
};

struct CategoryLexicon {
  std::string name;
  std::set<std::string> object_names;
  std::set<std::string> caption_terms;
  double alpha = 0.5;
};

struct ScoredImage {
  std::string image_id;
  std::vector<double> mask;   // per category, in [0,1]
  std::vector<double> text;   // per category, in [0,1]
  std::vector<double> score;  // per category, in [0,1]
  std::vector<int> count;     // per category, in [0,10]
};

using SplitAssignment = std::map<std::string, Split>;

// Contents of labels.json.
struct LabelSet {
  std::vector<std::string> categories;
  std::vector<double> alpha;
  std::vector<ScoredImage> images;
  SplitAssignment splits;

  // Index of a category name; throws std::invalid_argument if absent.
  std::size_t category_index(const std::string& name) const;
  const ScoredImage* find(const std::string& image_id) const;
};

// Throws std::invalid_argument when image_area is not positive.
double mask_evidence(const ImageAnnotation& ann, const CategoryLexicon& lex);
double text_evidence(const ImageAnnotation& ann, const CategoryLexicon& lex);
// Throws std::invalid_argument if any input lies outside [0,1].
double fuse_score(double text, double mask, double alpha);
// Nearest integer to 10 * score; halves round away from zero.
int duplication_count(double score);

ScoredImage score_image(const ImageAnnotation& ann, std::span<const CategoryLexicon> lexicons);

// Shuffles the ids with `rng` and cuts them into three parts whose sizes are
// the largest-remainder apportionment of ids.size() by `ratios`. Throws on
// duplicate ids or ratios that are not positive and summing to 1.
SplitAssignment split_images(const std::vector<std::string>& ids,
                             const std::array<double, 3>& ratios, Rng& rng);

LabelSet fuse_labels(const std::vector<ImageAnnotation>& annotations,
                     std::span<const CategoryLexicon> lexicons,
                     const std::array<double, 3>& ratios, Rng& rng);

// Throws InvariantError if an image is missing from the split map, a
// ScoredImage violates its score/count laws, or the split lists overlap.
void validate(const LabelSet& labels);

// JSON schemas (see docs/formats.md).
std::vector<ImageAnnotation> annotations_from_json(const nlohmann::json& j);
std::vector<CategoryLexicon> lexicons_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LabelSet& labels);
// Parses and validates; a cross-split image id is an InvariantError.
LabelSet labels_from_json(const nlohmann::json& j);

LabelSet load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelSet& labels);

}  // namespace sgnn

#endif  // SGNN_LABELS_H_
