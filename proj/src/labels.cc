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

#include "sgnn/labels.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sgnn/errors.h"
#include "sgnn/io.h"

namespace sgnn {

using nlohmann::json;

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kValidation:
      return "validation";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation" || name == "val") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + name + "'");
}

std::size_t LabelSet::category_index(const std::string& name) const {
  auto it = std::find(categories.begin(), categories.end(), name);
  if (it == categories.end()) throw std::invalid_argument("unknown category '" + name + "'");
  return static_cast<std::size_t>(it - categories.begin());
}

const ScoredImage* LabelSet::find(const std::string& image_id) const {
  for (const auto& img : images)
    if (img.image_id == image_id) return &img;
  return nullptr;
}

double mask_evidence(const ImageAnnotation& ann, const CategoryLexicon& lex) {
  if (!(ann.image_area > 0.0)) {
    throw std::invalid_argument("image " + ann.image_id + ": image_area must be positive");
  }
  double covered = 0.0;
  for (const auto& inst : ann.instances)
    if (lex.object_names.contains(inst.category)) covered += inst.area;
  // Overlapping instance masks can sum past the image area.
  return std::clamp(covered / ann.image_area, 0.0, 1.0);
}

double text_evidence(const ImageAnnotation& ann, const CategoryLexicon& lex) {
  if (ann.caption.empty()) return 0.0;
  const auto hits = std::count_if(ann.caption.begin(), ann.caption.end(),
                                  [&](const std::string& t) { return lex.caption_terms.contains(t); });
  return static_cast<double>(hits) / static_cast<double>(ann.caption.size());
}

double fuse_score(double text, double mask, double alpha) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(text) || !in_unit(mask) || !in_unit(alpha)) {
    throw std::invalid_argument("fuse_score: inputs must lie in [0,1] (text=" +
                                format_double(text) + ", mask=" + format_double(mask) +
                                ", alpha=" + format_double(alpha) + ")");
  }
  return alpha * text + (1.0 - alpha) * mask;
}

int duplication_count(double score) {
  // 10 * 0.35 is 3.4999999999999996 in binary; decide the tie on the decimal
  // value by rounding to 12 digits first.
  const double scaled = std::round(10.0 * score * 1e12) / 1e12;
  return static_cast<int>(std::round(scaled));
}

ScoredImage score_image(const ImageAnnotation& ann, std::span<const CategoryLexicon> lexicons) {
  ScoredImage out;
  out.image_id = ann.image_id;
  for (const auto& lex : lexicons) {
    const double m = mask_evidence(ann, lex);
    const double t = text_evidence(ann, lex);
    const double s = fuse_score(t, m, lex.alpha);
    out.mask.push_back(m);
    out.text.push_back(t);
    out.score.push_back(s);
    out.count.push_back(duplication_count(s));
  }
  return out;
}

SplitAssignment split_images(const std::vector<std::string>& ids,
                             const std::array<double, 3>& ratios, Rng& rng) {
  double total = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("split ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
  {
    std::set<std::string> seen;
    for (const auto& id : ids)
      if (!seen.insert(id).second) throw std::invalid_argument("duplicate image id " + id);
  }

  const std::size_t n = ids.size();
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = ratios[s] * static_cast<double>(n);
    // Guard against 0.7 * 10 landing on 6.999...
    sizes[s] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[s] = exact - static_cast<double>(sizes[s]);
    assigned += sizes[s];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];

  std::vector<std::string> shuffled = ids;
  shuffle(shuffled, rng);
  SplitAssignment out;
  std::size_t pos = 0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t k = 0; k < sizes[s]; ++k) out[shuffled[pos++]] = static_cast<Split>(s);
  return out;
}

LabelSet fuse_labels(const std::vector<ImageAnnotation>& annotations,
                     std::span<const CategoryLexicon> lexicons,
                     const std::array<double, 3>& ratios, Rng& rng) {
  LabelSet out;
  for (const auto& lex : lexicons) {
    out.categories.push_back(lex.name);
    out.alpha.push_back(lex.alpha);
  }
  std::vector<std::string> ids;
  for (const auto& ann : annotations) {
    out.images.push_back(score_image(ann, lexicons));
    ids.push_back(ann.image_id);
  }
  out.splits = split_images(ids, ratios, rng);
  return out;
}

void validate(const LabelSet& labels) {
  const std::size_t c = labels.categories.size();
  if (labels.alpha.size() != c) throw InvariantError("labels: alpha count != category count");
  for (const auto& img : labels.images) {
    if (!labels.splits.contains(img.image_id)) {
      throw InvariantError("labels: image " + img.image_id + " has no split");
    }
    if (img.mask.size() != c || img.text.size() != c || img.score.size() != c ||
        img.count.size() != c) {
      throw InvariantError("labels: image " + img.image_id + " has wrong category arity");
    }
    for (std::size_t k = 0; k < c; ++k) {
      const double expect = labels.alpha[k] * img.text[k] + (1.0 - labels.alpha[k]) * img.mask[k];
      if (std::abs(expect - img.score[k]) > 1e-12 || img.score[k] < 0.0 || img.score[k] > 1.0 ||
          img.count[k] != duplication_count(img.score[k])) {
        throw InvariantError("labels: image " + img.image_id + " violates score law for " +
                             labels.categories[k]);
      }
    }
  }
}

namespace {

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("image_id must be a string or integer");
}

}  // namespace

std::vector<ImageAnnotation> annotations_from_json(const json& j) {
  if (!j.is_array()) throw InputError("annotations: expected a JSON array");
  std::vector<ImageAnnotation> out;
  for (const auto& rec : j) {
    ImageAnnotation ann;
    try {
      ann.image_id = id_string(rec.at("image_id"));
      ann.image_area = rec.at("image_area").get<double>();
      for (const auto& inst : rec.value("instances", json::array())) {
        ann.instances.push_back({inst.at("category").get<std::string>(), inst.at("area").get<double>()});
      }
      for (const auto& tok : rec.value("caption", json::array())) {
        std::string t = tok.get<std::string>();
        std::transform(t.begin(), t.end(), t.begin(),
                       [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
        ann.caption.push_back(std::move(t));
      }
    } catch (const json::exception& e) {
      throw InputError(std::string("annotations: ") + e.what());
    }
    if (!(ann.image_area > 0.0)) throw InputError("annotations: image " + ann.image_id + " has non-positive area");
    for (const auto& inst : ann.instances) {
      if (inst.area < 0.0 || inst.area > ann.image_area) {
        throw InputError("annotations: image " + ann.image_id + " instance area out of range");
      }
    }
    out.push_back(std::move(ann));
  }
  return out;
}

std::vector<CategoryLexicon> lexicons_from_json(const json& j) {
  std::vector<CategoryLexicon> out;
  try {
    for (const auto& rec : j.at("categories")) {
      CategoryLexicon lex;
      lex.name = rec.at("name").get<std::string>();
      lex.object_names = rec.at("objects").get<std::set<std::string>>();
      lex.caption_terms = rec.at("caption_terms").get<std::set<std::string>>();
      lex.alpha = rec.value("alpha", 0.5);
      if (lex.object_names.empty() || lex.caption_terms.empty()) {
        throw InputError("lexicon: category " + lex.name + " has an empty term set");
      }
      if (!(lex.alpha >= 0.0 && lex.alpha <= 1.0)) {
        throw InputError("lexicon: alpha for " + lex.name + " outside [0,1]");
      }
      for (const auto& prev : out)
        if (prev.name == lex.name) throw InputError("lexicon: duplicate category " + lex.name);
      out.push_back(std::move(lex));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("lexicon: ") + e.what());
  }
  if (out.empty()) throw InputError("lexicon: no categories");
  return out;
}

json to_json(const LabelSet& labels) {
  json images = json::array();
  for (const auto& img : labels.images) {
    images.push_back({{"image_id", img.image_id},
                      {"split", split_name(labels.splits.at(img.image_id))},
                      {"mask", img.mask},
                      {"text", img.text},
                      {"score", img.score},
                      {"count", img.count}});
  }
  json splits = {{"train", json::array()}, {"validation", json::array()}, {"test", json::array()}};
  for (const auto& [id, s] : labels.splits) splits[split_name(s)].push_back(id);
  return {{"categories", labels.categories},
          {"alpha", labels.alpha},
          {"images", images},
          {"splits", splits}};
}

LabelSet labels_from_json(const json& j) {
  LabelSet out;
  try {
    out.categories = j.at("categories").get<std::vector<std::string>>();
    out.alpha = j.at("alpha").get<std::vector<double>>();
    for (const auto& rec : j.at("images")) {
      ScoredImage img;
      img.image_id = id_string(rec.at("image_id"));
      img.mask = rec.at("mask").get<std::vector<double>>();
      img.text = rec.at("text").get<std::vector<double>>();
      img.score = rec.at("score").get<std::vector<double>>();
      img.count = rec.at("count").get<std::vector<int>>();
      out.images.push_back(std::move(img));
    }
    for (const char* name : {"train", "validation", "test"}) {
      const Split s = parse_split(name);
      for (const auto& id : j.at("splits").at(name)) {
        const std::string key = id_string(id);
        auto [it, inserted] = out.splits.emplace(key, s);
        if (!inserted) {
          throw InvariantError("labels: image " + key + " appears in both " +
                               split_name(it->second) + " and " + name);
        }
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("labels: ") + e.what());
  }
  validate(out);
  return out;
}

LabelSet load_labels(const std::filesystem::path& path) { return labels_from_json(read_json(path)); }

void save_labels(const std::filesystem::path& path, const LabelSet& labels) {
  validate(labels);
  write_json(path, to_json(labels));
}

}  // namespace sgnn
