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

#include "sgnn/graphs.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sgnn/errors.h"
#include "sgnn/io.h"

namespace sgnn {

std::vector<std::size_t> GraphDataset::class_counts(Split split) const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& g : graphs)
    if (g.split == split) ++counts.at(static_cast<std::size_t>(g.label));
  return counts;
}

std::vector<std::size_t> GraphDataset::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < graphs.size(); ++i)
    if (graphs[i].split == split) out.push_back(i);
  return out;
}

Matrix block_concat(std::span<const TrialTimeSeries> trials, std::size_t k) {
  if (k == 0) throw std::invalid_argument("block_concat: K must be positive");
  if (trials.size() < k) {
    throw std::invalid_argument("block_concat: need " + std::to_string(k) + " trials, got " +
                                std::to_string(trials.size()));
  }
  const std::size_t p = trials[0].data.rows();
  const std::size_t t = trials[0].data.cols();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& tr = trials[i];
    if (tr.data.rows() != p || tr.data.cols() != t) {
      throw std::invalid_argument("block_concat: trial " + tr.trial_id + " has shape " +
                                  tr.data.shape_string() + ", expected " +
                                  trials[0].data.shape_string());
    }
    if (tr.subject_id != trials[0].subject_id) {
      throw std::invalid_argument("block_concat: trials from different subjects");
    }
  }
  Matrix out(p, k * t);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t r = 0; r < p; ++r)
      std::copy_n(trials[i].data.row(r).begin(), t, out.row(r).begin() + i * t);
  return out;
}

Matrix zscore_rows(const Matrix& x) {
  if (x.cols() < 2) throw std::invalid_argument("zscore_rows: need at least 2 columns");
  const double n = static_cast<double>(x.cols());
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    double mu = 0.0;
    for (double v : in) mu += v;
    mu /= n;
    double var = 0.0;
    for (double v : in) var += (v - mu) * (v - mu);
    const double sd = std::sqrt(var / n);
    if (sd <= 1e-12 * std::max(1.0, std::abs(mu))) continue;  // constant row -> zeros
    auto o = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) o[c] = (in[c] - mu) / sd;
  }
  return out;
}

Matrix pearson(const Matrix& z) {
  const std::size_t p = z.rows();
  const double n = static_cast<double>(z.cols());
  std::vector<bool> dead(p);
  for (std::size_t i = 0; i < p; ++i) {
    auto r = z.row(i);
    dead[i] = std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; });
  }
  Matrix a(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    a(i, i) = 1.0;
    if (dead[i]) continue;
    auto ri = z.row(i);
    for (std::size_t j = i + 1; j < p; ++j) {
      if (dead[j]) continue;
      auto rj = z.row(j);
      double s = 0.0;
      for (std::size_t c = 0; c < ri.size(); ++c) s += ri[c] * rj[c];
      const double v = std::clamp(s / n, -1.0, 1.0);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

SignedChannels signed_split(const Matrix& a) {
  SignedChannels out{Matrix(a.rows(), a.cols()), Matrix(a.rows(), a.cols())};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = a.data()[i];
    out.a_plus.data()[i] = std::max(v, 0.0);
    out.a_minus.data()[i] = std::max(-v, 0.0);
  }
  return out;
}

SignedChannels connectivity(std::span<const TrialTimeSeries> trials, std::size_t k) {
  return signed_split(pearson(zscore_rows(block_concat(trials, k))));
}

void check_graph_invariants(const SignedGraph& g) {
  const std::size_t p = g.a_plus.rows();
  auto fail = [&](const std::string& why) {
    throw InvariantError("signed graph (subject " + g.subject_id + ", label " +
                         std::to_string(g.label) + "): " + why);
  };
  if (g.a_plus.cols() != p || g.a_minus.rows() != p || g.a_minus.cols() != p) fail("shape");
  for (std::size_t i = 0; i < p; ++i) {
    if (g.a_plus(i, i) != 1.0 || g.a_minus(i, i) != 0.0) fail("diagonal convention");
    for (std::size_t j = 0; j < p; ++j) {
      const double ap = g.a_plus(i, j);
      const double am = g.a_minus(i, j);
      if (!(ap >= 0.0 && ap <= 1.0 && am >= 0.0 && am <= 1.0)) fail("entry outside [0,1]");
      if (ap * am != 0.0) fail("channels overlap");
      if (ap - am != g.a_plus(j, i) - g.a_minus(j, i)) fail("A+ - A- not symmetric");
    }
  }
}

void check_dataset_invariants(const GraphDataset& d, bool require_balanced_train) {
  std::map<std::string, Split> seen;
  for (const auto& g : d.graphs) {
    if (g.num_nodes() != d.num_nodes) throw InvariantError("dataset: graph size mismatch");
    if (g.label < 0 || static_cast<std::size_t>(g.label) >= d.num_classes) {
      throw InvariantError("dataset: label out of range");
    }
    check_graph_invariants(g);
    for (const auto& id : g.image_ids) {
      auto [it, inserted] = seen.emplace(id, g.split);
      if (!inserted && it->second != g.split) {
        throw InvariantError("dataset: image " + id + " appears in " + split_name(it->second) +
                             " and " + split_name(g.split));
      }
    }
  }
  if (require_balanced_train) {
    auto counts = d.class_counts(Split::kTrain);
    if (!counts.empty() && std::adjacent_find(counts.begin(), counts.end(),
                                              std::not_equal_to<>()) != counts.end()) {
      throw InvariantError("dataset: training split is not class-balanced");
    }
  }
}

void balance_training_split(GraphDataset& d, Rng& rng) {
  auto counts = d.class_counts(Split::kTrain);
  if (counts.empty()) return;
  const std::size_t target = *std::min_element(counts.begin(), counts.end());
  std::vector<bool> keep(d.graphs.size(), true);
  for (std::size_t c = 0; c < d.num_classes; ++c) {
    if (counts[c] == target) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.graphs.size(); ++i)
      if (d.graphs[i].split == Split::kTrain && static_cast<std::size_t>(d.graphs[i].label) == c)
        members.push_back(i);
    shuffle(members, rng);
    for (std::size_t k = target; k < members.size(); ++k) keep[members[k]] = false;
  }
  std::vector<SignedGraph> kept;
  kept.reserve(d.graphs.size());
  for (std::size_t i = 0; i < d.graphs.size(); ++i)
    if (keep[i]) kept.push_back(std::move(d.graphs[i]));
  d.graphs = std::move(kept);
}

GraphDataset assemble_dataset(const std::vector<TrialTimeSeries>& trials, const LabelSet& labels,
                              std::size_t k, Rng& rng) {
  validate(labels);
  if (k == 0) throw std::invalid_argument("assemble_dataset: K must be positive");
  if (trials.empty()) throw std::invalid_argument("assemble_dataset: no trials");

  std::map<std::string, const ScoredImage*> scored;
  for (const auto& img : labels.images) scored[img.image_id] = &img;

  // subject -> trials in presentation order
  std::map<std::string, std::vector<const TrialTimeSeries*>> by_subject;
  for (const auto& tr : trials) {
    if (!scored.contains(tr.image_id) || !labels.splits.contains(tr.image_id)) {
      throw InputError("trial " + tr.trial_id + " references image " + tr.image_id +
                       " which is not in labels");
    }
    by_subject[tr.subject_id].push_back(&tr);
  }
  for (auto& [subject, list] : by_subject) {
    std::stable_sort(list.begin(), list.end(), [](const auto* a, const auto* b) {
      return a->order != b->order ? a->order < b->order : a->trial_id < b->trial_id;
    });
  }

  GraphDataset out;
  out.num_classes = labels.categories.size();
  out.class_names = labels.categories;
  out.num_nodes = trials.front().data.rows();

  for (std::size_t c = 0; c < out.num_classes; ++c) {
    std::size_t blocks_for_class = 0;
    for (Split split : {Split::kTrain, Split::kValidation, Split::kTest}) {
      for (const auto& [subject, list] : by_subject) {
        // Images in order of first presentation, each with its trials.
        std::vector<std::string> image_order;
        std::map<std::string, std::vector<const TrialTimeSeries*>> image_trials;
        for (const auto* tr : list) {
          if (labels.splits.at(tr->image_id) != split) continue;
          if (scored.at(tr->image_id)->count[c] <= 0) continue;
          auto& bucket = image_trials[tr->image_id];
          if (bucket.empty()) image_order.push_back(tr->image_id);
          bucket.push_back(tr);
        }
        // Copy-major stream: round r contains every image with count > r, so
        // copies of one image fall into different blocks when the round is at
        // least K trials long.
        int max_count = 0;
        for (const auto& id : image_order) max_count = std::max(max_count, scored.at(id)->count[c]);
        std::vector<const TrialTimeSeries*> stream;
        for (int r = 0; r < max_count; ++r)
          for (const auto& id : image_order)
            if (scored.at(id)->count[c] > r)
              stream.insert(stream.end(), image_trials[id].begin(), image_trials[id].end());

        for (std::size_t start = 0; start + k <= stream.size(); start += k) {
          std::vector<TrialTimeSeries> block;
          block.reserve(k);
          std::vector<std::string> ids;
          for (std::size_t i = start; i < start + k; ++i) {
            block.push_back(*stream[i]);
            if (std::find(ids.begin(), ids.end(), stream[i]->image_id) == ids.end())
              ids.push_back(stream[i]->image_id);
          }
          auto channels = connectivity(block, k);
          SignedGraph g{std::move(channels.a_plus), std::move(channels.a_minus),
                        static_cast<int>(c), split, subject, std::move(ids)};
          check_graph_invariants(g);
          out.graphs.push_back(std::move(g));
          ++blocks_for_class;
        }
      }
    }
    if (blocks_for_class == 0) {
      throw std::invalid_argument("assemble_dataset: category " + labels.categories[c] +
                                  " yields no complete block of K=" + std::to_string(k) +
                                  " trials");
    }
  }
  balance_training_split(out, rng);
  check_dataset_invariants(out);
  return out;
}

std::string csv_matrix(const Matrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::size_t n = 0;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw InputError(path.string() + ": bad number '" + cell + "'");
      if (!std::isfinite(v)) throw InputError(path.string() + ": non-finite value");
      values.push_back(v);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) throw InputError(path.string() + ": ragged CSV row " + std::to_string(rows + 1));
    ++rows;
  }
  return Matrix(rows, cols, std::move(values));
}

std::vector<TrialTimeSeries> load_time_series(const std::filesystem::path& manifest) {
  const auto j = read_json(manifest);
  const auto base = manifest.parent_path();
  std::vector<TrialTimeSeries> out;
  std::map<std::string, std::pair<std::size_t, std::size_t>> subject_shape;
  try {
    for (const auto& rec : j.at("trials")) {
      TrialTimeSeries tr;
      tr.trial_id = rec.at("trial_id").get<std::string>();
      tr.subject_id = rec.at("subject_id").get<std::string>();
      tr.image_id = rec.at("image_id").is_string() ? rec.at("image_id").get<std::string>()
                                                   : std::to_string(rec.at("image_id").get<long long>());
      tr.order = rec.at("order").get<long>();
      tr.data = read_csv_matrix(base / rec.at("file").get<std::string>());
      auto [it, inserted] =
          subject_shape.emplace(tr.subject_id, std::make_pair(tr.data.rows(), tr.data.cols()));
      if (!inserted && it->second != std::make_pair(tr.data.rows(), tr.data.cols())) {
        throw InputError("trial " + tr.trial_id + ": shape " + tr.data.shape_string() +
                         " differs from other trials of subject " + tr.subject_id);
      }
      out.push_back(std::move(tr));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(manifest.string() + ": " + e.what());
  }
  return out;
}

void save_time_series(const std::filesystem::path& dir, const std::vector<TrialTimeSeries>& trials) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& tr : trials) {
    const std::string file = "trials/" + tr.trial_id + ".csv";
    write_file(dir / file, csv_matrix(tr.data));
    records.push_back({{"trial_id", tr.trial_id},
                       {"subject_id", tr.subject_id},
                       {"image_id", tr.image_id},
                       {"order", tr.order},
                       {"file", file}});
  }
  write_json(dir / "manifest.json", {{"trials", records}});
}

namespace {

constexpr char kGraphsMagic[] = "SGNN1";

}  // namespace

std::string encode_graphs(const GraphDataset& d) {
  ByteWriter w;
  w.bytes(std::string_view(kGraphsMagic, 5));
  w.u32(static_cast<std::uint32_t>(d.num_nodes));
  w.u32(static_cast<std::uint32_t>(d.num_classes));
  w.u64(d.graphs.size());
  for (const auto& g : d.graphs) {
    w.u8(static_cast<std::uint8_t>(g.label));
    w.u8(static_cast<std::uint8_t>(g.split));
    w.f64s(g.a_plus.data());
    w.f64s(g.a_minus.data());
  }
  return w.buffer();
}

GraphDataset decode_graphs(std::string bytes, const std::string& what) {
  ByteReader r(std::move(bytes), what);
  if (r.bytes(5) != std::string_view(kGraphsMagic, 5)) throw InputError(what + ": bad magic");
  GraphDataset d;
  d.num_nodes = r.u32();
  d.num_classes = r.u32();
  const std::uint64_t count = r.u64();
  for (std::uint64_t i = 0; i < count; ++i) {
    SignedGraph g;
    g.label = r.u8();
    const std::uint8_t split = r.u8();
    if (split > 2) throw InputError(what + ": bad split code");
    g.split = static_cast<Split>(split);
    g.a_plus = Matrix(d.num_nodes, d.num_nodes);
    g.a_minus = Matrix(d.num_nodes, d.num_nodes);
    r.f64s(g.a_plus.data());
    r.f64s(g.a_minus.data());
    d.graphs.push_back(std::move(g));
  }
  if (!r.at_end()) throw InputError(what + ": trailing bytes");
  for (std::size_t c = 0; c < d.num_classes; ++c) d.class_names.push_back("class" + std::to_string(c));
  return d;
}

void save_graphs(const std::filesystem::path& path, const GraphDataset& d) {
  write_file(path, encode_graphs(d));
  nlohmann::json graphs = nlohmann::json::array();
  for (const auto& g : d.graphs)
    graphs.push_back({{"subject_id", g.subject_id}, {"image_ids", g.image_ids}});
  write_json(path.string() + ".meta.json", {{"class_names", d.class_names}, {"graphs", graphs}});
}

GraphDataset load_graphs(const std::filesystem::path& path) {
  GraphDataset d = decode_graphs(read_file(path), path.string());
  const std::filesystem::path meta = path.string() + ".meta.json";
  if (std::filesystem::exists(meta)) {
    const auto j = read_json(meta);
    try {
      auto names = j.at("class_names").get<std::vector<std::string>>();
      if (names.size() == d.num_classes) d.class_names = std::move(names);
      const auto& graphs = j.at("graphs");
      if (graphs.size() == d.graphs.size()) {
        for (std::size_t i = 0; i < graphs.size(); ++i) {
          d.graphs[i].subject_id = graphs[i].at("subject_id").get<std::string>();
          d.graphs[i].image_ids = graphs[i].at("image_ids").get<std::vector<std::string>>();
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(meta.string() + ": " + e.what());
    }
  }
  return d;
}

}  // namespace sgnn
