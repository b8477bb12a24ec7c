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

#include "sgnn/training.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "sgnn/errors.h"
#include "sgnn/io.h"
#include "sgnn/parallel.h"

namespace sgnn {

void validate(const LossConfig& cfg, std::size_t num_classes) {
  if (!(cfg.label_smoothing >= 0.0 && cfg.label_smoothing < 1.0)) {
    throw std::invalid_argument("label_smoothing must lie in [0, 1)");
  }
  if (!(cfg.lambda_l1 >= 0.0) || !(cfg.lambda_binary >= 0.0)) {
    throw std::invalid_argument("mask penalty weights must be >= 0");
  }
  if (!cfg.class_weights.empty()) {
    if (cfg.class_weights.size() != num_classes) {
      throw std::invalid_argument("class_weights has " + std::to_string(cfg.class_weights.size()) +
                                  " entries for " + std::to_string(num_classes) + " classes");
    }
    for (double w : cfg.class_weights)
      if (!(w > 0.0)) throw std::invalid_argument("class weights must be positive");
  }
}

namespace {

double class_weight(const LossConfig& cfg, int label) {
  return cfg.class_weights.empty() ? 1.0 : cfg.class_weights[static_cast<std::size_t>(label)];
}

void check_label(const Matrix& probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size()) {
    throw std::invalid_argument("label " + std::to_string(label) + " out of range for " +
                                std::to_string(probs.size()) + " classes");
  }
}

double smoothed_target(std::size_t c, int label, double eps, std::size_t num_classes) {
  return (static_cast<int>(c) == label ? 1.0 - eps : 0.0) + eps / static_cast<double>(num_classes);
}

double relu_grad(double pre, Activation a) {
  if (a == Activation::kIdentity) return 1.0;
  return pre > 0.0 ? 1.0 : 0.0;
}

void mask_by_activation(Matrix& upstream, const Matrix& pre, Activation a) {
  if (a == Activation::kIdentity) return;
  for (std::size_t i = 0; i < upstream.size(); ++i)
    upstream.data()[i] *= relu_grad(pre.data()[i], a);
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) out(0, j) += r[j];
  }
  return out;
}

}  // namespace

double ce_loss(const Matrix& probs, int label, const LossConfig& cfg) {
  check_label(probs, label);
  const std::size_t n = probs.size();
  double loss = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double t = smoothed_target(c, label, cfg.label_smoothing, n);
    if (t == 0.0) continue;
    loss -= t * std::log(std::max(probs.data()[c], kMinProb));
  }
  return class_weight(cfg, label) * loss;
}

Matrix ce_logit_grad(const Matrix& probs, int label, const LossConfig& cfg) {
  check_label(probs, label);
  const std::size_t n = probs.size();
  const double w = class_weight(cfg, label);
  // ∂L/∂log ŷ_c, zero where the clamp is active.
  std::vector<double> dlog(n);
  double total = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const double t = smoothed_target(c, label, cfg.label_smoothing, n);
    dlog[c] = probs.data()[c] > kMinProb ? -w * t : 0.0;
    total += dlog[c];
  }
  Matrix out(1, n);
  for (std::size_t k = 0; k < n; ++k) out(0, k) = dlog[k] - probs.data()[k] * total;
  return out;
}

double mask_penalty(const Matrix& mask, double lambda_l1, double lambda_binary) {
  if (mask.empty()) return 0.0;
  double l1 = 0.0;
  double binary = 0.0;
  for (double m : mask.data()) {
    l1 += std::abs(m);
    binary += m * (1.0 - m);
  }
  const double n = static_cast<double>(mask.size());
  return lambda_l1 * l1 / n + lambda_binary * binary / n;
}

Matrix mask_penalty_grad(const Matrix& mask, double lambda_l1, double lambda_binary) {
  Matrix out(mask.rows(), mask.cols());
  const double n = static_cast<double>(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const double m = mask.data()[i];
    const double sign = m > 0.0 ? 1.0 : (m < 0.0 ? -1.0 : 0.0);
    out.data()[i] = (lambda_l1 * sign + lambda_binary * (1.0 - 2.0 * m)) / n;
  }
  return out;
}

Gradients backward_from_logits(const ForwardCache& cache, const Matrix& a_plus,
                               const Matrix& a_minus, const ModelParams& params,
                               const Matrix& dlogits, const Matrix& mask_upstream,
                               bool want_input_grads) {
  const auto& d = params.dims;
  if (cache.logits.size() != d.classes || cache.act_2.rows() != d.nodes ||
      cache.act_2.cols() != d.conv2 || cache.hidden.size() != d.hidden ||
      dlogits.size() != d.classes) {
    throw std::invalid_argument("backward: forward cache does not match the parameters");
  }
  const Activation act = d.activation;
  Gradients g;
  g.params.dims = d;
  auto& gp = g.params;

  // Output layer.
  gp.w_mlp_2 = matmul_tn(cache.hidden, dlogits);
  gp.b_mlp_2 = dlogits;
  Matrix d_hidden = matmul_nt(dlogits, params.w_mlp_2);
  mask_by_activation(d_hidden, cache.hidden_pre, act);
  gp.w_mlp_1 = matmul_tn(cache.pooled, d_hidden);
  gp.b_mlp_1 = d_hidden;
  Matrix d_pooled = matmul_nt(d_hidden, params.w_mlp_1);

  // Mean pooling spreads ∂g evenly over nodes.
  Matrix d_pre_2(d.nodes, d.conv2);
  const double inv_p = 1.0 / static_cast<double>(d.nodes);
  for (std::size_t i = 0; i < d.nodes; ++i)
    for (std::size_t j = 0; j < d.conv2; ++j) d_pre_2(i, j) = d_pooled(0, j) * inv_p;
  mask_by_activation(d_pre_2, cache.pre_2, act);

  // Layer 2: pre_2 = (Ã+ H1) W+2 + (Ã- H1) W-2 + b2.
  gp.w_plus_2 = matmul_tn(cache.prop_plus_2, d_pre_2);
  gp.w_minus_2 = matmul_tn(cache.prop_minus_2, d_pre_2);
  gp.b_2 = column_sums(d_pre_2);
  const Matrix d_prop_plus = matmul_nt(d_pre_2, params.w_plus_2);
  const Matrix d_prop_minus = matmul_nt(d_pre_2, params.w_minus_2);
  Matrix d_gated_plus = matmul_nt(d_prop_plus, cache.act_1);
  Matrix d_gated_minus = matmul_nt(d_prop_minus, cache.act_1);
  Matrix d_pre_1 = matmul_tn(cache.gated_plus, d_prop_plus);
  add_inplace(d_pre_1, matmul_tn(cache.gated_minus, d_prop_minus));
  mask_by_activation(d_pre_1, cache.pre_1, act);

  // Layer 1 with H0 = I: pre_1 = Ã+ W+1 + Ã- W-1 + b1.
  gp.w_plus_1 = matmul_tn(cache.gated_plus, d_pre_1);
  gp.w_minus_1 = matmul_tn(cache.gated_minus, d_pre_1);
  gp.b_1 = column_sums(d_pre_1);
  add_inplace(d_gated_plus, matmul_nt(d_pre_1, params.w_plus_1));
  add_inplace(d_gated_minus, matmul_nt(d_pre_1, params.w_minus_1));

  // Gating Ã± = A± ⊙ M.
  if (want_input_grads) {
    g.input_plus = hadamard(d_gated_plus, cache.mask);
    g.input_minus = hadamard(d_gated_minus, cache.mask);
  }
  Matrix d_mask = hadamard(d_gated_plus, a_plus);
  add_inplace(d_mask, hadamard(d_gated_minus, a_minus));
  if (!mask_upstream.empty()) add_inplace(d_mask, mask_upstream);

  // Logistic chain rule, then fold the tied symmetric pairs.
  const std::size_t p = d.nodes;
  Matrix per_entry(p, p);
  for (std::size_t i = 0; i < per_entry.size(); ++i) {
    const double m = cache.mask.data()[i];
    per_entry.data()[i] = d_mask.data()[i] * m * (1.0 - m);
  }
  gp.mask_raw = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    gp.mask_raw(i, i) = per_entry(i, i);
    for (std::size_t j = i + 1; j < p; ++j) {
      const double s = per_entry(i, j) + per_entry(j, i);
      gp.mask_raw(i, j) = s;
      gp.mask_raw(j, i) = s;
    }
  }
  return g;
}

Gradients backward(const ForwardCache& cache, const SignedGraph& graph, int label,
                   const ModelParams& params, const LossConfig& cfg, bool want_input_grads) {
  const Matrix dlogits = ce_logit_grad(cache.probs, label, cfg);
  const Matrix dmask = mask_penalty_grad(cache.mask, cfg.lambda_l1, cfg.lambda_binary);
  return backward_from_logits(cache, graph.a_plus, graph.a_minus, params, dlogits, dmask,
                              want_input_grads);
}

InputGradients logit_input_gradients(const ModelParams& params, const SignedGraph& graph, int c) {
  if (c < 0 || static_cast<std::size_t>(c) >= params.dims.classes) {
    throw std::invalid_argument("class index " + std::to_string(c) + " out of range");
  }
  const ForwardCache cache = forward(graph, params);
  Matrix onehot(1, params.dims.classes);
  onehot(0, static_cast<std::size_t>(c)) = 1.0;
  Gradients g = backward_from_logits(cache, graph.a_plus, graph.a_minus, params, onehot, Matrix(),
                                     /*want_input_grads=*/true);
  return {std::move(g.input_plus), std::move(g.input_minus)};
}

double sample_loss(const ModelParams& params, const SignedGraph& graph, int label,
                   const LossConfig& cfg) {
  const ForwardCache cache = forward(graph, params);
  return ce_loss(cache.probs, label, cfg) +
         mask_penalty(cache.mask, cfg.lambda_l1, cfg.lambda_binary);
}

OptimizerState OptimizerState::create(const ModelParams& like, const OptimizerConfig& cfg) {
  OptimizerState s;
  s.cfg = cfg;
  s.m = ModelParams::zeros(like.dims);
  s.v = ModelParams::zeros(like.dims);
  return s;
}

void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state) {
  const auto& cfg = state.cfg;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);

  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k]->size() != g[k]->size() || p[k]->size() != m[k]->size()) {
      throw std::invalid_argument("adamw_step: shape mismatch in " + ModelParams::tensor_names()[k]);
    }
    const bool decay = ModelParams::is_decayed(k) && cfg.weight_decay != 0.0;
    auto pd = p[k]->data();
    auto gd = g[k]->data();
    auto md = m[k]->data();
    auto vd = v[k]->data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
      md[i] = cfg.beta1 * md[i] + (1.0 - cfg.beta1) * gd[i];
      vd[i] = cfg.beta2 * vd[i] + (1.0 - cfg.beta2) * gd[i] * gd[i];
      if (decay) pd[i] *= 1.0 - cfg.lr * cfg.weight_decay;
      const double m_hat = md[i] / bias1;
      const double v_hat = vd[i] / bias2;
      pd[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
  params.mask_raw = symmetrize(params.mask_raw);
}

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_loss,val_loss,val_acc\n";
  for (const auto& e : epochs) {
    out += std::to_string(e.epoch) + "," + format_double(e.train_loss) + "," +
           format_double(e.val_loss) + "," + format_double(e.val_accuracy) + "\n";
  }
  return out;
}

std::vector<double> inverse_frequency_weights(const GraphDataset& dataset) {
  const auto counts = dataset.class_counts(Split::kTrain);
  std::vector<double> w(counts.size(), 1.0);
  double total = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    w[c] = 1.0 / static_cast<double>(counts[c]);
    total += w[c];
    ++present;
  }
  if (present == 0) return w;
  const double mean = total / static_cast<double>(present);
  for (std::size_t c = 0; c < counts.size(); ++c) w[c] = counts[c] == 0 ? 1.0 : w[c] / mean;
  return w;
}

LossAndAccuracy evaluate_split(const ModelParams& params, const GraphDataset& dataset,
                               const std::vector<std::size_t>& indices, const LossConfig& cfg,
                               std::size_t threads) {
  if (indices.empty()) return {};
  std::vector<double> losses(indices.size());
  std::vector<int> correct(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t k) {
    const auto& g = dataset.graphs[indices[k]];
    const ForwardCache cache = forward(g, params);
    losses[k] = ce_loss(cache.probs, g.label, cfg) +
                mask_penalty(cache.mask, cfg.lambda_l1, cfg.lambda_binary);
    auto probs = cache.probs.data();
    const auto pred = std::max_element(probs.begin(), probs.end()) - probs.begin();
    correct[k] = pred == g.label ? 1 : 0;
  });
  LossAndAccuracy out;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.loss += losses[k];
    out.accuracy += correct[k];
  }
  out.loss /= static_cast<double>(indices.size());
  out.accuracy /= static_cast<double>(indices.size());
  return out;
}

TrainResult train(const GraphDataset& dataset, const ModelDims& dims_in, const TrainConfig& cfg,
                  const EpochCallback& on_epoch) {
  const auto train_idx = dataset.indices(Split::kTrain);
  const auto val_idx = dataset.indices(Split::kValidation);
  if (train_idx.empty()) throw std::invalid_argument("train: training split is empty");
  if (val_idx.empty()) throw std::invalid_argument("train: validation split is empty");
  if (cfg.batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");

  ModelDims dims = dims_in;
  dims.nodes = dataset.num_nodes;
  dims.classes = dataset.num_classes;

  TrainResult result;
  LossConfig loss = cfg.loss;
  if (loss.class_weights.empty()) loss.class_weights = inverse_frequency_weights(dataset);
  validate(loss, dims.classes);
  result.class_weights = loss.class_weights;

  Rng root(cfg.seed);
  Rng init_rng = root.fork(1);
  Rng order_rng = root.fork(2);
  ModelParams params = init_params(dims, init_rng);
  OptimizerState opt = OptimizerState::create(params, cfg.optimizer);
  result.params = params;

  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  result.history.stop_reason = "max_epochs";

  std::vector<std::size_t> order = train_idx;
  std::vector<Gradients> per_graph;
  std::vector<double> per_graph_loss;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle(order, order_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - start);
      per_graph.assign(n, Gradients{});
      per_graph_loss.assign(n, 0.0);
      parallel_for(n, cfg.threads, [&](std::size_t k) {
        const auto& g = dataset.graphs[order[start + k]];
        const ForwardCache cache = forward(g, params);
        per_graph_loss[k] = ce_loss(cache.probs, g.label, loss) +
                            mask_penalty(cache.mask, loss.lambda_l1, loss.lambda_binary);
        per_graph[k] = backward(cache, g, g.label, params, loss, /*want_input_grads=*/false);
      });
      // Fixed-order reduction keeps results independent of thread count.
      ModelParams sum = ModelParams::zeros(dims);
      auto st = sum.tensors();
      for (std::size_t k = 0; k < n; ++k) {
        auto gt = per_graph[k].params.tensors();
        for (std::size_t t = 0; t < st.size(); ++t) add_inplace(*st[t], *gt[t]);
        epoch_loss += per_graph_loss[k];
      }
      for (Matrix* t : st) scale_inplace(*t, 1.0 / static_cast<double>(n));
      adamw_step(params, sum, opt);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(order.size());
    const auto val = evaluate_split(params, dataset, val_idx, loss, cfg.threads);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    rec.mask_mean = mean(materialize_mask(params.mask_raw));
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    for (const Matrix* t : params.tensors()) require_finite(*t, "train");
    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      since_best = 0;
      result.history.best_epoch = epoch;
      result.params = params;
    } else if (++since_best > cfg.patience) {
      result.history.stop_reason = "early_stopping";
      break;
    }
  }
  return result;
}

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

// On/off state of every ReLU unit in a forward pass.
std::vector<bool> relu_pattern(const ForwardCache& c) {
  std::vector<bool> out;
  out.reserve(c.pre_1.size() + c.pre_2.size() + c.hidden_pre.size());
  for (const Matrix* m : {&c.pre_1, &c.pre_2, &c.hidden_pre})
    for (double v : m->data()) out.push_back(v > 0.0);
  return out;
}

struct Probe {
  double value;
  std::vector<bool> pattern;
};

// Runs the central-difference sweep. `objective` evaluates the scalar at the
// given params and inputs; analytic values come from `grads`.
template <typename Objective>
GradCheckReport sweep(const ModelParams& params, const SignedGraph& graph, const Gradients& grads,
                      bool include_params, double h, Objective objective) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: h must be positive");
  GradCheckReport report;
  const auto base_pattern = relu_pattern(forward(graph, params));
  const bool has_kinks = params.dims.activation == Activation::kRelu;

  auto consider = [&](const Coordinate& coord, double analytic, const Probe& up,
                      const Probe& down) {
    if (has_kinks && (up.pattern != base_pattern || down.pattern != base_pattern)) {
      ++report.skipped_kinks;
      return;
    }
    const double numeric = (up.value - down.value) / (2.0 * h);
    const double err = relative_error(analytic, numeric);
    ++report.checked;
    if (report.checked == 1 || err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst = coord;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
  };

  if (include_params) {
    const auto names = ModelParams::tensor_names();
    for (std::size_t t = 0; t < names.size(); ++t) {
      const Matrix& base = *params.tensors()[t];
      const Matrix& analytic = *grads.params.tensors()[t];
      const bool tied = t == ModelParams::kMaskIndex;
      for (std::size_t i = 0; i < base.rows(); ++i) {
        for (std::size_t j = tied ? i : 0; j < base.cols(); ++j) {
          auto probe = [&](double delta) {
            ModelParams q = params;
            Matrix& target = *q.tensors()[t];
            target(i, j) += delta;
            if (tied && i != j) target(j, i) += delta;
            return objective(q, graph.a_plus, graph.a_minus);
          };
          consider({names[t], i, j}, analytic(i, j), probe(h), probe(-h));
        }
      }
    }
  }

  const std::size_t p = graph.num_nodes();
  for (int channel = 0; channel < 2; ++channel) {
    const Matrix& analytic = channel == 0 ? grads.input_plus : grads.input_minus;
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        auto probe = [&](double delta) {
          Matrix ap = graph.a_plus;
          Matrix am = graph.a_minus;
          (channel == 0 ? ap : am)(i, j) += delta;
          return objective(params, ap, am);
        };
        consider({channel == 0 ? "a_plus" : "a_minus", i, j}, analytic(i, j), probe(h), probe(-h));
      }
    }
  }
  return report;
}

}  // namespace

GradCheckReport grad_check(const ModelParams& params, const SignedGraph& graph, int label,
                           const LossConfig& cfg, double h) {
  const ForwardCache cache = forward(graph, params);
  const Gradients grads = backward(cache, graph, label, params, cfg, /*want_input_grads=*/true);
  return sweep(params, graph, grads, /*include_params=*/true, h,
               [&](const ModelParams& q, const Matrix& ap, const Matrix& am) {
                 const ForwardCache c = forward(ap, am, q);
                 return Probe{ce_loss(c.probs, label, cfg) +
                                  mask_penalty(c.mask, cfg.lambda_l1, cfg.lambda_binary),
                              relu_pattern(c)};
               });
}

GradCheckReport logit_grad_check(const ModelParams& params, const SignedGraph& graph, int c,
                                 double h) {
  InputGradients in = logit_input_gradients(params, graph, c);
  Gradients grads;
  grads.input_plus = std::move(in.plus);
  grads.input_minus = std::move(in.minus);
  const auto k = static_cast<std::size_t>(c);
  return sweep(params, graph, grads, /*include_params=*/false, h,
               [&](const ModelParams& q, const Matrix& ap, const Matrix& am) {
                 const ForwardCache fc = forward(ap, am, q);
                 return Probe{fc.logits(0, k), relu_pattern(fc)};
               });
}

}  // namespace sgnn
