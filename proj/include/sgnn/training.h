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

// Loss, hand-written reverse-mode gradients, AdamW and the training loop.
//
// Per-sample objective:
//
//   L = w[y] * -Σ_c t_c log ŷ_c  +  λ1 mean|M|  +  λe mean(M ⊙ (1 - M))
//
// with smoothed target t = (1 - ε) onehot(y) + ε / C. mask_raw is a tied
// symmetric parameter: entry (i, j) and (j, i) are one coordinate, so its
// gradient is G + Gᵀ off the diagonal, where G is the per-entry gradient.

#ifndef SGNN_TRAINING_H_
#define SGNN_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sgnn/graphs.h"
#include "sgnn/model.h"

namespace sgnn {

struct LossConfig {
  double label_smoothing = 0.1;
  // Empty: derive inverse-frequency weights from the training split.
  std::vector<double> class_weights;
  double lambda_l1 = 1e-3;
  double lambda_binary = 1e-3;
};

void validate(const LossConfig& cfg, std::size_t num_classes);

// Clamp for log ŷ.
inline constexpr double kMinProb = 1e-12;

// Throws std::invalid_argument if label is out of range.
double ce_loss(const Matrix& probs, int label, const LossConfig& cfg);
// ∂ce_loss/∂logits given ŷ = softmax(logits); exact including the clamp.
Matrix ce_logit_grad(const Matrix& probs, int label, const LossConfig& cfg);

double mask_penalty(const Matrix& mask, double lambda_l1, double lambda_binary);
// ∂mask_penalty/∂M, per entry.
Matrix mask_penalty_grad(const Matrix& mask, double lambda_l1, double lambda_binary);

struct Gradients {
  ModelParams params;  // same shapes as the model
  Matrix input_plus;   // ∂/∂A+, P x P (empty unless requested)
  Matrix input_minus;  // ∂/∂A-
};

// Reverse pass from an arbitrary upstream ∂/∂logits. `mask_upstream`, when
// non-empty, is added to ∂/∂M before the logistic chain rule (the mask
// penalty enters here).
Gradients backward_from_logits(const ForwardCache& cache, const Matrix& a_plus,
                               const Matrix& a_minus, const ModelParams& params,
                               const Matrix& dlogits, const Matrix& mask_upstream,
                               bool want_input_grads);

// Exact gradient of the per-sample objective above.
Gradients backward(const ForwardCache& cache, const SignedGraph& graph, int label,
                   const ModelParams& params, const LossConfig& cfg, bool want_input_grads = true);

// ∂f_c/∂A± of the raw logit, for saliency.
struct InputGradients {
  Matrix plus;
  Matrix minus;
};
InputGradients logit_input_gradients(const ModelParams& params, const SignedGraph& graph, int c);

double sample_loss(const ModelParams& params, const SignedGraph& graph, int label,
                   const LossConfig& cfg);

struct OptimizerConfig {
  double lr = 3e-4;
  double weight_decay = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct OptimizerState {
  OptimizerConfig cfg;
  ModelParams m;  // first moments
  ModelParams v;  // second moments
  std::uint64_t step = 0;

  static OptimizerState create(const ModelParams& like, const OptimizerConfig& cfg);
};

// Decoupled weight decay on conv/MLP weights only; mask_raw is re-symmetrized
// after the update.
void adamw_step(ModelParams& params, const ModelParams& grads, OptimizerState& state);

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  // Worker threads for per-graph gradients; results do not depend on it.
  std::size_t threads = 1;
  OptimizerConfig optimizer;
  LossConfig loss;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  double mask_mean = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  std::string stop_reason;  // "early_stopping" or "max_epochs"

  std::string to_csv() const;
};

struct TrainResult {
  ModelParams params;  // from the best epoch
  TrainHistory history;
  std::vector<double> class_weights;  // as used
};

// Inverse training-split frequency, normalized to mean 1.
std::vector<double> inverse_frequency_weights(const GraphDataset& dataset);

// Mean objective and accuracy over the given graph indices.
struct LossAndAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};
LossAndAccuracy evaluate_split(const ModelParams& params, const GraphDataset& dataset,
                               const std::vector<std::size_t>& indices, const LossConfig& cfg,
                               std::size_t threads = 1);

// Called after every epoch; used by the CLI for progress output.
using EpochCallback = std::function<void(const EpochRecord&)>;

// Throws std::invalid_argument if the training or validation split is empty.
TrainResult train(const GraphDataset& dataset, const ModelDims& dims, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Finite-difference verification.
struct Coordinate {
  std::string tensor;  // parameter name, "a_plus" or "a_minus"
  std::size_t row = 0;
  std::size_t col = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  Coordinate worst;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
  // Coordinates whose ±h probe changed some ReLU's on/off state.
  std::size_t skipped_kinks = 0;
};

// |a - n| / max(|a|, |n|, floor). Below `floor` the comparison is absolute.
inline constexpr double kGradCheckFloor = 1e-6;
double relative_error(double analytic, double numeric, double floor = kGradCheckFloor);

// Central differences of sample_loss over every parameter coordinate (tied
// mask pairs perturbed together) and every A± entry.
GradCheckReport grad_check(const ModelParams& params, const SignedGraph& graph, int label,
                           const LossConfig& cfg, double h);

// Central differences of the raw logit f_c over every A± entry, against
// logit_input_gradients.
GradCheckReport logit_grad_check(const ModelParams& params, const SignedGraph& graph, int c,
                                 double h);

}  // namespace sgnn

#endif  // SGNN_TRAINING_H_
