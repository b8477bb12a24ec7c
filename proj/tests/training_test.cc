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

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "sgnn/eval.h"
#include "test_util.h"

namespace sgnn {
namespace {

LossConfig plain() {
  LossConfig cfg;
  cfg.label_smoothing = 0.0;
  return cfg;
}

TEST(CeLossTest, PerfectPredictionIsZero) {
  EXPECT_NEAR(ce_loss(Matrix{{1.0, 0.0, 0.0}}, 0, plain()), 0.0, 1e-12);
}

TEST(CeLossTest, UniformPredictionIsLogC) {
  EXPECT_NEAR(ce_loss(Matrix{{1.0 / 3, 1.0 / 3, 1.0 / 3}}, 2, plain()), 1.0986122886681098, 1e-12);
}

TEST(CeLossTest, SmoothedHandValue) {
  LossConfig cfg;
  cfg.label_smoothing = 0.1;
  // Targets: 0.9 + 0.1/3 on the label, 0.1/3 elsewhere.
  const double expect = -(0.9333333333333333 * std::log(0.7) + 0.0333333333333333 * std::log(0.2) +
                          0.0333333333333333 * std::log(0.1));
  EXPECT_NEAR(ce_loss(Matrix{{0.7, 0.2, 0.1}}, 0, cfg), expect, 1e-12);
  cfg.class_weights = {2.0, 1.0, 1.0};
  EXPECT_NEAR(ce_loss(Matrix{{0.7, 0.2, 0.1}}, 0, cfg), 2.0 * expect, 1e-12);
}

TEST(CeLossTest, ClampKeepsZeroProbabilityFinite) {
  LossConfig cfg;
  const double l = ce_loss(Matrix{{1.0, 0.0, 0.0}}, 1, cfg);
  EXPECT_TRUE(std::isfinite(l));
  EXPECT_NEAR(l, -(cfg.label_smoothing / 3 * std::log(1.0) + (0.9 + 0.1 / 3 + 0.1 / 3) * std::log(kMinProb)),
              1e-9);
}

TEST(CeLogitGradTest, ZeroAtSmoothedTarget) {
  LossConfig cfg;
  const double on = 0.9 + 0.1 / 3, off = 0.1 / 3;
  const Matrix g = ce_logit_grad(Matrix{{off, on, off}}, 1, cfg);
  for (double v : g.data()) EXPECT_NEAR(v, 0.0, 1e-15);
}

TEST(MaskPenaltyTest, HandValues) {
  EXPECT_EQ(mask_penalty(Matrix(3, 3, 0.0), 0.1, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(mask_penalty(Matrix(3, 3, 1.0), 0.1, 0.2), 0.1);
  EXPECT_DOUBLE_EQ(mask_penalty(Matrix(3, 3, 0.5), 0.1, 0.2), 0.5 * 0.1 + 0.25 * 0.2);
}

TEST(BackwardTest, MaskGradientIsSymmetric) {
  Rng rng(1);
  const ModelParams p = testing::random_params(testing::dims(6, 3, 5, 5, 4), rng);
  const SignedGraph g = testing::random_graph(6, 15, rng, 1);
  const Gradients gr = backward(forward(g, p), g, 1, p, LossConfig{});
  EXPECT_TRUE(is_symmetric(gr.params.mask_raw, 1e-15));
}

TEST(GradCheckTest, FullModelOnTenSeeds) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const ModelParams p = testing::random_params(testing::dims(6, 3, 5, 5, 4), rng);
    const SignedGraph g = testing::random_graph(6, 15, rng, static_cast<int>(seed % 3));
    const GradCheckReport r = grad_check(p, g, g.label, LossConfig{}, 1e-5);
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed << " worst " << r.worst.tensor << "(" << r.worst.row
                                     << "," << r.worst.col << ") analytic " << r.worst_analytic << " numeric "
                                     << r.worst_numeric;
    // 180 parameter coordinates (tied mask pairs counted once) plus 72 inputs.
    EXPECT_GE(r.checked + r.skipped_kinks, 250u);
  }
}

TEST(GradCheckTest, LinearSliceIsExactToRounding) {
  Rng rng(2);
  const ModelParams p = testing::random_params(testing::dims(5, 3, 4, 4, 3, Activation::kIdentity), rng);
  const SignedGraph g = testing::random_graph(5, 15, rng, 2);
  LossConfig cfg = plain();
  cfg.lambda_l1 = cfg.lambda_binary = 0.0;
  // Only the mask logistic and the softmax remain nonlinear; probe the
  // logit, which is polynomial in every weight.
  const GradCheckReport r = logit_grad_check(p, g, 0, 1e-4);
  EXPECT_EQ(r.skipped_kinks, 0u);
  EXPECT_LT(r.max_rel_error, 1e-8);
}

TEST(GradCheckTest, ErrorShrinksQuadraticallyInH) {
  Rng rng(3);
  const ModelParams p = testing::random_params(testing::dims(6, 3, 5, 5, 4), rng);
  const SignedGraph g = testing::random_graph(6, 15, rng, 0);
  const Gradients gr = backward(forward(g, p), g, 0, p, LossConfig{});
  // The output bias has the largest curvature, so truncation error dominates
  // rounding for h in {1e-3, 1e-4}.
  auto numeric = [&](double h) {
    ModelParams up = p, down = p;
    up.b_mlp_2(0, 0) += h;
    down.b_mlp_2(0, 0) -= h;
    return (sample_loss(up, g, 0, LossConfig{}) - sample_loss(down, g, 0, LossConfig{})) / (2 * h);
  };
  const double exact = gr.params.b_mlp_2(0, 0);
  const double e3 = std::abs(numeric(1e-3) - exact);
  const double e4 = std::abs(numeric(1e-4) - exact);
  const double e5 = std::abs(numeric(1e-5) - exact);
  // One decade of h buys two decades of accuracy until rounding takes over.
  EXPECT_GT(e3 / e4, 50.0);
  EXPECT_LT(e3 / e4, 200.0);
  EXPECT_LT(e5, e4);
}

TEST(RelativeErrorTest, FloorProtectsTinyGradients) {
  EXPECT_NEAR(relative_error(1.0, 1.1), 0.1 / 1.1, 1e-15);
  EXPECT_DOUBLE_EQ(relative_error(0.0, 1e-9), 1e-9 / kGradCheckFloor);
}

TEST(AdamWTest, ZeroGradientZeroDecayIsFixedPoint) {
  Rng rng(4);
  ModelParams p = init_params(testing::dims(4, 2, 3, 3, 2), rng);
  const ModelParams before = p;
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  OptimizerState st = OptimizerState::create(p, cfg);
  adamw_step(p, ModelParams::zeros(p.dims), st);
  EXPECT_EQ(p, before);
}

TEST(AdamWTest, DecoupledDecayShrinksWeightsOnly) {
  Rng rng(5);
  ModelParams p = testing::random_params(testing::dims(4, 2, 3, 3, 2), rng);
  const ModelParams before = p;
  OptimizerConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.5;
  OptimizerState st = OptimizerState::create(p, cfg);
  for (int k = 0; k < 3; ++k) adamw_step(p, ModelParams::zeros(p.dims), st);
  const double factor = std::pow(1.0 - 0.1 * 0.5, 3);
  const auto names = ModelParams::tensor_names();
  for (std::size_t t = 0; t < names.size(); ++t) {
    const auto& now = *p.tensors()[t];
    const auto& was = *before.tensors()[t];
    for (std::size_t i = 0; i < now.size(); ++i) {
      const double want = ModelParams::is_decayed(t) ? was.data()[i] * factor : was.data()[i];
      EXPECT_NEAR(now.data()[i], want, 1e-15) << names[t];
    }
  }
  EXPECT_FALSE(ModelParams::is_decayed(ModelParams::kMaskIndex));
}

TEST(AdamWTest, ScalarHandSteps) {
  ModelParams p = ModelParams::zeros(testing::dims(1, 1, 1, 1, 1));
  p.w_mlp_2(0, 0) = 1.0;
  ModelParams g = ModelParams::zeros(p.dims);
  OptimizerConfig cfg;
  cfg.lr = 0.01;
  cfg.weight_decay = 0.1;
  OptimizerState st = OptimizerState::create(p, cfg);

  g.w_mlp_2(0, 0) = 0.5;
  adamw_step(p, g, st);
  // Step 1: m̂ = g, v̂ = g², so the Adam step is lr * g / (|g| + eps).
  double w = 1.0 * (1 - 0.01 * 0.1) - 0.01 * 0.5 / (0.5 + 1e-8);
  EXPECT_NEAR(p.w_mlp_2(0, 0), w, 1e-15);

  g.w_mlp_2(0, 0) = -0.25;
  adamw_step(p, g, st);
  const double m = 0.9 * (0.1 * 0.5) + 0.1 * -0.25;
  const double v = 0.999 * (0.001 * 0.25) + 0.001 * 0.0625;
  const double mhat = m / (1 - 0.81), vhat = v / (1 - 0.999 * 0.999);
  w = w * (1 - 0.01 * 0.1) - 0.01 * mhat / (std::sqrt(vhat) + 1e-8);
  EXPECT_NEAR(p.w_mlp_2(0, 0), w, 1e-15);
}

TEST(InverseFrequencyTest, WeightsBalanceCounts) {
  const GraphDataset d = testing::synth_dataset(testing::small_synth(0));
  const auto w = inverse_frequency_weights(d);
  ASSERT_EQ(w.size(), 3u);
  for (double v : w) EXPECT_DOUBLE_EQ(v, 1.0);
}

TrainConfig quick(std::uint64_t seed) {
  TrainConfig tc;
  tc.seed = seed;
  tc.max_epochs = 8;
  tc.batch_size = 8;
  tc.optimizer.lr = 3e-3;
  return tc;
}

ModelDims small_dims() { return testing::dims(12, 3, 16, 16, 8); }

TEST(TrainTest, IdenticalSeedsGiveIdenticalHistories) {
  const GraphDataset d = testing::synth_dataset(testing::small_synth(1));
  const TrainResult a = train(d, small_dims(), quick(4));
  const TrainResult b = train(d, small_dims(), quick(4));
  ASSERT_EQ(a.history.epochs.size(), b.history.epochs.size());
  EXPECT_EQ(a.history.to_csv(), b.history.to_csv());
  EXPECT_EQ(a.params, b.params);
}

TEST(TrainTest, ThreadCountDoesNotChangeResults) {
  const GraphDataset d = testing::synth_dataset(testing::small_synth(2));
  TrainConfig tc = quick(5);
  const TrainResult a = train(d, small_dims(), tc);
  tc.threads = 3;
  const TrainResult b = train(d, small_dims(), tc);
  EXPECT_EQ(a.params, b.params);
}

TEST(TrainTest, PatienceZeroStopsAtFirstNonImprovingEpoch) {
  const GraphDataset d = testing::synth_dataset(testing::small_synth(3));
  TrainConfig tc = quick(6);
  tc.patience = 0;
  tc.max_epochs = 200;
  tc.optimizer.lr = 0.5;  // large steps make a non-improving epoch come quickly
  const TrainResult r = train(d, small_dims(), tc);
  ASSERT_EQ(r.history.stop_reason, "early_stopping");
  const auto& e = r.history.epochs;
  ASSERT_GE(e.size(), 2u);
  for (std::size_t k = 1; k + 1 < e.size(); ++k) {
    double best = e[0].val_loss;
    for (std::size_t j = 1; j < k; ++j) best = std::min(best, e[j].val_loss);
    EXPECT_LT(e[k].val_loss, best) << "epoch " << k + 1 << " did not improve yet training continued";
  }
  double best = e[0].val_loss;
  for (std::size_t j = 1; j + 1 < e.size(); ++j) best = std::min(best, e[j].val_loss);
  EXPECT_GE(e.back().val_loss, best);
  EXPECT_EQ(r.history.best_epoch, e.size() - 1);
}

TEST(TrainTest, EasyHarnessReachesHighValidationAccuracyWithin60Epochs) {
  SynthConfig sc;
  sc.seed = 4;
  const GraphDataset d = testing::synth_dataset(sc);
  TrainConfig tc;
  tc.seed = 4;
  tc.max_epochs = 60;
  const TrainResult r = train(d, testing::dims(sc.nodes, sc.classes, 64, 64, 32), tc);
  double best = 0.0;
  for (const auto& e : r.history.epochs) best = std::max(best, e.val_accuracy);
  EXPECT_GE(best, 0.95);
  EXPECT_LE(r.history.epochs.size(), 60u);
}

TEST(TrainTest, HistoryCsvHeader) {
  TrainHistory h;
  h.epochs.push_back({1, 0.5, 0.25, 1.0, 0.5});
  EXPECT_EQ(h.to_csv(), "epoch,train_loss,val_loss,val_acc\n1,0.5,0.25,1\n");
}

}  // namespace
}  // namespace sgnn
