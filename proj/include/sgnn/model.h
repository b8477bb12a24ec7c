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

// Signed graph convolutional classifier.
//
//   M       = logistic(mask_raw)                  shared symmetric edge mask
//   Ã±      = A± ⊙ M
//   H0      = I_P                                 one-hot node identities
//   Hl+1    = relu(Ã+ Hl W+l + Ã- Hl W-l + 1 blᵀ)  l = 0, 1
//   g       = mean over nodes of H2
//   z       = relu(g W_mlp1 + b_mlp1)
//   f       = z W_mlp2 + b_mlp2                    logits
//   ŷ       = softmax(f)
//
// Node features are row vectors; weights map d_in -> d_out on the right.

#ifndef SGNN_MODEL_H_
#define SGNN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sgnn/graphs.h"
#include "sgnn/numerics.h"

namespace sgnn {

enum class Activation : std::uint8_t {
  kRelu = 0,
  // Linear ablation used to check differentiation on a purely linear stack.
  kIdentity = 1,
};

struct ModelDims {
  std::size_t nodes = 0;  // P
  std::size_t classes = 0;  // C
  std::size_t conv1 = 64;
  std::size_t conv2 = 64;
  std::size_t hidden = 32;
  Activation activation = Activation::kRelu;

  bool operator==(const ModelDims&) const = default;
};

struct ModelParams {
  ModelDims dims;
  Matrix mask_raw;   // P x P, symmetric
  Matrix w_plus_1;   // P x d1
  Matrix w_minus_1;  // P x d1
  Matrix b_1;        // 1 x d1
  Matrix w_plus_2;   // d1 x d2
  Matrix w_minus_2;  // d1 x d2
  Matrix b_2;        // 1 x d2
  Matrix w_mlp_1;    // d2 x dh
  Matrix b_mlp_1;    // 1 x dh
  Matrix w_mlp_2;    // dh x C
  Matrix b_mlp_2;    // 1 x C

  // All zeros with the shapes implied by `dims`.
  static ModelParams zeros(const ModelDims& dims);

  // Tensors in their declared (serialization) order.
  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  static const std::vector<std::string>& tensor_names();
  // True for tensors subject to weight decay (conv and MLP weights).
  static bool is_decayed(std::size_t tensor_index);
  static constexpr std::size_t kMaskIndex = 0;

  bool operator==(const ModelParams&) const = default;
};

// Glorot-uniform weights, zero biases, mask_raw = 0 (M = 0.5 everywhere).
ModelParams init_params(const ModelDims& dims, Rng& rng);

// Throws std::invalid_argument if any tensor shape disagrees with dims, and
// InvariantError if mask_raw is asymmetric or any entry is non-finite.
void validate(const ModelParams& params);

struct ForwardCache {
  Matrix mask;                     // M
  Matrix gated_plus, gated_minus;  // Ã±
  Matrix pre_1, act_1;             // layer 1, P x d1
  Matrix prop_plus_2, prop_minus_2;  // Ã± H1, P x d1
  Matrix pre_2, act_2;             // layer 2, P x d2
  Matrix pooled;                   // g, 1 x d2
  Matrix hidden_pre, hidden;       // 1 x dh
  Matrix logits;                   // f, 1 x C
  Matrix probs;                    // ŷ, 1 x C
};

double logistic(double x);
Matrix materialize_mask(const Matrix& mask_raw);

struct GatedAdjacency {
  Matrix plus;
  Matrix minus;
};
GatedAdjacency gate(const Matrix& a_plus, const Matrix& a_minus, const Matrix& mask);

struct ConvOutput {
  Matrix pre;
  Matrix act;
};
ConvOutput signed_conv(const Matrix& h, const Matrix& gated_plus, const Matrix& gated_minus,
                       const Matrix& w_plus, const Matrix& w_minus, const Matrix& bias,
                       Activation activation = Activation::kRelu);

// Numerically stable softmax of a 1 x C row.
Matrix softmax(const Matrix& logits);

ForwardCache forward(const SignedGraph& graph, const ModelParams& params);
// Same computation on bare adjacency channels.
ForwardCache forward(const Matrix& a_plus, const Matrix& a_minus, const ModelParams& params);

// Checkpoint, little-endian:
//   "SGNNCKPT" | P C d1 d2 dh u32 | activation u8 | config_hash u64 | epoch u32 |
//   tensors in declared order, each rows*cols f64 row-major
struct Checkpoint {
  ModelParams params;
  std::uint64_t config_hash = 0;
  std::uint32_t epoch = 0;
};
std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string bytes, const std::string& what = "checkpoint");
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sgnn

#endif  // SGNN_MODEL_H_
