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

#include "sgnn/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgnn/errors.h"
#include "sgnn/io.h"

namespace sgnn {

ModelParams ModelParams::zeros(const ModelDims& d) {
  ModelParams p;
  p.dims = d;
  p.mask_raw = Matrix(d.nodes, d.nodes);
  p.w_plus_1 = Matrix(d.nodes, d.conv1);
  p.w_minus_1 = Matrix(d.nodes, d.conv1);
  p.b_1 = Matrix(1, d.conv1);
  p.w_plus_2 = Matrix(d.conv1, d.conv2);
  p.w_minus_2 = Matrix(d.conv1, d.conv2);
  p.b_2 = Matrix(1, d.conv2);
  p.w_mlp_1 = Matrix(d.conv2, d.hidden);
  p.b_mlp_1 = Matrix(1, d.hidden);
  p.w_mlp_2 = Matrix(d.hidden, d.classes);
  p.b_mlp_2 = Matrix(1, d.classes);
  return p;
}

std::vector<Matrix*> ModelParams::tensors() {
  return {&mask_raw, &w_plus_1, &w_minus_1, &b_1,     &w_plus_2, &w_minus_2,
          &b_2,      &w_mlp_1,  &b_mlp_1,   &w_mlp_2, &b_mlp_2};
}

std::vector<const Matrix*> ModelParams::tensors() const {
  return {&mask_raw, &w_plus_1, &w_minus_1, &b_1,     &w_plus_2, &w_minus_2,
          &b_2,      &w_mlp_1,  &b_mlp_1,   &w_mlp_2, &b_mlp_2};
}

const std::vector<std::string>& ModelParams::tensor_names() {
  static const std::vector<std::string> kNames = {
      "mask_raw", "w_plus_1", "w_minus_1", "b_1",     "w_plus_2", "w_minus_2",
      "b_2",      "w_mlp_1",  "b_mlp_1",   "w_mlp_2", "b_mlp_2"};
  return kNames;
}

bool ModelParams::is_decayed(std::size_t i) {
  switch (i) {
    case 1:  // w_plus_1
    case 2:  // w_minus_1
    case 4:  // w_plus_2
    case 5:  // w_minus_2
    case 7:  // w_mlp_1
    case 9:  // w_mlp_2
      return true;
    default:
      return false;
  }
}

namespace {

void glorot(Matrix& w, Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double& v : w.data()) v = rng.uniform(-s, s);
}

}  // namespace

ModelParams init_params(const ModelDims& dims, Rng& rng) {
  if (dims.nodes == 0 || dims.classes == 0 || dims.conv1 == 0 || dims.conv2 == 0 ||
      dims.hidden == 0) {
    throw std::invalid_argument("init_params: all model dimensions must be positive");
  }
  ModelParams p = ModelParams::zeros(dims);
  for (Matrix* w : {&p.w_plus_1, &p.w_minus_1, &p.w_plus_2, &p.w_minus_2, &p.w_mlp_1, &p.w_mlp_2})
    glorot(*w, rng);
  return p;
}

void validate(const ModelParams& params) {
  const ModelParams shapes = ModelParams::zeros(params.dims);
  const auto want = shapes.tensors();
  const auto have = params.tensors();
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (want[i]->rows() != have[i]->rows() || want[i]->cols() != have[i]->cols()) {
      throw std::invalid_argument("model params: " + ModelParams::tensor_names()[i] + " is " +
                                  have[i]->shape_string() + ", expected " +
                                  want[i]->shape_string());
    }
    require_finite(*have[i], ModelParams::tensor_names()[i].c_str());
  }
  if (!is_symmetric(params.mask_raw)) throw InvariantError("model params: mask_raw is not symmetric");
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix materialize_mask(const Matrix& mask_raw) {
  Matrix m(mask_raw.rows(), mask_raw.cols());
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = logistic(mask_raw.data()[i]);
  return m;
}

GatedAdjacency gate(const Matrix& a_plus, const Matrix& a_minus, const Matrix& mask) {
  return {hadamard(a_plus, mask), hadamard(a_minus, mask)};
}

ConvOutput signed_conv(const Matrix& h, const Matrix& gated_plus, const Matrix& gated_minus,
                       const Matrix& w_plus, const Matrix& w_minus, const Matrix& bias,
                       Activation activation) {
  if (w_plus.rows() != h.cols() || w_minus.rows() != h.cols() || w_plus.cols() != w_minus.cols() ||
      bias.size() != w_plus.cols()) {
    throw std::invalid_argument("signed_conv: features " + h.shape_string() + ", W+ " +
                                w_plus.shape_string() + ", W- " + w_minus.shape_string() +
                                ", bias " + bias.shape_string() + " are incompatible");
  }
  ConvOutput out;
  out.pre = matmul(matmul(gated_plus, h), w_plus);
  add_inplace(out.pre, matmul(matmul(gated_minus, h), w_minus));
  for (std::size_t i = 0; i < out.pre.rows(); ++i) {
    auto r = out.pre.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias.data()[j];
  }
  out.act = out.pre;
  if (activation == Activation::kRelu)
    for (double& v : out.act.data()) v = std::max(v, 0.0);
  return out;
}

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) z += (o[c] = std::exp(in[c] - mx));
    for (double& v : o) v /= z;
  }
  return out;
}

ForwardCache forward(const SignedGraph& graph, const ModelParams& params) {
  return forward(graph.a_plus, graph.a_minus, params);
}

ForwardCache forward(const Matrix& a_plus, const Matrix& a_minus, const ModelParams& params) {
  const auto& d = params.dims;
  if (a_plus.rows() != d.nodes || a_plus.cols() != d.nodes || a_minus.rows() != d.nodes ||
      a_minus.cols() != d.nodes) {
    throw std::invalid_argument("forward: adjacency " + a_plus.shape_string() + "/" +
                                a_minus.shape_string() + " does not match model with P=" +
                                std::to_string(d.nodes));
  }
  if (params.mask_raw.rows() != d.nodes || params.w_mlp_2.cols() != d.classes) {
    throw std::invalid_argument("forward: parameters do not match their declared dims");
  }
  ForwardCache c;
  c.mask = materialize_mask(params.mask_raw);
  auto gated = gate(a_plus, a_minus, c.mask);
  c.gated_plus = std::move(gated.plus);
  c.gated_minus = std::move(gated.minus);

  // With H0 = I the first propagation Ã± H0 is Ã± itself.
  auto l1 = signed_conv(Matrix::identity(d.nodes), c.gated_plus, c.gated_minus, params.w_plus_1,
                        params.w_minus_1, params.b_1, d.activation);
  c.pre_1 = std::move(l1.pre);
  c.act_1 = std::move(l1.act);

  c.prop_plus_2 = matmul(c.gated_plus, c.act_1);
  c.prop_minus_2 = matmul(c.gated_minus, c.act_1);
  auto l2 = signed_conv(c.act_1, c.gated_plus, c.gated_minus, params.w_plus_2, params.w_minus_2,
                        params.b_2, d.activation);
  c.pre_2 = std::move(l2.pre);
  c.act_2 = std::move(l2.act);

  c.pooled = Matrix(1, d.conv2);
  for (std::size_t i = 0; i < d.nodes; ++i) {
    auto r = c.act_2.row(i);
    for (std::size_t j = 0; j < d.conv2; ++j) c.pooled(0, j) += r[j];
  }
  scale_inplace(c.pooled, 1.0 / static_cast<double>(d.nodes));

  c.hidden_pre = matmul(c.pooled, params.w_mlp_1);
  add_inplace(c.hidden_pre, params.b_mlp_1);
  c.hidden = c.hidden_pre;
  if (d.activation == Activation::kRelu)
    for (double& v : c.hidden.data()) v = std::max(v, 0.0);

  c.logits = matmul(c.hidden, params.w_mlp_2);
  add_inplace(c.logits, params.b_mlp_2);
  c.probs = softmax(c.logits);
  require_finite(c.probs, "forward");
  return c;
}

namespace {

constexpr char kCheckpointMagic[] = "SGNNCKPT";

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
  validate(ckpt.params);
  const auto& d = ckpt.params.dims;
  ByteWriter w;
  w.bytes(std::string_view(kCheckpointMagic, 8));
  for (std::size_t v : {d.nodes, d.classes, d.conv1, d.conv2, d.hidden})
    w.u32(static_cast<std::uint32_t>(v));
  w.u8(static_cast<std::uint8_t>(d.activation));
  w.u64(ckpt.config_hash);
  w.u32(ckpt.epoch);
  for (const Matrix* t : ckpt.params.tensors()) w.f64s(t->data());
  return w.buffer();
}

Checkpoint decode_checkpoint(std::string bytes, const std::string& what) {
  ByteReader r(std::move(bytes), what);
  if (r.bytes(8) != std::string_view(kCheckpointMagic, 8)) throw InputError(what + ": bad magic");
  ModelDims d;
  d.nodes = r.u32();
  d.classes = r.u32();
  d.conv1 = r.u32();
  d.conv2 = r.u32();
  d.hidden = r.u32();
  const std::uint8_t act = r.u8();
  if (act > 1) throw InputError(what + ": unknown activation code");
  d.activation = static_cast<Activation>(act);
  Checkpoint ckpt;
  ckpt.config_hash = r.u64();
  ckpt.epoch = r.u32();
  ckpt.params = ModelParams::zeros(d);
  for (Matrix* t : ckpt.params.tensors()) r.f64s(t->data());
  if (!r.at_end()) throw InputError(what + ": trailing bytes");
  validate(ckpt.params);
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

}  // namespace sgnn
