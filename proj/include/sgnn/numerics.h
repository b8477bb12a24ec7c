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

// Dense row-major matrices and a platform-independent random stream. Every
// other module builds on these two types.

#ifndef SGNN_NUMERICS_H_
#define SGNN_NUMERICS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sgnn {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  // Row-list literal, used mostly by tests: Matrix{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const Matrix& other) const = default;

  // "RxC" for error messages.
  std::string shape_string() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws std::invalid_argument naming both shapes when a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ·b without materializing the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
// a·bᵀ without materializing the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);

void add_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double s);

// ½(a + aᵀ).
Matrix symmetrize(const Matrix& a);
bool is_symmetric(const Matrix& a, double tol = 0.0);
bool all_finite(const Matrix& a);
bool all_finite(std::span<const double> v);
double max_abs_diff(const Matrix& a, const Matrix& b);
double mean(const Matrix& a);

// Throws InvariantError mentioning `what` if any entry is NaN or Inf.
void require_finite(const Matrix& a, const char* what);

// xoshiro256** seeded through splitmix64. The sequence depends only on the
// seed, never on the platform or standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform on [0, n); unbiased (rejection). n must be > 0.
  std::uint64_t below(std::uint64_t n);
  // Box-Muller; the second variate of each pair is cached.
  double normal();

  // Child stream for independent parallel work. Depends only on this
  // stream's seed and the tag, not on how far this stream has advanced.
  Rng fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_;
  std::optional<double> cached_normal_;
};

std::vector<double> normal_draws(Rng& rng, std::size_t n, double mean, double std);

// Fisher-Yates with Rng::below, so the permutation is portable (std::shuffle
// is implementation-defined).
template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

// 64-bit FNV-1a; used for config and file fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace sgnn

#endif  // SGNN_NUMERICS_H_
