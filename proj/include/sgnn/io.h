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

// File helpers shared by the on-disk formats: whole-file text I/O, JSON
// loading, and explicit little-endian encoding for the binary formats.

#ifndef SGNN_IO_H_
#define SGNN_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace sgnn {

// Throws InputError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view contents);

// Throws InputError on a missing file or a parse failure.
nlohmann::json read_json(const std::filesystem::path& path);
// Two-space indented dump followed by a newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Shortest round-trip decimal form of a double ("%.17g" trimmed).
std::string format_double(double v);

class ByteWriter {
 public:
  void bytes(std::string_view raw);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(std::span<const double> vs);
  const std::string& buffer() const { return buf_; }

 private:
  std::string buf_;
};

// Reads from an in-memory buffer; every accessor throws InputError on
// truncation, naming `what` (usually the file path).
class ByteReader {
 public:
  ByteReader(std::string data, std::string what);
  std::string bytes(std::size_t n);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  void f64s(std::span<double> out);
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n);
  std::string data_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace sgnn

#endif  // SGNN_IO_H_
