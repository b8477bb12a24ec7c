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


#include "sgnn/io.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "sgnn/errors.h"
#include "test_util.h"

namespace sgnn {
namespace {

TEST(FormatDoubleTest, RoundTripsShortest) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(0.5), "0.5");
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
  }
}

TEST(BytesTest, RoundTripLittleEndian) {
  ByteWriter w;
  w.u8(7);
  w.u32(0x01020304);
  w.u64(0x1122334455667788ULL);
  w.f64(-1.5);
  const double xs[] = {1.0, std::numeric_limits<double>::denorm_min()};
  w.f64s(xs);
  EXPECT_EQ(w.buffer()[1], '\x04');  // least significant byte first
  ByteReader r(w.buffer(), "buf");
  EXPECT_EQ(r.u8(), 7);
  EXPECT_EQ(r.u32(), 0x01020304u);
  EXPECT_EQ(r.u64(), 0x1122334455667788ULL);
  EXPECT_EQ(r.f64(), -1.5);
  double back[2];
  r.f64s(back);
  EXPECT_EQ(back[1], xs[1]);
  EXPECT_TRUE(r.at_end());
  EXPECT_THROW(r.u8(), InputError);
}

TEST(FileTest, MissingFileIsInputError) {
  EXPECT_THROW(read_file("/nonexistent/sgnn/file"), InputError);
}

TEST(FileTest, JsonRoundTripCreatesDirectories) {
  const auto dir = testing::scratch_dir("io");
  write_json(dir / "a" / "b.json", {{"x", 1}});
  EXPECT_EQ(read_json(dir / "a" / "b.json")["x"], 1);
}

}  // namespace
}  // namespace sgnn
