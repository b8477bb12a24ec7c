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

#ifndef SGNN_ERRORS_H_
#define SGNN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sgnn {

// Error taxonomy. The CLI maps each type to a distinct exit status; library
// code throws std::invalid_argument for plain precondition violations
// (dimension mismatches, out-of-range arguments).

// Malformed or unknown configuration field. CLI exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A required input file is missing or unreadable. CLI exit 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant was found broken (non-finite values, asymmetric
// mask, leaked split). CLI exit 4.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sgnn

#endif  // SGNN_ERRORS_H_
