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

// Subcommand bodies behind the sgnn CLI. Each reads its inputs (explicit
// config paths, else default names inside the run directory), writes its
// artifacts into the run directory, and records <command>.run.json with the
// resolved config hash, seed and code version.

#ifndef SGNN_PIPELINE_H_
#define SGNN_PIPELINE_H_

#include <filesystem>
#include <functional>
#include <string>

#include "sgnn/config.h"

namespace sgnn {

inline constexpr char kVersion[] = "0.1.0";

struct RunContext {
  RunConfig config;
  std::filesystem::path run_dir;
  std::size_t threads = 1;
  // Progress lines; silent when empty.
  std::function<void(const std::string&)> log;
};

void run_fuse_labels(const RunContext& ctx);
void run_build_graphs(const RunContext& ctx);
void run_synth(const RunContext& ctx);
void run_train(const RunContext& ctx);
void run_eval(const RunContext& ctx);
void run_explain(const RunContext& ctx);
void run_embed(const RunContext& ctx);

// Dispatches by subcommand name; throws std::invalid_argument for an unknown
// one.
void run_command(const std::string& command, const RunContext& ctx);

// <output_dir>/<UTC yyyymmdd-HHMMSS>-<command>
std::filesystem::path timestamped_run_dir(const RunConfig& cfg, const std::string& command);

}  // namespace sgnn

#endif  // SGNN_PIPELINE_H_
