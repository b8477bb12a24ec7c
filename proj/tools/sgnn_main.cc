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

// sgnn: single entry point for the signed GNN pipeline.
//
// Exit codes: 0 success, 2 invalid config, 3 missing or malformed input,
// 4 internal invariant violation, 1 anything else.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sgnn/config.h"
#include "sgnn/errors.h"
#include "sgnn/pipeline.h"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string run_dir;
  std::string annotations, lexicon, manifest, labels, graphs, checkpoint, ground_truth, parcel_names,
      output_dir;
  bool quiet = false;
};

std::size_t thread_count() {
  const char* env = std::getenv("SGNN_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) throw sgnn::ConfigError(std::string("SGNN_THREADS must be a positive integer, got '") + env + "'");
  return static_cast<std::size_t>(n);
}

int run(const std::string& command, const Overrides& o) {
  sgnn::RunContext ctx;
  if (!o.config.empty()) ctx.config = sgnn::load_config(o.config);
  auto& paths = ctx.config.paths;
  if (o.seed) ctx.config.seed = *o.seed;
  for (auto [flag, slot] : {std::pair{&o.annotations, &paths.annotations}, {&o.lexicon, &paths.lexicon},
                            {&o.manifest, &paths.manifest}, {&o.labels, &paths.labels},
                            {&o.graphs, &paths.graphs}, {&o.checkpoint, &paths.checkpoint},
                            {&o.ground_truth, &paths.ground_truth}, {&o.parcel_names, &paths.parcel_names},
                            {&o.output_dir, &paths.output_dir}}) {
    if (!flag->empty()) *slot = *flag;
  }
  ctx.threads = thread_count();
  ctx.run_dir = o.run_dir.empty() ? sgnn::timestamped_run_dir(ctx.config, command)
                                     : std::filesystem::path(o.run_dir);
  if (!o.quiet) ctx.log = [](const std::string& line) { std::cerr << line << "\n"; };
  sgnn::run_command(command, ctx);
  std::cout << ctx.run_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretable signed graph neural network for functional-connectivity graphs.\n\n" +
               sgnn::config_help()};
  app.set_version_flag("--version", std::string(sgnn::kVersion));
  app.require_subcommand(1);

  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"fuse-labels", "score images and assign image-level splits -> labels.json"},
      {"build-graphs", "time series + labels -> graphs.bin"},
      {"synth", "planted-subnetwork time series, labels, ground truth and graphs.bin"},
      {"train", "train the model -> checkpoint.bin, history.csv"},
      {"eval", "test-split metrics -> metrics.json"},
      {"explain", "global and class relevance maps -> relevance_*.csv, nodes_*.csv"},
      {"embed", "graph embeddings -> embeddings.csv"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->footer("\n" + sgnn::config_help());
    sub->add_option("-c,--config", o.config, "JSON config file");
    sub->add_option("--seed", o.seed, "override seed");
    sub->add_option("--run-dir", o.run_dir, "write artifacts here instead of a timestamped directory");
    sub->add_option("--annotations", o.annotations, "override paths.annotations");
    sub->add_option("--lexicon", o.lexicon, "override paths.lexicon");
    sub->add_option("--manifest", o.manifest, "override paths.manifest");
    sub->add_option("--labels", o.labels, "override paths.labels");
    sub->add_option("--graphs", o.graphs, "override paths.graphs");
    sub->add_option("--checkpoint", o.checkpoint, "override paths.checkpoint");
    sub->add_option("--ground-truth", o.ground_truth, "override paths.ground_truth");
    sub->add_option("--parcel-names", o.parcel_names, "override paths.parcel_names");
    sub->add_option("--output-dir", o.output_dir, "override paths.output_dir");
    sub->add_flag("-q,--quiet", o.quiet, "no progress lines on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const sgnn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sgnn::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 3;
  } catch (const sgnn::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
