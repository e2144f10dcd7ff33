// Copyright (c) 2026 The svkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SVKIT_TOOLS_CLI_HPP
#define SVKIT_TOOLS_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "svkit/protocol/metrics.hpp"

namespace svkit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumeric = 4,
};

enum class ModelChoice { cnn3d, lcn_dvector };

// Settings shared by the pipeline commands.
struct RunConfig {
  ModelChoice model = ModelChoice::cnn3d;
  long zeta = 20;
  std::string depth = "auto";
  int n_dev_speakers = -1;  // synth: -1 keeps the library default
  double learning_rate = 0.01;
  double momentum = 0.9;
  long batch_size = 8;
  int epochs = 20;
  std::uint64_t seed = 0;
  long max_slices = 0;
  std::filesystem::path manifest;
  std::filesystem::path checkpoint;
  std::filesystem::path models;
  std::filesystem::path out;
};

// Entry point shared by main() and the tests. `args` excludes the program
// name. Never throws; failures map to ExitCode values.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Minimal TPR-vs-FAR polyline with the EER point marked.
std::string render_roc_svg(const protocol::RocSummary& roc);

// metrics.json content; zeta and model_kind are null when unknown.
std::string format_metrics_json(const protocol::RocSummary& roc, long zeta,
                                const std::string& model_kind);

}  // namespace svkit::cli

#endif  // SVKIT_TOOLS_CLI_HPP
