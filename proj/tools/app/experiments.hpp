// Copyright 2026 The lswlattice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace lsw::app {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitConfigError = 1,
  kExitBlowUp = 2,
  kExitPropertyFailure = 3,
};

struct RunOptions {
  unsigned workers = 1;
  std::filesystem::path output_dir;
  /// Run even when the dissipativity condition or the eps0 bound fails.
  bool allow_unsafe = false;
  /// Human-readable progress and summaries; nullptr silences them.
  std::ostream* log = nullptr;
};

/// validate-operators, simulate, moments, tails, invariant-measure,
/// eps-sweep, oracle-check.
const std::vector<std::string_view>& verbs();

/// Output directory precedence: explicit flag, output.directory in the
/// configuration, the LSW_OUTPUT_DIR environment variable, "lsw_output".
std::filesystem::path output_directory(const std::optional<std::string>& flag,
                                       const RunConfig& config);

/// Runs one verb and returns its exit code. Configuration problems are
/// reported before any computation starts; once a run has begun its manifest
/// records completion or failure.
int run_verb(std::string_view verb, const RunConfig& config, const RunOptions& options);

}  // namespace lsw::app
