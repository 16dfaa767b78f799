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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "lsw/error.hpp"
#include "lsw/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stochastic long-wave/short-wave lattice simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> output_dir;
  unsigned workers = lsw::default_workers();
  bool allow_unsafe = false;
  bool quiet = false;

  for (std::string_view verb : lsw::app::verbs()) {
    auto* sub = app.add_subcommand(std::string(verb));
    sub->add_option("-c,--config", config_path, "YAML run configuration (defaults if omitted)");
    sub->add_option("-o,--output-dir", output_dir,
                    "Output directory (overrides output.directory and LSW_OUTPUT_DIR)");
    sub->add_option("-w,--workers", workers, "Worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->add_flag("--allow-unsafe", allow_unsafe,
                  "Run even if the dissipativity condition or the eps0 bound fails");
    sub->add_flag("-q,--quiet", quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lsw::app::kExitConfigError;
  }

  lsw::app::RunConfig config;
  try {
    if (!config_path.empty()) config = lsw::app::load_config(config_path);
  } catch (const lsw::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return lsw::app::kExitConfigError;
  }

  lsw::app::RunOptions options;
  options.workers = workers;
  options.output_dir = lsw::app::output_directory(output_dir, config);
  options.allow_unsafe = allow_unsafe;
  options.log = quiet ? nullptr : &std::cout;
  return lsw::app::run_verb(app.get_subcommands().front()->get_name(), config, options);
}
