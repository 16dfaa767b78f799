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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsw/estimators.hpp"
#include "lsw/integrator.hpp"
#include "lsw/noise.hpp"
#include "lsw/system.hpp"

namespace lsw::app {

/// Lattice profile description. Kinds:
///   zero
///   point     amplitude (and phase) at `site`
///   gaussian  amplitude * exp(-(m - center)^2 / (2 width^2))
///   box       amplitude on |m - center| <= width
///   values    explicit re (and im) lists of length 2M+1
/// Complex profiles are multiplied by e^{i phase}.
struct ProfileSpec {
  std::string kind = "zero";
  double amplitude = 1.0;
  double phase = 0.0;
  int site = 0;
  double center = 0.0;
  double width = 1.0;
  std::vector<double> re;
  std::vector<double> im;
};

ComplexSeq build_complex(const ProfileSpec& spec, int radius);
RealSeq build_real(const ProfileSpec& spec, int radius);

struct SystemSection {
  double alpha = 1.0;
  double beta = 2.0;
  double lambda = 0.1;
  /// Absolute noise intensity; ignored when epsilon_fraction is set.
  double epsilon = 0.0;
  /// Noise intensity as a fraction of eps0.
  std::optional<double> epsilon_fraction;
  bool coupling = true;
  bool allow_unsafe_epsilon = false;
  ProfileSpec f;
  ProfileSpec g;
  std::vector<ProfileSpec> b;      ///< per mode, missing modes are zero
  std::vector<ProfileSpec> gamma;  ///< per mode, missing modes are zero
};

struct NoiseSection {
  std::string kind = "linear_saturating";
  double scale = 1.0;
  double offset = 0.0;
  std::vector<double> table_r;
  std::vector<double> table_phi;
  int K = 4;
  /// "separable" (c 2^{-k/2} (1+|m|)^{-1} scaled to delta_norm_sq) or "values".
  std::string delta_profile = "separable";
  double delta_norm_sq = 0.5;
  std::vector<std::vector<double>> delta_values;  ///< K lists of 2M+1 values
  std::uint64_t seed = 0;
};

struct InitialSection {
  ProfileSpec u;
  ProfileSpec v;
  double random_scale = 0.0;
  std::optional<ProfileSpec> envelope;
  std::uint64_t seed = 1;
};

struct SimSection {
  int M = 16;
  double dt = 1e-3;
  double T = 1.0;
  int n_paths = 1;
  std::string scheme = "euler_maruyama";
  std::string boundary = "zero_padding";
  std::optional<double> cutoff;
  std::vector<double> cutoff_ladder;
  std::size_t record_stride = 1;
  std::size_t noise_substeps = 1;
  bool store_states = true;
  InitialSection initial;
};

struct ExperimentSection {
  std::vector<int> tail_n;
  std::optional<double> burn_in;  ///< default 5 / kappa
  double avg_T = 10.0;
  std::vector<std::string> observables = {"norm_u_sq", "norm_v_sq", "re_u0", "im_u0", "v0"};
  std::size_t histogram_bins = 50;
  std::vector<std::pair<double, double>> eps_pairs;
  std::vector<double> eps_list;
  std::size_t bootstrap_replicates = 200;
  std::uint64_t bootstrap_seed = 7;
  int operator_radius = 64;
  std::size_t operator_trials = 1000;
  std::size_t cutoff_pairs = 100000;
  double cutoff_level = 2.0;
  std::size_t consistency_paths = 32;
  double oracle_tolerance = 1e-10;
};

struct OutputSection {
  std::optional<std::string> directory;
  std::vector<std::string> formats = {"csv", "binary"};
};

/// Parsed configuration document; every field has the default shown above.
struct RunConfig {
  SystemSection system;
  NoiseSection noise;
  SimSection sim;
  ExperimentSection experiment;
  OutputSection output;
};

/// Strict parse: unknown keys and malformed values raise ConfigError with
/// 1-based line and column of the offending node.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Concrete objects the simulation layer consumes.
struct ResolvedRun {
  SystemParams params;
  DiffusionFamily family;
  SimConfig sim;
  /// Absent only when the dissipativity condition fails under allow_unsafe.
  std::optional<DerivedConstants> derived;

  /// Throws ConfigError naming `purpose` when the constants are absent.
  const DerivedConstants& constants(const std::string& purpose) const;
};

/// Builds the lattice objects and evaluates the constant chain. A failed
/// dissipativity condition or epsilon > eps0 is a ConfigError unless
/// allow_unsafe is set (system.allow_unsafe_epsilon covers the latter only).
ResolvedRun resolve(const RunConfig& config, bool allow_unsafe = false);

/// Full configuration with defaults filled in, for manifests.
nlohmann::json to_json(const RunConfig& config);

}  // namespace lsw::app
