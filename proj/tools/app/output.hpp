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

#include <chrono>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lsw/lattice.hpp"

namespace lsw::app {

/// Comma-separated table; floating-point cells carry 17 significant digits so
/// values round-trip exactly.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  CsvWriter& cell(double x);
  template <std::integral T>
  CsvWriter& cell(T x) {
    if constexpr (std::is_same_v<T, bool>) {
      return integer(x ? 1 : 0);
    } else if constexpr (std::is_signed_v<T>) {
      return integer(static_cast<std::int64_t>(x));
    } else {
      return unsigned_integer(static_cast<std::uint64_t>(x));
    }
  }
  CsvWriter& cell(std::string_view s);
  void end_row();
  void close();

 private:
  CsvWriter& integer(std::int64_t x);
  CsvWriter& unsigned_integer(std::uint64_t x);
  void sep();

  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

/// Binary trajectory file, little-endian:
///   header  "LSWTRAJ1" | u32 version = 1 | u32 M
///   record  u64 path | f64 t | f64 |u|^2 | f64 |v|^2
///           | (2M+1) x (f64 re u_m, f64 im u_m) | (2M+1) x f64 v_m
/// Records are ordered by path, then time.
class TrajectoryWriter {
 public:
  static constexpr std::uint32_t kVersion = 1;

  TrajectoryWriter(const std::filesystem::path& path, int radius);
  void write(std::uint64_t path, double t, const LatticeState& state);
  void close();

 private:
  void put_u32(std::uint32_t x);
  void put_u64(std::uint64_t x);
  void put_f64(double x);

  std::ofstream out_;
  std::filesystem::path path_;
  int radius_;
};

struct TrajectoryRecord {
  std::uint64_t path = 0;
  double t = 0.0;
  double norm_u_sq = 0.0;
  double norm_v_sq = 0.0;
  LatticeState state;
};

/// Reads a complete trajectory file; throws Error on malformed input.
std::vector<TrajectoryRecord> read_trajectory(const std::filesystem::path& path);

/// Run manifest written next to the outputs. It is rewritten on every status
/// change so an interrupted run is left marked "running".
class Manifest {
 public:
  Manifest(std::filesystem::path directory, std::string verb, nlohmann::json config,
           std::uint64_t seed, unsigned workers);

  /// Records the time since the previous stage (or start) under `name`.
  void stage(const std::string& name);
  void add_output(const std::string& file);
  nlohmann::json& results() { return doc_["results"]; }

  void mark_complete();
  void mark_failed(const std::string& message, int exit_code);

 private:
  void flush();

  std::filesystem::path path_;
  nlohmann::json doc_;
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point last_;
};

/// Version string of this build.
std::string_view code_version();

}  // namespace lsw::app
