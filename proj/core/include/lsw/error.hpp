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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lsw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands defined on lattices of different radius (or mode counts).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration. When the problem can be traced to a
/// configuration document, `line` and `column` are 1-based; 0 means unknown.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"
                       : what),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

/// Non-finite state produced by time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(std::uint64_t path, std::size_t step, double time)
      : Error("numerical blow-up on path " + std::to_string(path) + " at step " +
              std::to_string(step) + " (t = " + std::to_string(time) +
              "); reduce dt or the noise intensity"),
        path_(path),
        step_(step),
        time_(time) {}

  std::uint64_t path() const noexcept { return path_; }
  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::uint64_t path_;
  std::size_t step_;
  double time_;
};

/// Problem too large for a dense reference computation.
class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsw
