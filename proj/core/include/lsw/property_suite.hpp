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
#include <functional>
#include <string>
#include <vector>

#include "lsw/integrator.hpp"
#include "lsw/lattice.hpp"
#include "lsw/noise.hpp"
#include "lsw/system.hpp"
#include "lsw/truncation.hpp"

namespace lsw {

struct PropertyCheck {
  std::string name;
  std::size_t trials = 0;
  double worst = 0.0;      ///< largest normalized residual (or ratio) observed
  double tolerance = 0.0;  ///< pass iff worst <= tolerance
  bool passed = false;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;

  bool passed() const;
  void append(const PropertyReport& other);
  const PropertyCheck* find(const std::string& name) const;
};

/// Difference operators under test. Replacing a member lets fixtures verify
/// that a broken operator is caught.
struct OperatorSet {
  std::function<ComplexSeq(const ComplexSeq&, Boundary)> A;
  std::function<ComplexSeq(const ComplexSeq&, Boundary)> B;
  std::function<ComplexSeq(const ComplexSeq&, Boundary)> B_star;

  static OperatorSet standard();
};

struct OperatorSuiteOptions {
  int radius = 64;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double tolerance = 1e-12;
};

/// Randomized checks of the difference-operator identities, residuals scaled
/// by 1 + operand norms:
///   (Bu, w) = (u, B* w) for both boundaries
///   A = B* B and (Au, u) = |Bu|^2 with periodic wrap
///   the same with the boundary term |u_{-M}|^2 under zero padding
///   (Au, u) >= 0 and |Bu|^2 <= 4 |u|^2
PropertyReport operator_identities(const OperatorSuiteOptions& options,
                                   const OperatorSet& ops = OperatorSet::standard());

struct CutoffSuiteOptions {
  std::size_t pairs = 100000;
  std::size_t agreement_trials = 1000;
  double level = 2.0;
  std::uint64_t seed = 2;
};

/// Lipschitz factors of the cutoffs (complex <= 2, real <= 1), exact agreement
/// of the truncated maps with the original ones inside the n-ball, and the
/// Lipschitz constants q1..q4 of the truncated maps on random pairs.
PropertyReport cutoff_properties(const CutoffSuiteOptions& options,
                                 const DiffusionFamily& family, double lambda);

struct ConsistencyOptions {
  std::vector<CutoffLevel> levels;  ///< ascending truncation levels
  std::size_t paths = 32;
  double tolerance_per_time = 1e-9;
};

/// Runs the untruncated system and each truncated one on common noise and
/// checks |u_n - u| + |v_n - v| <= tolerance * t for t up to the stopping time
/// tau_n of each level.
PropertyReport truncation_consistency(const SimConfig& config, const SystemParams& params,
                                      const DiffusionFamily& family,
                                      const ConsistencyOptions& options);

}  // namespace lsw
