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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "lsw/lattice.hpp"
#include "lsw/noise.hpp"
#include "lsw/system.hpp"
#include "lsw/truncation.hpp"

namespace lsw {

enum class Scheme {
  euler_maruyama,
  /// Linear part -iA - alpha (resp. -beta) integrated exactly; the remaining
  /// drift enters through phi_1(dt L) and the noise through e^{dt L}.
  exp_euler_maruyama,
};

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name);

/// Deterministic profile plus optional per-site Gaussian perturbation
/// scaled by `envelope` (all ones when empty). The perturbation for path p
/// is drawn from its own stream keyed by `seed`, independent of the Wiener
/// increments.
struct InitialCondition {
  ComplexSeq u;
  RealSeq v;
  double random_scale = 0.0;
  RealSeq envelope;
  std::uint64_t seed = 0;

  static InitialCondition zero(int radius) {
    InitialCondition ic;
    ic.u = ComplexSeq(radius);
    ic.v = RealSeq(radius);
    return ic;
  }

  LatticeState sample(std::uint64_t path) const;
};

struct SimConfig {
  int M = 16;
  int K = 4;
  double dt = 1e-3;
  double T = 1.0;
  int n_paths = 1;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::euler_maruyama;
  Boundary boundary = Boundary::zero_padding;
  /// Integrate the level-n truncated system instead of the original one.
  std::optional<CutoffLevel> cutoff;
  /// Steps between recorded samples (norm series and snapshots).
  std::size_t record_stride = 1;
  /// Levels n whose stopping times tau_n are tracked on every step.
  std::vector<CutoffLevel> stopping_levels;
  /// Keep full lattice snapshots in PathOutput (norm series are always kept).
  bool store_states = true;
  /// Each step consumes the sum of this many consecutive increments of the
  /// underlying Wiener stream at spacing dt / noise_substeps, so runs with
  /// dt and dt / q can share one Brownian path.
  std::size_t noise_substeps = 1;
  InitialCondition initial;

  /// Number of steps round(T / dt).
  std::size_t steps() const;
  void validate(const SystemParams& params, const DiffusionFamily& family) const;
};

struct NormSample {
  double t = 0.0;
  double norm_u_sq = 0.0;
  double norm_u_4 = 0.0;
  double norm_v_sq = 0.0;
};

struct Snapshot {
  double t = 0.0;
  LatticeState state;
};

struct PathOutput {
  std::uint64_t path = 0;
  std::vector<Snapshot> snapshots;
  std::vector<NormSample> norms;
  std::vector<StoppingRecord> stopping;
};

/// Called at every recorded time with the current state.
using RecordObserver = std::function<void(double t, const LatticeState& state)>;

/// Precomputed single-step map for one (config, params, family) triple.
/// Immutable after construction; each thread needs its own Workspace.
class Stepper {
 public:
  struct Workspace {
    std::vector<double> noise_delta;  // sum_k delta_{k,m} dW_k
    std::vector<Complex> noise_b;     // sum_k b_{k,m} dW_k
    std::vector<double> noise_gamma;  // sum_k gamma_{k,m} dW_k
    std::vector<double> mod_sq;       // |rho(u_m)|^2
    std::vector<Complex> next_u;
    std::vector<double> next_v;
    Eigen::VectorXcd lin;
    Eigen::VectorXcd nonlin;
  };

  Stepper(const SimConfig& config, const SystemParams& params, const DiffusionFamily& family);

  Workspace make_workspace() const;

  /// Advances `state` by one step of size dt with Wiener increments `dW`
  /// (length K). The same dW_k drives mode k in both components.
  void step(LatticeState& state, std::span<const double> dW, Workspace& ws) const;

  double dt() const noexcept { return dt_; }
  int modes() const noexcept { return modes_; }
  const SystemParams& params() const noexcept { return params_; }

 private:
  template <class ShapeH, class ShapeS>
  void euler_step(LatticeState& state, Workspace& ws, ShapeH shape_h, ShapeS shape_s) const;
  template <class ShapeH, class ShapeS>
  void exp_step(LatticeState& state, Workspace& ws, ShapeH shape_h, ShapeS shape_s) const;
  void accumulate_noise(std::span<const double> dW, Workspace& ws) const;

  SystemParams params_;
  DiffusionFamily family_;
  Scheme scheme_;
  Boundary boundary_;
  std::optional<CutoffLevel> cutoff_;
  double dt_;
  int modes_;
  std::size_t sites_;
  bool has_b_ = false;
  bool has_gamma_ = false;
  bool has_delta_ = false;
  std::vector<double> delta_;  // mode-major K x N
  std::vector<Complex> b_;
  std::vector<double> gamma_;
  // exp_euler_maruyama factors
  Eigen::MatrixXcd exp_u_;  // e^{dt L}
  Eigen::MatrixXcd phi_u_;  // dt phi_1(dt L)
  double exp_v_ = 0.0;
  double phi_v_ = 0.0;
};

/// Dense e^{t L} and t phi_1(t L) for L = -iA - alpha, evaluated through the
/// closed-form eigen-decomposition of A (sine basis for zero padding, Fourier
/// basis for periodic).
struct LinearPropagator {
  Eigen::MatrixXcd exp_tl;
  Eigen::MatrixXcd t_phi1_tl;
};
LinearPropagator linear_propagator(int radius, double alpha, double t, Boundary b);

/// One step from `state` (convenience form; builds the step map each call).
LatticeState step(const LatticeState& state, const SystemParams& params,
                  const DiffusionFamily& family, std::span<const double> increments, double dt,
                  Scheme scheme, std::optional<CutoffLevel> cutoff = std::nullopt,
                  Boundary boundary = Boundary::zero_padding);

PathOutput simulate_path(const Stepper& stepper, const SimConfig& config, std::uint64_t path,
                         const RecordObserver& observer = {});
PathOutput simulate_path(const SimConfig& config, const SystemParams& params,
                         const DiffusionFamily& family, std::uint64_t path);

/// Simulates paths 0..n_paths-1 on up to `workers` threads and hands each
/// PathOutput to `consumer` in increasing path order. Paths are processed in
/// fixed-size batches so memory stays bounded and the consumer sequence is
/// independent of the worker count.
void run_ensemble(const SimConfig& config, const SystemParams& params,
                  const DiffusionFamily& family, unsigned workers,
                  const std::function<void(PathOutput&&)>& consumer,
                  const std::function<RecordObserver(std::uint64_t)>& observer_for = {});

std::vector<PathOutput> simulate_ensemble(const SimConfig& config, const SystemParams& params,
                                          const DiffusionFamily& family, unsigned workers = 1);

}  // namespace lsw
