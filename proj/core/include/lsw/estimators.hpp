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
#include <span>
#include <string>
#include <vector>

#include "lsw/integrator.hpp"
#include "lsw/system.hpp"

namespace lsw {

/// Sample mean with the standard error of the mean over paths.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Running mean and variance in insertion order (Welford).
class RunningStat {
 public:
  void add(double x);
  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const noexcept;
  Estimate estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct MomentRow {
  double t = 0.0;
  Estimate m4u;  ///< E |u(t)|^4
  Estimate m2v;  ///< E |v(t)|^2
  Estimate sum;  ///< E [|u(t)|^4 + |v(t)|^2]
  double envelope = 0.0;
  bool violation = false;
};

struct MomentSeries {
  std::vector<MomentRow> rows;
  double initial_moment = 0.0;  ///< E [|u_0|^4 + |v_0|^2]
  std::size_t paths = 0;

  std::size_t violations() const;
};

/// Streaming reduction of per-path norm series into moment estimates. Paths
/// must be added in a fixed order for bitwise reproducible output.
class MomentAccumulator {
 public:
  /// Throws Error when the path's time grid differs from earlier paths.
  void add(const PathOutput& path);
  std::size_t paths() const noexcept { return paths_; }

  /// A row is flagged when estimate - 3 se exceeds the envelope for E|u|^4,
  /// E|v|^2 or their sum.
  MomentSeries finish(const DerivedConstants& derived) const;

 private:
  std::vector<double> times_;
  std::vector<RunningStat> u4_, v2_, sum_;
  std::size_t paths_ = 0;
};

MomentSeries estimate_moments(std::span<const PathOutput> ensemble,
                              const DerivedConstants& derived);

/// Smooth cutoff weight: 0 for |s| <= 1, 1 for |s| >= 2, quintic smoothstep
/// in between (C^2, |rho'| <= 15/8).
double smooth_cutoff(double s);

struct TailSeries {
  std::vector<double> times;
  std::vector<int> n_values;
  /// hard[t][j] = (sum_{|m|>=n} E|u_m|^2)^2 + sum_{|m|>=n} E v_m^2 at n = n_values[j]
  std::vector<std::vector<double>> hard;
  /// smooth[t][j] = E |rho_n u|^4 + E |rho_n^2 v|^2 with weights rho(m / n);
  /// n = 0 uses weight 1 everywhere.
  std::vector<std::vector<double>> smooth;

  /// True when hard tails are nonincreasing in n (n_values ascending) at every time.
  bool monotone_in_n() const;
};

/// Streaming tail reduction over snapshots (PathOutput::snapshots must be stored).
class TailAccumulator {
 public:
  TailAccumulator(std::vector<int> n_values, int radius);
  void add(const PathOutput& path);
  /// Reduction over a single state; paths recorded through an observer feed
  /// this once per recorded time in time order.
  void add_state(std::size_t time_index, double t, const LatticeState& s);
  void end_path() { ++paths_; }
  TailSeries finish() const;

 private:
  void ensure_time(std::size_t index, double t);

  std::vector<int> n_values_;
  int radius_;
  std::vector<double> times_;
  std::vector<std::vector<double>> u_sq_;  // [t][site] sum over paths of |u_m|^2
  std::vector<std::vector<double>> v_sq_;
  std::vector<std::vector<double>> smooth_;  // [t][j] sum over paths
  std::vector<std::vector<double>> weights_;  // [j][site] rho(m / n)^2
  std::size_t paths_ = 0;
};

TailSeries estimate_tails(std::span<const PathOutput> ensemble, std::vector<int> n_values);

/// Real functional of the lattice state.
struct Observable {
  std::string name;
  std::function<double(const LatticeState&)> fn;
};

/// |u|^2, |v|^2, Re u_0, Im u_0, v_0.
std::vector<Observable> default_observables();
/// Looks up observables by name among the defaults and |u|^4, |u_0|.
std::vector<Observable> observables_by_name(const std::vector<std::string>& names);

struct Histogram {
  std::vector<double> edges;  ///< bins + 1 ascending edges
  std::vector<double> mass;   ///< probability per bin, sums to 1
};

/// Equally weighted pooled samples of scalar observables. Samples are stored
/// path-major with a fixed count per path so path blocks can be resampled.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  EmpiricalMeasure(std::vector<std::string> names, std::size_t samples_per_path);

  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t observable_count() const noexcept { return names_.size(); }
  std::size_t samples_per_path() const noexcept { return per_path_; }
  std::size_t paths() const noexcept { return paths_; }
  std::size_t size() const noexcept { return paths_ * per_path_; }

  /// Appends one path worth of samples: values[obs][i] for i < samples_per_path.
  void add_path(const std::vector<std::vector<double>>& values);
  const std::vector<double>& samples(std::size_t obs) const { return samples_.at(obs); }
  /// Uniform weight 1 / size() of each sample.
  double weight() const;

  /// Measure built from the given path indices (repetitions allowed).
  EmpiricalMeasure select_paths(std::span<const std::size_t> paths) const;

  /// Equal-width bins spanning the sample range; a degenerate range gets one
  /// unit-width bin centred on the value.
  Histogram histogram(std::size_t obs, std::size_t bins) const;
  Histogram histogram(std::size_t obs, std::span<const double> edges) const;

 private:
  std::vector<std::string> names_;
  std::size_t per_path_ = 0;
  std::size_t paths_ = 0;
  std::vector<std::vector<double>> samples_;
};

double total_variation(const Histogram& a, const Histogram& b);

struct KbOptions {
  double burn_in = 0.0;
  double avg_T = 1.0;
  std::vector<Observable> observables = default_observables();
  unsigned workers = 1;
};

/// Burn-in giving five decay horizons, 5 / kappa.
double default_burn_in(const DerivedConstants& derived);

/// Time-averaged occupation measure over [burn_in, burn_in + avg_T], sampled
/// at every recorded time (config.record_stride) and pooled over paths.
/// config.T is replaced by burn_in + avg_T.
EmpiricalMeasure kb_measure(const SimConfig& config, const SystemParams& params,
                            const DiffusionFamily& family, const KbOptions& options);

/// W1 between equally weighted empirical laws on the real line.
double wasserstein1(std::span<const double> a, std::span<const double> b);
/// Maximum over observables of the per-observable W1 distance.
double measure_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

/// Root-mean-square distance between a measure and its path-block bootstrap
/// resamples.
double bootstrap_spread(const EmpiricalMeasure& m, std::size_t replicates, std::uint64_t seed);
/// 3 sqrt(s_a^2 + s_b^2) with s the bootstrap spread of each measure.
double bootstrap_noise_floor(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                             std::size_t replicates, std::uint64_t seed);

struct DivergenceRow {
  double eps1 = 0.0;
  double eps2 = 0.0;
  Estimate divergence;  ///< E sup_t (|du|^4 + |dv|^2)
};

struct DivergenceTable {
  std::vector<DivergenceRow> rows;
  /// Least-squares slope of log divergence against log |eps1 - eps2| over rows
  /// with both positive; NaN with fewer than two such rows.
  double slope = 0.0;
};

/// Runs both members of each pair on identical Wiener increments and initial
/// data; the supremum is taken over every integration step in [0, config.T].
DivergenceTable eps_divergence(const SimConfig& config, const SystemParams& params,
                               const DiffusionFamily& family,
                               std::span<const std::pair<double, double>> pairs,
                               unsigned workers = 1);

struct SweepRow {
  double eps = 0.0;
  double distance = 0.0;
  double noise_floor = 0.0;
};

struct SweepOptions {
  KbOptions kb;
  std::size_t bootstrap_replicates = 200;
  std::uint64_t bootstrap_seed = 0;
};

/// Distances of the KB measure at each eps to the measure at eps = 0 (which
/// must be in the list). Rows follow the order of eps_list.
std::vector<SweepRow> eps_measure_sweep(const SimConfig& config, const SystemParams& params,
                                        const DiffusionFamily& family,
                                        std::span<const double> eps_list,
                                        const SweepOptions& options);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace lsw
