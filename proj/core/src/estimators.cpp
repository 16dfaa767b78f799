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

#include "lsw/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lsw/error.hpp"
#include "lsw/parallel.hpp"

namespace lsw {

void RunningStat::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningStat::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

Estimate RunningStat::estimate() const {
  if (n_ == 0) return {};
  return {mean_, std::sqrt(variance() / static_cast<double>(n_))};
}

std::size_t MomentSeries::violations() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const MomentRow& r) { return r.violation; }));
}

void MomentAccumulator::add(const PathOutput& path) {
  const auto& norms = path.norms;
  if (paths_ == 0) {
    times_.clear();
    for (const auto& s : norms) times_.push_back(s.t);
    u4_.assign(times_.size(), {});
    v2_.assign(times_.size(), {});
    sum_.assign(times_.size(), {});
  } else {
    bool same = norms.size() == times_.size();
    for (std::size_t i = 0; same && i < norms.size(); ++i) same = norms[i].t == times_[i];
    if (!same) {
      throw Error("path " + std::to_string(path.path) +
                  " is recorded on a different time grid than the rest of the ensemble");
    }
  }
  for (std::size_t i = 0; i < norms.size(); ++i) {
    u4_[i].add(norms[i].norm_u_4);
    v2_[i].add(norms[i].norm_v_sq);
    sum_[i].add(norms[i].norm_u_4 + norms[i].norm_v_sq);
  }
  ++paths_;
}

MomentSeries MomentAccumulator::finish(const DerivedConstants& derived) const {
  if (paths_ == 0) throw Error("moment estimation needs a nonempty ensemble");
  MomentSeries out;
  out.paths = paths_;
  out.initial_moment = sum_.empty() ? 0.0 : sum_.front().mean();
  out.rows.reserve(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) {
    MomentRow row;
    row.t = times_[i];
    row.m4u = u4_[i].estimate();
    row.m2v = v2_[i].estimate();
    row.sum = sum_[i].estimate();
    row.envelope = derived.envelope(row.t, out.initial_moment);
    auto exceeds = [&](const Estimate& e) { return e.mean - 3.0 * e.se > row.envelope; };
    row.violation = exceeds(row.m4u) || exceeds(row.m2v) || exceeds(row.sum);
    out.rows.push_back(row);
  }
  return out;
}

MomentSeries estimate_moments(std::span<const PathOutput> ensemble,
                              const DerivedConstants& derived) {
  MomentAccumulator acc;
  for (const auto& p : ensemble) acc.add(p);
  return acc.finish(derived);
}

double smooth_cutoff(double s) {
  const double x = std::abs(s) - 1.0;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

bool TailSeries::monotone_in_n() const {
  for (const auto& row : hard)
    for (std::size_t j = 1; j < row.size(); ++j)
      if (row[j] > row[j - 1]) return false;
  return true;
}

TailAccumulator::TailAccumulator(std::vector<int> n_values, int radius)
    : n_values_(std::move(n_values)), radius_(radius) {
  std::sort(n_values_.begin(), n_values_.end());
  const std::size_t sites = static_cast<std::size_t>(2 * radius + 1);
  for (int n : n_values_) {
    if (n < 0 || n > radius)
      throw ConfigError("tail radius " + std::to_string(n) + " outside [0, M]");
    std::vector<double> w(sites);
    for (std::size_t i = 0; i < sites; ++i) {
      const double m = static_cast<double>(static_cast<int>(i) - radius);
      const double r = n == 0 ? 1.0 : smooth_cutoff(m / n);
      w[i] = r * r;
    }
    weights_.push_back(std::move(w));
  }
}

void TailAccumulator::ensure_time(std::size_t index, double t) {
  if (index < times_.size()) {
    if (times_[index] != t) throw Error("tail estimation requires a shared time grid");
    return;
  }
  if (index != times_.size()) throw Error("tail samples must arrive in time order");
  const std::size_t sites = static_cast<std::size_t>(2 * radius_ + 1);
  times_.push_back(t);
  u_sq_.emplace_back(sites, 0.0);
  v_sq_.emplace_back(sites, 0.0);
  smooth_.emplace_back(n_values_.size(), 0.0);
}

void TailAccumulator::add_state(std::size_t time_index, double t, const LatticeState& s) {
  if (s.radius() != radius_) throw DimensionError("tail state radius differs from M");
  ensure_time(time_index, t);
  auto& us = u_sq_[time_index];
  auto& vs = v_sq_[time_index];
  for (std::size_t i = 0; i < us.size(); ++i) {
    us[i] += std::norm(s.u[i]);
    vs[i] += s.v[i] * s.v[i];
  }
  for (std::size_t j = 0; j < n_values_.size(); ++j) {
    const auto& w = weights_[j];
    double uu = 0.0;
    double vv = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      uu += w[i] * std::norm(s.u[i]);
      vv += w[i] * w[i] * s.v[i] * s.v[i];
    }
    smooth_[time_index][j] += uu * uu + vv;
  }
}

void TailAccumulator::add(const PathOutput& path) {
  for (std::size_t k = 0; k < path.snapshots.size(); ++k)
    add_state(k, path.snapshots[k].t, path.snapshots[k].state);
  end_path();
}

TailSeries TailAccumulator::finish() const {
  TailSeries out;
  out.times = times_;
  out.n_values = n_values_;
  if (paths_ == 0) return out;
  const double inv = 1.0 / static_cast<double>(paths_);
  for (std::size_t k = 0; k < times_.size(); ++k) {
    std::vector<double> hard(n_values_.size());
    std::vector<double> smooth(n_values_.size());
    for (std::size_t j = 0; j < n_values_.size(); ++j) {
      double su = 0.0;
      double sv = 0.0;
      for (std::size_t i = 0; i < u_sq_[k].size(); ++i) {
        const int m = static_cast<int>(i) - radius_;
        if (std::abs(m) >= n_values_[j]) {
          su += u_sq_[k][i];
          sv += v_sq_[k][i];
        }
      }
      su *= inv;
      hard[j] = su * su + sv * inv;
      smooth[j] = smooth_[k][j] * inv;
    }
    out.hard.push_back(std::move(hard));
    out.smooth.push_back(std::move(smooth));
  }
  return out;
}

TailSeries estimate_tails(std::span<const PathOutput> ensemble, std::vector<int> n_values) {
  if (ensemble.empty()) return {{}, std::move(n_values), {}, {}};
  const int radius = ensemble.front().snapshots.empty()
                         ? 1
                         : ensemble.front().snapshots.front().state.radius();
  TailAccumulator acc(std::move(n_values), radius);
  for (const auto& p : ensemble) acc.add(p);
  return acc.finish();
}

namespace {

double site0(const RealSeq& v) { return v.at_site(0); }

}  // namespace

std::vector<Observable> default_observables() {
  return {
      {"norm_u_sq", [](const LatticeState& s) { return norm_sq(s.u); }},
      {"norm_v_sq", [](const LatticeState& s) { return norm_sq(s.v); }},
      {"re_u0", [](const LatticeState& s) { return s.u.at_site(0).real(); }},
      {"im_u0", [](const LatticeState& s) { return s.u.at_site(0).imag(); }},
      {"v0", [](const LatticeState& s) { return site0(s.v); }},
  };
}

std::vector<Observable> observables_by_name(const std::vector<std::string>& names) {
  auto all = default_observables();
  all.push_back({"norm_u_4", [](const LatticeState& s) {
                   const double a = norm_sq(s.u);
                   return a * a;
                 }});
  all.push_back({"abs_u0", [](const LatticeState& s) { return std::abs(s.u.at_site(0)); }});
  std::vector<Observable> out;
  for (const auto& name : names) {
    auto it = std::find_if(all.begin(), all.end(), [&](const auto& o) { return o.name == name; });
    if (it == all.end()) {
      std::string known;
      for (const auto& o : all) known += (known.empty() ? "" : ", ") + o.name;
      throw ConfigError("unknown observable '" + name + "' (known: " + known + ")");
    }
    out.push_back(*it);
  }
  return out;
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<std::string> names, std::size_t samples_per_path)
    : names_(std::move(names)), per_path_(samples_per_path), samples_(names_.size()) {}

void EmpiricalMeasure::add_path(const std::vector<std::vector<double>>& values) {
  if (values.size() != names_.size())
    throw DimensionError("path sample set has the wrong number of observables");
  for (const auto& v : values)
    if (v.size() != per_path_) throw DimensionError("path sample set has the wrong length");
  for (std::size_t o = 0; o < values.size(); ++o)
    samples_[o].insert(samples_[o].end(), values[o].begin(), values[o].end());
  ++paths_;
}

double EmpiricalMeasure::weight() const {
  return size() == 0 ? 0.0 : 1.0 / static_cast<double>(size());
}

EmpiricalMeasure EmpiricalMeasure::select_paths(std::span<const std::size_t> paths) const {
  EmpiricalMeasure out(names_, per_path_);
  for (std::size_t o = 0; o < names_.size(); ++o) {
    auto& dst = out.samples_[o];
    dst.reserve(paths.size() * per_path_);
    for (std::size_t p : paths) {
      if (p >= paths_) throw Error("path index out of range");
      const auto first = samples_[o].begin() + static_cast<std::ptrdiff_t>(p * per_path_);
      dst.insert(dst.end(), first, first + static_cast<std::ptrdiff_t>(per_path_));
    }
  }
  out.paths_ = paths.size();
  return out;
}

Histogram EmpiricalMeasure::histogram(std::size_t obs, std::size_t bins) const {
  const auto& s = samples(obs);
  if (s.empty() || bins == 0) return {};
  const auto [lo_it, hi_it] = std::minmax_element(s.begin(), s.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
    bins = 1;
  }
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
  edges.back() = hi;
  return histogram(obs, edges);
}

Histogram EmpiricalMeasure::histogram(std::size_t obs, std::span<const double> edges) const {
  if (edges.size() < 2) throw Error("histogram needs at least two edges");
  Histogram h;
  h.edges.assign(edges.begin(), edges.end());
  h.mass.assign(edges.size() - 1, 0.0);
  const auto& s = samples(obs);
  if (s.empty()) return h;
  // Samples outside the edges are counted in the nearest end bin.
  const double w = 1.0 / static_cast<double>(s.size());
  for (double x : s) {
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
    auto bin = static_cast<std::ptrdiff_t>(it - h.edges.begin()) - 1;
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(h.mass.size()) - 1);
    h.mass[static_cast<std::size_t>(bin)] += w;
  }
  return h;
}

double total_variation(const Histogram& a, const Histogram& b) {
  if (a.edges != b.edges) throw Error("total variation requires identical bin edges");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) tv += std::abs(a.mass[i] - b.mass[i]);
  return 0.5 * tv;
}

double default_burn_in(const DerivedConstants& derived) { return 5.0 / derived.kappa; }

EmpiricalMeasure kb_measure(const SimConfig& config, const SystemParams& params,
                            const DiffusionFamily& family, const KbOptions& options) {
  if (!(options.avg_T > 0.0)) throw ConfigError("averaging window avg_T must be positive");
  if (options.burn_in < 0.0) throw ConfigError("burn-in must be non-negative");
  if (options.observables.empty()) throw ConfigError("at least one observable is required");
  SimConfig cfg = config;
  cfg.T = std::round((options.burn_in + options.avg_T) / cfg.dt) * cfg.dt;
  cfg.store_states = false;
  cfg.stopping_levels.clear();

  const double start = options.burn_in - 0.5 * cfg.dt;
  std::size_t per_path = 0;
  for (std::size_t j = 0; j <= cfg.steps(); j += cfg.record_stride)
    if (static_cast<double>(j) * cfg.dt >= start) ++per_path;

  std::vector<std::string> names;
  for (const auto& o : options.observables) names.push_back(o.name);
  EmpiricalMeasure measure(names, per_path);

  using Buffer = std::vector<std::vector<double>>;
  std::vector<Buffer> buffers(static_cast<std::size_t>(cfg.n_paths));
  const auto& obs = options.observables;
  run_ensemble(
      cfg, params, family, options.workers,
      [&](PathOutput&& p) {
        auto& buf = buffers[p.path];
        measure.add_path(buf);
        Buffer().swap(buf);
      },
      [&](std::uint64_t path) -> RecordObserver {
        Buffer* buf = &buffers[path];
        buf->assign(obs.size(), {});
        for (auto& b : *buf) b.reserve(per_path);
        return [buf, &obs, start](double t, const LatticeState& s) {
          if (t < start) return;
          for (std::size_t o = 0; o < obs.size(); ++o) (*buf)[o].push_back(obs[o].fn(s));
        };
      });
  return measure;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error("W1 distance of an empty sample set");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(x.front(), y.front());
  double total = 0.0;
  while (i < x.size() || j < y.size()) {
    const double next = j >= y.size()   ? x[i]
                        : i >= x.size() ? y[j]
                                        : std::min(x[i], y[j]);
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
    while (i < x.size() && x[i] == next) ++i;
    while (j < y.size() && y[j] == next) ++j;
    prev = next;
  }
  return total;
}

double measure_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  if (a.names() != b.names())
    throw Error("measure distance requires identical observable lists");
  double d = 0.0;
  for (std::size_t o = 0; o < a.observable_count(); ++o)
    d = std::max(d, wasserstein1(a.samples(o), b.samples(o)));
  return d;
}

double bootstrap_spread(const EmpiricalMeasure& m, std::size_t replicates, std::uint64_t seed) {
  if (m.paths() < 2 || replicates == 0) return 0.0;
  const NoiseStream stream(seed);
  std::vector<std::size_t> pick(m.paths());
  double acc = 0.0;
  for (std::size_t r = 0; r < replicates; ++r) {
    for (std::size_t i = 0; i < pick.size(); ++i) {
      const double u =
          stream.uniform(StreamDomain::bootstrap, r, static_cast<std::uint32_t>(i), 0);
      pick[i] = std::min(pick.size() - 1,
                         static_cast<std::size_t>(u * static_cast<double>(pick.size())));
    }
    const double d = measure_distance(m.select_paths(pick), m);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(replicates));
}

double bootstrap_noise_floor(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                             std::size_t replicates, std::uint64_t seed) {
  const double sa = bootstrap_spread(a, replicates, seed);
  const double sb = bootstrap_spread(b, replicates, seed + 1);
  return 3.0 * std::sqrt(sa * sa + sb * sb);
}

DivergenceTable eps_divergence(const SimConfig& config, const SystemParams& params,
                               const DiffusionFamily& family,
                               std::span<const std::pair<double, double>> pairs,
                               unsigned workers) {
  DivergenceTable table;
  std::vector<double> gaps;
  std::vector<double> values;
  for (const auto& [e1, e2] : pairs) {
    SystemParams p1 = params;
    SystemParams p2 = params;
    p1.epsilon = e1;
    p2.epsilon = e2;
    config.validate(p1, family);
    config.validate(p2, family);
    const Stepper s1(config, p1, family);
    const Stepper s2(config, p2, family);
    const NoiseStream stream(config.seed);
    const std::size_t steps = config.steps();
    const auto n_paths = static_cast<std::size_t>(config.n_paths);
    std::vector<double> sup(n_paths, 0.0);

    parallel_for(n_paths, workers, [&](std::size_t path) {
      LatticeState a = config.initial.sample(path);
      LatticeState b = a;
      auto wa = s1.make_workspace();
      auto wb = s2.make_workspace();
      std::vector<double> dW(static_cast<std::size_t>(config.K));
      double best = 0.0;
      for (std::size_t j = 1; j <= steps; ++j) {
        stream.increments(path, j - 1, config.dt, dW);
        s1.step(a, dW, wa);
        s2.step(b, dW, wb);
        double du = 0.0;
        double dv = 0.0;
        for (std::size_t i = 0; i < a.u.size(); ++i) {
          du += std::norm(a.u[i] - b.u[i]);
          dv += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
        }
        const double t = static_cast<double>(j) * config.dt;
        if (!std::isfinite(du) || !std::isfinite(dv)) throw BlowUpError(path, j, t);
        best = std::max(best, du * du + dv);
      }
      sup[path] = best;
    });

    RunningStat stat;
    for (double s : sup) stat.add(s);
    table.rows.push_back({e1, e2, stat.estimate()});
    const double gap = std::abs(e1 - e2);
    if (gap > 0.0 && stat.mean() > 0.0) {
      gaps.push_back(std::log(gap));
      values.push_back(std::log(stat.mean()));
    }
  }
  table.slope =
      gaps.size() >= 2 ? fit_slope(gaps, values) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

std::vector<SweepRow> eps_measure_sweep(const SimConfig& config, const SystemParams& params,
                                        const DiffusionFamily& family,
                                        std::span<const double> eps_list,
                                        const SweepOptions& options) {
  if (std::find(eps_list.begin(), eps_list.end(), 0.0) == eps_list.end())
    throw ConfigError("eps_list must include 0");
  SystemParams p0 = params;
  p0.epsilon = 0.0;
  const EmpiricalMeasure reference = kb_measure(config, p0, family, options.kb);
  std::vector<SweepRow> rows;
  for (double eps : eps_list) {
    if (eps == 0.0) {
      rows.push_back({0.0, 0.0,
                      bootstrap_noise_floor(reference, reference, options.bootstrap_replicates,
                                            options.bootstrap_seed)});
      continue;
    }
    SystemParams p = params;
    p.epsilon = eps;
    const EmpiricalMeasure m = kb_measure(config, p, family, options.kb);
    rows.push_back({eps, measure_distance(m, reference),
                    bootstrap_noise_floor(m, reference, options.bootstrap_replicates,
                                          options.bootstrap_seed)});
  }
  return rows;
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("rank correlation needs two equally long series of length >= 2");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error("slope fit needs two equally long series of length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace lsw
