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

#include "lsw/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lsw/error.hpp"
#include "lsw/parallel.hpp"

namespace lsw {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::euler_maruyama: return "euler_maruyama";
    case Scheme::exp_euler_maruyama: return "exp_euler_maruyama";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "euler_maruyama") return Scheme::euler_maruyama;
  if (name == "exp_euler_maruyama") return Scheme::exp_euler_maruyama;
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected euler_maruyama or exp_euler_maruyama)");
}

LatticeState InitialCondition::sample(std::uint64_t path) const {
  LatticeState s(u, v);
  if (random_scale == 0.0) return s;
  const NoiseStream stream(seed);
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    const double env = envelope.empty() ? 1.0 : envelope[i];
    const auto idx = static_cast<std::uint32_t>(i);
    const auto [re, im] = stream.normal_pair(StreamDomain::initial, path, idx, 0);
    const double w = stream.normal_pair(StreamDomain::initial, path, idx, 1).first;
    s.u[i] += random_scale * env * Complex(re, im) / std::numbers::sqrt2;
    s.v[i] += random_scale * env * w;
  }
  return s;
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(T / dt));
}

void SimConfig::validate(const SystemParams& params, const DiffusionFamily& family) const {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("sim.dt must be positive");
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError("sim.T must be non-negative");
  const double ratio = T / dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("sim.T must be an integer multiple of sim.dt");
  if (n_paths < 1) throw ConfigError("sim.n_paths must be at least 1");
  if (record_stride < 1) throw ConfigError("sim.record_stride must be at least 1");
  if (noise_substeps < 1) throw ConfigError("sim.noise_substeps must be at least 1");
  if (M != params.radius() || M != family.radius())
    throw DimensionError("lattice radius differs between sim, system and noise settings");
  if (K != params.modes() || K != family.modes())
    throw DimensionError("noise mode count differs between sim, system and noise settings");
  if (initial.u.radius() != M || initial.v.radius() != M)
    throw DimensionError("initial condition radius differs from sim.M");
  if (!initial.envelope.empty() && initial.envelope.radius() != M)
    throw DimensionError("initial envelope radius differs from sim.M");
  if (!initial.u.all_finite() || !initial.v.all_finite())
    throw ConfigError("initial condition must be finite");
  if (scheme == Scheme::euler_maruyama && dt * (4.0 + params.alpha) > 0.5) {
    throw ConfigError("euler_maruyama stability guard dt * (4 + alpha) <= 0.5 violated (dt = " +
                      std::to_string(dt) + ")");
  }
}

namespace {

Complex phi1(Complex z) {
  if (std::abs(z) < 0.5) {
    Complex term = 1.0;
    Complex sum = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= z / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

inline Complex times_minus_i(Complex z) { return {z.imag(), -z.real()}; }

}  // namespace

LinearPropagator linear_propagator(int radius, double alpha, double t, Boundary b) {
  const auto n = static_cast<Eigen::Index>(2 * radius + 1);
  Eigen::MatrixXcd basis(n, n);
  Eigen::VectorXd eig(n);
  if (b == Boundary::zero_padding) {
    const double h = std::numbers::pi / static_cast<double>(n + 1);
    const double scale = std::sqrt(2.0 / static_cast<double>(n + 1));
    for (Eigen::Index j = 0; j < n; ++j) {
      eig(j) = 2.0 - 2.0 * std::cos(h * static_cast<double>(j + 1));
      for (Eigen::Index i = 0; i < n; ++i)
        basis(i, j) = scale * std::sin(h * static_cast<double>((i + 1) * (j + 1)));
    }
  } else {
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
      eig(j) = 2.0 - 2.0 * std::cos(h * static_cast<double>(j));
      for (Eigen::Index i = 0; i < n; ++i) {
        const double angle = h * static_cast<double>((i * j) % n);
        basis(i, j) = scale * Complex(std::cos(angle), std::sin(angle));
      }
    }
  }
  Eigen::VectorXcd e(n);
  Eigen::VectorXcd p(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex mu(-alpha, -eig(j));
    e(j) = std::exp(t * mu);
    p(j) = t * phi1(t * mu);
  }
  LinearPropagator out;
  out.exp_tl = basis * e.asDiagonal() * basis.adjoint();
  out.t_phi1_tl = basis * p.asDiagonal() * basis.adjoint();
  return out;
}

Stepper::Stepper(const SimConfig& config, const SystemParams& params,
                 const DiffusionFamily& family)
    : params_(params),
      family_(family),
      scheme_(config.scheme),
      boundary_(config.boundary),
      cutoff_(config.cutoff),
      dt_(config.dt),
      modes_(params.modes()),
      sites_(params.f.size()) {
  params_.validate();
  if (family.modes() != modes_ || family.radius() != params.radius())
    throw DimensionError("diffusion family does not match the system's modes and lattice");
  const std::size_t n = sites_;
  delta_.assign(family.delta().values().begin(), family.delta().values().end());
  b_.assign(static_cast<std::size_t>(modes_) * n, Complex{});
  gamma_.assign(static_cast<std::size_t>(modes_) * n, 0.0);
  for (int k = 0; k < modes_; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t i = 0; i < n; ++i) {
      b_[kk * n + i] = params.b[kk][i];
      gamma_[kk * n + i] = params.gamma[kk][i];
    }
  }
  has_b_ = std::any_of(b_.begin(), b_.end(), [](Complex z) { return z != Complex{}; });
  has_gamma_ = std::any_of(gamma_.begin(), gamma_.end(), [](double x) { return x != 0.0; });
  has_delta_ = family.kind() != DiffusionKind::zero &&
               std::any_of(delta_.begin(), delta_.end(), [](double x) { return x != 0.0; });

  if (scheme_ == Scheme::exp_euler_maruyama) {
    auto prop = linear_propagator(params.radius(), params.alpha, dt_, boundary_);
    exp_u_ = std::move(prop.exp_tl);
    phi_u_ = std::move(prop.t_phi1_tl);
    exp_v_ = std::exp(-params.beta * dt_);
    phi_v_ = -std::expm1(-params.beta * dt_) / params.beta;
  }
}

Stepper::Workspace Stepper::make_workspace() const {
  Workspace ws;
  ws.noise_delta.assign(sites_, 0.0);
  ws.noise_b.assign(sites_, Complex{});
  ws.noise_gamma.assign(sites_, 0.0);
  ws.mod_sq.assign(sites_, 0.0);
  ws.next_u.assign(sites_, Complex{});
  ws.next_v.assign(sites_, 0.0);
  ws.lin = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sites_));
  ws.nonlin = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(sites_));
  return ws;
}

void Stepper::accumulate_noise(std::span<const double> dW, Workspace& ws) const {
  const std::size_t n = sites_;
  if (has_delta_) std::fill(ws.noise_delta.begin(), ws.noise_delta.end(), 0.0);
  if (has_b_) std::fill(ws.noise_b.begin(), ws.noise_b.end(), Complex{});
  if (has_gamma_) std::fill(ws.noise_gamma.begin(), ws.noise_gamma.end(), 0.0);
  for (int k = 0; k < modes_; ++k) {
    const double w = dW[static_cast<std::size_t>(k)];
    const std::size_t off = static_cast<std::size_t>(k) * n;
    if (has_delta_) {
      const double* d = delta_.data() + off;
      double* out = ws.noise_delta.data();
      for (std::size_t i = 0; i < n; ++i) out[i] += d[i] * w;
    }
    if (has_b_) {
      const Complex* bk = b_.data() + off;
      for (std::size_t i = 0; i < n; ++i) ws.noise_b[i] += bk[i] * w;
    }
    if (has_gamma_) {
      const double* c = gamma_.data() + off;
      double* out = ws.noise_gamma.data();
      for (std::size_t i = 0; i < n; ++i) out[i] += c[i] * w;
    }
  }
}

template <class ShapeH, class ShapeS>
void Stepper::euler_step(LatticeState& s, Workspace& ws, ShapeH shape_h, ShapeS shape_s) const {
  const std::size_t n = sites_;
  const Complex* u = s.u.data();
  const double* v = s.v.data();
  const Complex* f = params_.f.data();
  const double* g = params_.g.data();
  double* a2 = ws.mod_sq.data();
  const bool periodic = boundary_ == Boundary::periodic;
  const bool coupling = params_.coupling;
  const double alpha = params_.alpha;
  const double beta = params_.beta;
  const double lambda = params_.lambda;
  const double eps = params_.epsilon;
  const double dt = dt_;

  auto rho_u = [&](Complex z) { return cutoff_ ? cutoff_complex(z, *cutoff_) : z; };
  auto rho_v = [&](double x) { return cutoff_ ? cutoff_real(x, *cutoff_) : x; };

  for (std::size_t i = 0; i < n; ++i) a2[i] = std::norm(rho_u(u[i]));

  for (std::size_t i = 0; i < n; ++i) {
    const Complex ul = i > 0 ? u[i - 1] : (periodic ? u[n - 1] : Complex{});
    const Complex ur = i + 1 < n ? u[i + 1] : (periodic ? u[0] : Complex{});
    const Complex au = 2.0 * u[i] - ul - ur;
    const Complex uc = rho_u(u[i]);
    const double vc = rho_v(v[i]);
    const Complex fm = coupling ? uc * vc : Complex{};
    const Complex du = times_minus_i(au + fm + f[i]) - alpha * u[i];
    const Complex noise_u = shape_h(uc) * ws.noise_delta[i] + ws.noise_b[i];
    ws.next_u[i] = u[i] + dt * du + eps * times_minus_i(noise_u);

    const double a2r = i + 1 < n ? a2[i + 1] : (periodic ? a2[0] : 0.0);
    const double dv = -beta * v[i] - lambda * (a2r - a2[i]) + g[i];
    ws.next_v[i] =
        v[i] + dt * dv + eps * (shape_s(vc) * ws.noise_delta[i] + ws.noise_gamma[i]);
  }
  std::copy(ws.next_u.begin(), ws.next_u.end(), s.u.begin());
  std::copy(ws.next_v.begin(), ws.next_v.end(), s.v.begin());
}

template <class ShapeH, class ShapeS>
void Stepper::exp_step(LatticeState& s, Workspace& ws, ShapeH shape_h, ShapeS shape_s) const {
  const std::size_t n = sites_;
  const Complex* u = s.u.data();
  double* v = s.v.data();
  const Complex* f = params_.f.data();
  const double* g = params_.g.data();
  double* a2 = ws.mod_sq.data();
  const bool periodic = boundary_ == Boundary::periodic;
  const bool coupling = params_.coupling;
  const double lambda = params_.lambda;
  const double eps = params_.epsilon;

  auto rho_u = [&](Complex z) { return cutoff_ ? cutoff_complex(z, *cutoff_) : z; };
  auto rho_v = [&](double x) { return cutoff_ ? cutoff_real(x, *cutoff_) : x; };

  for (std::size_t i = 0; i < n; ++i) a2[i] = std::norm(rho_u(u[i]));

  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const Complex uc = rho_u(u[i]);
    const double vc = rho_v(v[i]);
    const Complex fm = coupling ? uc * vc : Complex{};
    ws.nonlin(ii) = times_minus_i(fm + f[i]);
    const Complex noise_u = shape_h(uc) * ws.noise_delta[i] + ws.noise_b[i];
    ws.lin(ii) = u[i] + eps * times_minus_i(noise_u);

    const double a2r = i + 1 < n ? a2[i + 1] : (periodic ? a2[0] : 0.0);
    const double rest = -lambda * (a2r - a2[i]) + g[i];
    const double noisy =
        v[i] + eps * (shape_s(vc) * ws.noise_delta[i] + ws.noise_gamma[i]);
    ws.next_v[i] = exp_v_ * noisy + phi_v_ * rest;
  }
  Eigen::Map<Eigen::VectorXcd> out(s.u.data(), static_cast<Eigen::Index>(n));
  out.noalias() = exp_u_ * ws.lin;
  out.noalias() += phi_u_ * ws.nonlin;
  std::copy(ws.next_v.begin(), ws.next_v.end(), v);
}

void Stepper::step(LatticeState& state, std::span<const double> dW, Workspace& ws) const {
  if (dW.size() != static_cast<std::size_t>(modes_))
    throw DimensionError("increment vector length must equal the number of noise modes");
  if (params_.epsilon != 0.0) accumulate_noise(dW, ws);

  auto dispatch = [&](auto shape_h, auto shape_s) {
    if (scheme_ == Scheme::euler_maruyama) {
      euler_step(state, ws, shape_h, shape_s);
    } else {
      exp_step(state, ws, shape_h, shape_s);
    }
  };
  if (!has_delta_ || params_.epsilon == 0.0) {
    dispatch([](Complex) { return Complex{}; }, [](double) { return 0.0; });
    return;
  }
  switch (family_.kind()) {
    case DiffusionKind::linear_saturating: {
      const double c = family_.scale();
      const double o = family_.offset();
      dispatch(
          [c, o](Complex z) { return c * z / (1.0 + std::sqrt(std::norm(z))) + o; },
          [c, o](double x) { return c * x / (1.0 + std::abs(x)) + o; });
      break;
    }
    default: {
      const DiffusionFamily& fam = family_;
      dispatch([&fam](Complex z) { return fam.shape_h(z); },
               [&fam](double x) { return fam.shape_sigma(x); });
      break;
    }
  }
}

LatticeState step(const LatticeState& state, const SystemParams& params,
                  const DiffusionFamily& family, std::span<const double> increments, double dt,
                  Scheme scheme, std::optional<CutoffLevel> cutoff, Boundary boundary) {
  SimConfig cfg;
  cfg.M = state.radius();
  cfg.K = params.modes();
  cfg.dt = dt;
  cfg.scheme = scheme;
  cfg.cutoff = cutoff;
  cfg.boundary = boundary;
  const Stepper stepper(cfg, params, family);
  auto ws = stepper.make_workspace();
  LatticeState next = state;
  stepper.step(next, increments, ws);
  return next;
}

PathOutput simulate_path(const Stepper& stepper, const SimConfig& cfg, std::uint64_t path,
                         const RecordObserver& observer) {
  PathOutput out;
  out.path = path;
  LatticeState state = cfg.initial.sample(path);
  const NoiseStream stream(cfg.seed);
  const std::size_t steps = cfg.steps();
  const std::size_t q = cfg.noise_substeps;
  const double fine_dt = cfg.dt / static_cast<double>(q);
  std::vector<StoppingDetector> detectors;
  detectors.reserve(cfg.stopping_levels.size());
  for (const auto& level : cfg.stopping_levels) detectors.emplace_back(level, cfg.dt);

  const std::size_t n_records = steps / cfg.record_stride + 1;
  out.norms.reserve(n_records);
  if (cfg.store_states) out.snapshots.reserve(n_records);

  auto record = [&](double t, double nu2, double nv2) {
    out.norms.push_back({t, nu2, nu2 * nu2, nv2});
    if (cfg.store_states) out.snapshots.push_back({t, state});
    if (observer) observer(t, state);
  };

  double nu2 = norm_sq(state.u);
  double nv2 = norm_sq(state.v);
  for (auto& d : detectors) d.observe(0, std::sqrt(nu2) + std::sqrt(nv2));
  record(0.0, nu2, nv2);

  auto ws = stepper.make_workspace();
  std::vector<double> dW(static_cast<std::size_t>(stepper.modes()));
  std::vector<double> fine(dW.size());
  const bool noisy = stepper.params().epsilon != 0.0;
  for (std::size_t j = 1; j <= steps; ++j) {
    if (noisy) {
      if (q == 1) {
        stream.increments(path, j - 1, cfg.dt, dW);
      } else {
        std::fill(dW.begin(), dW.end(), 0.0);
        for (std::size_t r = 0; r < q; ++r) {
          stream.increments(path, (j - 1) * q + r, fine_dt, fine);
          for (std::size_t k = 0; k < dW.size(); ++k) dW[k] += fine[k];
        }
      }
    }
    stepper.step(state, dW, ws);
    nu2 = norm_sq(state.u);
    nv2 = norm_sq(state.v);
    const double t = static_cast<double>(j) * cfg.dt;
    if (!std::isfinite(nu2) || !std::isfinite(nv2)) throw BlowUpError(path, j, t);
    if (!detectors.empty()) {
      const double combined = std::sqrt(nu2) + std::sqrt(nv2);
      for (auto& d : detectors) d.observe(j, combined);
    }
    if (j % cfg.record_stride == 0) record(t, nu2, nv2);
  }
  out.stopping.reserve(detectors.size());
  for (const auto& d : detectors) out.stopping.push_back(d.record());
  return out;
}

PathOutput simulate_path(const SimConfig& config, const SystemParams& params,
                         const DiffusionFamily& family, std::uint64_t path) {
  config.validate(params, family);
  const Stepper stepper(config, params, family);
  return simulate_path(stepper, config, path);
}

void run_ensemble(const SimConfig& config, const SystemParams& params,
                  const DiffusionFamily& family, unsigned workers,
                  const std::function<void(PathOutput&&)>& consumer,
                  const std::function<RecordObserver(std::uint64_t)>& observer_for) {
  config.validate(params, family);
  const Stepper stepper(config, params, family);
  constexpr std::size_t kBatch = 32;
  const auto total = static_cast<std::size_t>(config.n_paths);
  std::vector<PathOutput> batch;
  for (std::size_t start = 0; start < total; start += kBatch) {
    const std::size_t count = std::min(kBatch, total - start);
    batch.assign(count, PathOutput{});
    parallel_for(count, workers, [&](std::size_t i) {
      const std::uint64_t path = start + i;
      batch[i] = simulate_path(stepper, config, path,
                               observer_for ? observer_for(path) : RecordObserver{});
    });
    for (auto& p : batch) consumer(std::move(p));
  }
}

std::vector<PathOutput> simulate_ensemble(const SimConfig& config, const SystemParams& params,
                                          const DiffusionFamily& family, unsigned workers) {
  std::vector<PathOutput> out;
  out.reserve(static_cast<std::size_t>(config.n_paths));
  run_ensemble(config, params, family, workers,
               [&](PathOutput&& p) { out.push_back(std::move(p)); });
  return out;
}

}  // namespace lsw
