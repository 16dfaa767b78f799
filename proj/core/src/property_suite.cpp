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

#include "lsw/property_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "lsw/error.hpp"

namespace lsw {

bool PropertyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

void PropertyReport::append(const PropertyReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

const PropertyCheck* PropertyReport::find(const std::string& name) const {
  auto it = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

OperatorSet OperatorSet::standard() {
  return {[](const ComplexSeq& u, Boundary b) { return apply_A(u, b); },
          [](const ComplexSeq& u, Boundary b) { return apply_B(u, b); },
          [](const ComplexSeq& u, Boundary b) { return apply_B_star(u, b); }};
}

namespace {

class Tracker {
 public:
  Tracker(std::string name, double tolerance) {
    check_.name = std::move(name);
    check_.tolerance = tolerance;
  }
  void observe(double value) {
    ++check_.trials;
    if (!(value <= check_.worst)) check_.worst = std::isnan(value) ? INFINITY : value;
  }
  PropertyCheck done(std::string detail = {}) {
    check_.passed = check_.worst <= check_.tolerance;
    check_.detail = std::move(detail);
    return check_;
  }

 private:
  PropertyCheck check_;
};

// Gaussian entries with a per-sequence scale spread over six decades.
ComplexSeq random_complex(int radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  const double scale = std::pow(10.0, expo(rng));
  ComplexSeq u(radius);
  for (auto& z : u) z = scale * Complex(normal(rng), normal(rng));
  return u;
}

Complex random_in_disk(double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double rho = r * std::sqrt(unit(rng));
  const double th = 2.0 * std::numbers::pi * unit(rng);
  return std::polar(rho, th);
}

}  // namespace

PropertyReport operator_identities(const OperatorSuiteOptions& options, const OperatorSet& ops) {
  std::mt19937_64 rng(options.seed);
  const double tol = options.tolerance;
  Tracker adj_zero("adjoint_zero_padding", tol);
  Tracker adj_per("adjoint_periodic", tol);
  Tracker fact_per("laplacian_factorization_periodic", tol);
  Tracker fact_zero("laplacian_factorization_zero_padding", tol);
  Tracker energy_per("energy_identity_periodic", tol);
  Tracker energy_zero("energy_identity_zero_padding", tol);
  Tracker positive("laplacian_nonnegative", tol);
  Tracker bound("difference_bound", tol);

  const int radius = options.radius;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const ComplexSeq u = random_complex(radius, rng);
    const ComplexSeq w = random_complex(radius, rng);
    const double nu = norm(u);
    const double nw = norm(w);
    const double nu2 = nu * nu;

    for (Boundary b : {Boundary::zero_padding, Boundary::periodic}) {
      const ComplexSeq bu = ops.B(u, b);
      const ComplexSeq au = ops.A(u, b);
      const Complex lhs = inner(bu, w);
      const Complex rhs = inner(u, ops.B_star(w, b));
      (b == Boundary::periodic ? adj_per : adj_zero).observe(std::abs(lhs - rhs) / (1.0 + nu * nw));

      ComplexSeq factor_gap = au - ops.B_star(bu, b);
      const double bu2 = norm_sq(bu);
      Complex energy_gap = inner(au, u) - bu2;
      if (b == Boundary::zero_padding) {
        factor_gap.at_site(-radius) -= u.at_site(-radius);
        energy_gap -= std::norm(u.at_site(-radius));
      }
      (b == Boundary::periodic ? fact_per : fact_zero).observe(norm(factor_gap) / (1.0 + nu));
      (b == Boundary::periodic ? energy_per : energy_zero)
          .observe(std::abs(energy_gap) / (1.0 + nu2));
      const Complex auu = inner(au, u);
      positive.observe(std::max({-auu.real(), std::abs(auu.imag()), 0.0}) / (1.0 + nu2));
      bound.observe(std::max(bu2 - 4.0 * nu2, 0.0) / (1.0 + nu2));
    }
  }
  PropertyReport r;
  for (Tracker* t : {&adj_zero, &adj_per, &fact_per, &fact_zero, &energy_per, &energy_zero,
                     &positive, &bound})
    r.checks.push_back(t->done());
  return r;
}

PropertyReport cutoff_properties(const CutoffSuiteOptions& options, const DiffusionFamily& family,
                                 double lambda) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const CutoffLevel level(options.level);
  const double n = options.level;

  Tracker lip_c("cutoff_complex_lipschitz", 2.0);
  Tracker lip_r("cutoff_real_lipschitz", 1.0);
  for (std::size_t i = 0; i < options.pairs; ++i) {
    // Half of the pairs are close together so the local factor is probed.
    const Complex z1 = random_in_disk(3.0 * n, rng);
    const double spread = (i % 2 == 0) ? 3.0 * n : 1e-3 * n;
    const Complex z2 = z1 + random_in_disk(spread, rng);
    const double dz = std::abs(z1 - z2);
    if (dz > 0.0)
      lip_c.observe(std::abs(cutoff_complex(z1, level) - cutoff_complex(z2, level)) / dz);
    const double s1 = (2.0 * unit(rng) - 1.0) * 3.0 * n;
    const double s2 = s1 + (2.0 * unit(rng) - 1.0) * spread;
    if (s1 != s2)
      lip_r.observe(std::abs(cutoff_real(s1, level) - cutoff_real(s2, level)) / std::abs(s1 - s2));
  }

  const int radius = family.radius();
  Tracker agree_f("truncated_F_agrees_inside_ball", 0.0);
  Tracker agree_g("truncated_G_agrees_inside_ball", 0.0);
  Tracker agree_h("truncated_h_agrees_inside_ball", 0.0);
  Tracker agree_s("truncated_sigma_agrees_inside_ball", 0.0);
  const TruncationConstants q = truncation_constants(family, lambda, level);
  Tracker q_f("truncated_F_lipschitz", 1.0);
  Tracker q_g("truncated_G_lipschitz", 1.0);
  Tracker q_h("truncated_h_lipschitz", 1.0);
  Tracker q_s("truncated_sigma_lipschitz", 1.0);

  auto sample = [&](double r, ComplexSeq& u, RealSeq& v) {
    for (auto& z : u) z = random_in_disk(r, rng);
    for (auto& x : v) x = (2.0 * unit(rng) - 1.0) * r;
  };
  ComplexSeq u1(radius), u2(radius);
  RealSeq v1(radius), v2(radius);
  for (std::size_t i = 0; i < options.agreement_trials; ++i) {
    sample(n, u1, v1);
    agree_f.observe(norm(truncated_F(u1, v1, level) - coupling_F(u1, v1)));
    agree_g.observe(norm(truncated_G(u1, level, lambda) - coupling_G(u1, lambda)));
    const auto h_trunc = truncated_h(family, u1, level);
    const auto h_full = eval_h(family, u1);
    const auto s_trunc = truncated_sigma(family, v1, level);
    const auto s_full = eval_sigma(family, v1);
    double dh = 0.0;
    double ds = 0.0;
    for (std::size_t k = 0; k < h_full.size(); ++k) {
      dh = std::max(dh, norm(h_trunc[k] - h_full[k]));
      ds = std::max(ds, norm(s_trunc[k] - s_full[k]));
    }
    agree_h.observe(dh);
    agree_s.observe(ds);

    sample(2.0 * n, u1, v1);
    sample(2.0 * n, u2, v2);
    const double du2 = norm_sq(u1 - u2);
    const double dv2 = norm_sq(v1 - v2);
    q_f.observe(norm_sq(truncated_F(u1, v1, level) - truncated_F(u2, v2, level)) /
                (q.q1 * (du2 + dv2)));
    if (q.q2 > 0.0) {
      q_g.observe(norm_sq(truncated_G(u1, level, lambda) - truncated_G(u2, level, lambda)) /
                  (q.q2 * du2));
    }
    const auto h1 = truncated_h(family, u1, level);
    const auto h2 = truncated_h(family, u2, level);
    const auto s1 = truncated_sigma(family, v1, level);
    const auto s2 = truncated_sigma(family, v2, level);
    double sh = 0.0;
    double ss = 0.0;
    for (std::size_t k = 0; k < h1.size(); ++k) {
      sh += norm_sq(h1[k] - h2[k]);
      ss += norm_sq(s1[k] - s2[k]);
    }
    if (q.q3 > 0.0) q_h.observe(sh / (q.q3 * du2));
    if (q.q4 > 0.0) q_s.observe(ss / (q.q4 * dv2));
  }

  PropertyReport r;
  for (Tracker* t : {&lip_c, &lip_r, &agree_f, &agree_g, &agree_h, &agree_s, &q_f, &q_g, &q_h,
                     &q_s})
    r.checks.push_back(t->done());
  return r;
}

PropertyReport truncation_consistency(const SimConfig& config, const SystemParams& params,
                                      const DiffusionFamily& family,
                                      const ConsistencyOptions& options) {
  if (options.levels.empty()) throw ConfigError("truncation consistency needs at least one level");
  SimConfig base = config;
  base.cutoff.reset();
  base.stopping_levels.clear();
  base.validate(params, family);
  const Stepper reference(base, params, family);
  std::vector<Stepper> truncated;
  for (const auto& level : options.levels) {
    SimConfig c = base;
    c.cutoff = level;
    truncated.emplace_back(c, params, family);
  }

  const NoiseStream stream(config.seed);
  const std::size_t steps = base.steps();
  Tracker tracker("truncation_level_consistency", options.tolerance_per_time);
  std::size_t stopped = 0;
  std::size_t compared_steps = 0;
  for (std::size_t path = 0; path < options.paths; ++path) {
    LatticeState ref = base.initial.sample(path);
    std::vector<LatticeState> states(truncated.size(), ref);
    std::vector<bool> active(truncated.size(), true);
    auto ws_ref = reference.make_workspace();
    std::vector<Stepper::Workspace> ws;
    for (const auto& s : truncated) ws.push_back(s.make_workspace());
    std::vector<double> dW(static_cast<std::size_t>(base.K));
    for (std::size_t i = 0; i < truncated.size(); ++i)
      if (norm(states[i].u) + norm(states[i].v) > options.levels[i].value()) active[i] = false;
    for (std::size_t j = 1; j <= steps; ++j) {
      if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) break;
      if (params.epsilon != 0.0) stream.increments(path, j - 1, base.dt, dW);
      reference.step(ref, dW, ws_ref);
      const double t = static_cast<double>(j) * base.dt;
      for (std::size_t i = 0; i < truncated.size(); ++i) {
        if (!active[i]) continue;
        truncated[i].step(states[i], dW, ws[i]);
        const double gap = norm(states[i].u - ref.u) + norm(states[i].v - ref.v);
        tracker.observe(gap / t);
        ++compared_steps;
        if (norm(states[i].u) + norm(states[i].v) > options.levels[i].value()) {
          active[i] = false;
          ++stopped;
        }
      }
    }
  }
  return {{tracker.done(std::to_string(stopped) + " level crossings, " +
                        std::to_string(compared_steps) + " compared steps")}};
}

}  // namespace lsw
