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

#include "lsw/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lsw {

SystemParams SystemParams::unforced(int radius, int modes) {
  SystemParams p;
  p.f = ComplexSeq(radius);
  p.g = RealSeq(radius);
  p.b.assign(static_cast<std::size_t>(modes), ComplexSeq(radius));
  p.gamma.assign(static_cast<std::size_t>(modes), RealSeq(radius));
  return p;
}

double SystemParams::b_norm_sq() const {
  double s = 0.0;
  for (const auto& bk : b) s += norm_sq(bk);
  return s;
}

double SystemParams::gamma_norm_sq() const {
  double s = 0.0;
  for (const auto& gk : gamma) s += norm_sq(gk);
  return s;
}

double SystemParams::forcing_quartic() const {
  const double f2 = norm_sq(f);
  const double g2 = norm_sq(g);
  const double b2 = b_norm_sq();
  const double c2 = gamma_norm_sq();
  return f2 * f2 + g2 * g2 + b2 * b2 + c2 * c2;
}

void SystemParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (f.empty() || g.empty()) throw ConfigError("forcing sequences f and g are required");
  require_same_radius(f, g);
  if (b.size() != gamma.size())
    throw ConfigError("b and gamma must list the same number of noise modes");
  for (const auto& bk : b) require_same_radius(f, bk);
  for (const auto& gk : gamma) require_same_radius(f, gk);
  if (!f.all_finite() || !g.all_finite()) throw ConfigError("forcing must be finite");
  for (const auto& bk : b)
    if (!bk.all_finite()) throw ConfigError("additive noise profile b must be finite");
  for (const auto& gk : gamma)
    if (!gk.all_finite()) throw ConfigError("additive noise profile gamma must be finite");
}

double DerivedConstants::envelope(double t, double initial_moment) const {
  return std::exp(-kappa * t) * initial_moment + absorbing_bound;
}

DerivedConstants derive_constants(const SystemParams& p, double delta_norm_sq) {
  const double margin = p.alpha - 18.0 * p.lambda * p.lambda / p.beta;
  if (!(margin > 0.0)) {
    std::ostringstream os;
    os << "dissipativity condition alpha - 18 lambda^2 / beta > 0 violated: " << p.alpha
       << " - 18 * " << p.lambda << "^2 / " << p.beta << " = " << margin;
    throw ConfigError(os.str());
  }
  if (!(delta_norm_sq > 0.0)) {
    throw ConfigError("the noise bound sequence delta must have positive norm");
  }
  const double a = p.alpha;
  const double b = p.beta;
  const double d2 = delta_norm_sq;

  DerivedConstants c;
  c.kappa = std::min(margin, b / 2.0);
  c.kappa_tilde = std::max({27.0 / a, 2.0 / b, 9.0 * b * b / (576.0 * a * d2 * d2),
                            b / (4.0 * d2), b * (1.0 + 8.0 * d2) / (8.0 * d2)});
  const double e1 = std::sqrt(a / (24.0 * d2));
  const double e2 = std::sqrt(b / (48.0 * d2));
  c.eps0 = std::min(e1, e2);
  c.eps0_max_form = std::max(e1, e2);
  c.absorbing_bound = c.kappa_tilde / c.kappa * (1.0 + p.forcing_quartic());
  return c;
}

void check_noise_intensity(const SystemParams& params, const DerivedConstants& derived,
                           bool allow_outside) {
  if (params.epsilon <= derived.eps0 || allow_outside) return;
  std::ostringstream os;
  os << "noise intensity epsilon = " << params.epsilon << " exceeds eps0 = " << derived.eps0
     << "; set system.allow_unsafe_epsilon to run outside the admissible range";
  throw ConfigError(os.str());
}

ComplexSeq coupling_F(const ComplexSeq& u, const RealSeq& v) {
  require_same_radius(u, v);
  ComplexSeq out(u.radius());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * v[i];
  return out;
}

RealSeq coupling_G(const ComplexSeq& u, double lambda, Boundary b) {
  RealSeq out = apply_B(abs_sq(u), b);
  out *= lambda;
  return out;
}

Drift drift(const LatticeState& state, const SystemParams& p, Boundary b) {
  require_same_radius(state.u, p.f);
  const Complex i_unit(0.0, 1.0);
  ComplexSeq au = apply_A(state.u, b);
  ComplexSeq du(state.radius());
  for (std::size_t m = 0; m < du.size(); ++m) {
    const Complex fm = p.coupling ? state.u[m] * state.v[m] : Complex{};
    du[m] = -i_unit * (au[m] + fm + p.f[m]) - p.alpha * state.u[m];
  }
  RealSeq gu = coupling_G(state.u, p.lambda, b);
  RealSeq dv(state.radius());
  for (std::size_t m = 0; m < dv.size(); ++m) dv[m] = -p.beta * state.v[m] - gu[m] + p.g[m];
  return {std::move(du), std::move(dv)};
}

}  // namespace lsw
