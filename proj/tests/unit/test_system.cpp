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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lsw/error.hpp"
#include "lsw/system.hpp"
#include "reference.hpp"

namespace lsw {
namespace {

TEST(DerivedConstants, ReferenceParameterSet) {
  SystemParams p = SystemParams::unforced(4, 2);
  p.alpha = 1.0;
  p.beta = 2.0;
  p.lambda = 0.1;
  const DerivedConstants c = derive_constants(p, 0.5);
  EXPECT_NEAR(c.kappa, 0.91, 1e-15);
  EXPECT_NEAR(c.kappa_tilde, 27.0, 1e-15);
  EXPECT_NEAR(c.eps0, std::sqrt(1.0 / 12.0), 1e-15);
  EXPECT_NEAR(c.absorbing_bound, 27.0 / 0.91, 1e-12);
  EXPECT_NEAR(c.envelope(0.0, 3.0), 3.0 + 27.0 / 0.91, 1e-12);
  EXPECT_NEAR(c.envelope(2.0, 3.0), 3.0 * std::exp(-1.82) + 27.0 / 0.91, 1e-12);
}

TEST(DerivedConstants, BetaLimitedRateAndSmallerNoiseThreshold) {
  SystemParams p = SystemParams::unforced(4, 2);
  p.alpha = 1.0;
  p.beta = 0.5;
  p.lambda = 0.05;
  const DerivedConstants c = derive_constants(p, 2.0);
  EXPECT_DOUBLE_EQ(c.kappa, 0.25);
  EXPECT_DOUBLE_EQ(c.kappa_tilde, 27.0);
  EXPECT_NEAR(c.eps0, std::sqrt(0.5 / 96.0), 1e-15);
  EXPECT_NEAR(c.eps0_max_form, std::sqrt(1.0 / 48.0), 1e-15);
}

TEST(DerivedConstants, LargeNoiseNormSelectsLastGainTerm) {
  SystemParams p = SystemParams::unforced(2, 1);
  p.alpha = 100.0;
  p.beta = 40.0;
  p.lambda = 0.0;
  const double d2 = 0.5;
  const DerivedConstants c = derive_constants(p, d2);
  EXPECT_DOUBLE_EQ(c.kappa_tilde, 40.0 * (1.0 + 8.0 * d2) / (8.0 * d2));
}

TEST(DerivedConstants, ForcingEntersQuartically) {
  SystemParams p = SystemParams::unforced(3, 2);
  p.f.at_site(0) = {1.0, 1.0};  // |f|^2 = 2
  p.g.at_site(1) = 1.0;         // |g|^2 = 1
  p.b[0].at_site(0) = 1.0;
  p.b[1].at_site(2) = 1.0;      // sum_k |b_k|^2 = 2
  p.gamma[1].at_site(0) = 3.0;  // 9
  EXPECT_DOUBLE_EQ(p.forcing_quartic(), 4.0 + 1.0 + 4.0 + 81.0);
  const DerivedConstants c = derive_constants(p, 0.5);
  EXPECT_NEAR(c.absorbing_bound, c.kappa_tilde / c.kappa * 91.0, 1e-12);
}

TEST(DerivedConstants, DissipativityFailureNamesTheInequality) {
  SystemParams p = SystemParams::unforced(2, 1);
  p.alpha = 0.1;
  p.beta = 1.0;
  p.lambda = 0.1;
  try {
    derive_constants(p, 0.5);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha - 18 lambda^2 / beta"), std::string::npos);
  }
}

TEST(DerivedConstants, RequiresPositiveNoiseBound) {
  const SystemParams p = SystemParams::unforced(2, 1);
  EXPECT_THROW(derive_constants(p, 0.0), ConfigError);
}

TEST(NoiseIntensity, CheckedAgainstThreshold) {
  SystemParams p = SystemParams::unforced(2, 1);
  const DerivedConstants c = derive_constants(p, 0.5);
  p.epsilon = 0.99 * c.eps0;
  EXPECT_NO_THROW(check_noise_intensity(p, c, false));
  p.epsilon = 1.01 * c.eps0;
  EXPECT_THROW(check_noise_intensity(p, c, false), ConfigError);
  EXPECT_NO_THROW(check_noise_intensity(p, c, true));
}

TEST(Params, Validation) {
  SystemParams p = SystemParams::unforced(2, 2);
  EXPECT_NO_THROW(p.validate());
  p.alpha = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.alpha = 1.0;
  p.epsilon = -0.1;
  EXPECT_THROW(p.validate(), ConfigError);
  p.epsilon = 0.0;
  p.gamma.pop_back();
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Drift, MatchesDenseAssembly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (Boundary b : {Boundary::zero_padding, Boundary::periodic}) {
    SystemParams p = SystemParams::unforced(5, 1);
    p.alpha = 0.7;
    p.beta = 1.3;
    p.lambda = 0.2;
    LatticeState s = LatticeState::zero(5);
    for (std::size_t i = 0; i < s.u.size(); ++i) {
      s.u[i] = {n(rng), n(rng)};
      s.v[i] = n(rng);
      p.f[i] = {n(rng), n(rng)};
      p.g[i] = n(rng);
    }
    const Drift d = drift(s, p, b);
    Eigen::VectorXcd du;
    Eigen::VectorXd dv;
    ref::drift(s, p, b, du, dv);
    EXPECT_LT((ref::to_vec(d.du) - du).norm(), 1e-12);
    EXPECT_LT((ref::to_vec(d.dv) - dv).norm(), 1e-12);
  }
}

TEST(Drift, CouplingConservesModulus) {
  // Re (-i u v, u) = 0 for real v: the coupling only rotates phases.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n;
  ComplexSeq u(4);
  RealSeq v(4);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = {n(rng), n(rng)};
    v[i] = n(rng);
  }
  const ComplexSeq f = coupling_F(u, v);
  EXPECT_NEAR((Complex(0, -1) * inner(f, u)).real(), 0.0, 1e-13);
}

TEST(Coupling, GIsForwardDifferenceOfModulus) {
  ComplexSeq u(2);
  u.at_site(0) = {0.0, 2.0};
  const RealSeq g = coupling_G(u, 0.5);
  EXPECT_DOUBLE_EQ(g.at_site(-1), 0.5 * 4.0);
  EXPECT_DOUBLE_EQ(g.at_site(0), -0.5 * 4.0);
  EXPECT_DOUBLE_EQ(g.at_site(1), 0.0);
}

}  // namespace
}  // namespace lsw
