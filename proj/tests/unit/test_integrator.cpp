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
#include <complex>

#include "lsw/error.hpp"
#include "lsw/integrator.hpp"
#include "reference.hpp"

namespace lsw {
namespace {

constexpr Complex kMinusI(0.0, -1.0);

struct Setup {
  SystemParams params;
  DiffusionFamily family;
  SimConfig sim;
};

Setup make_setup(int M, int K, double eps) {
  Setup s;
  s.params = SystemParams::unforced(M, K);
  s.params.epsilon = eps;
  s.family = DiffusionFamily(DiffusionKind::linear_saturating, DeltaSequence::separable(K, M, 0.5));
  s.sim.M = M;
  s.sim.K = K;
  s.sim.dt = 1e-2;
  s.sim.T = 0.5;
  s.sim.seed = 17;
  s.sim.initial = InitialCondition::zero(M);
  for (int m = -M; m <= M; ++m) {
    s.sim.initial.u.at_site(m) = std::polar(1.0 / (1.0 + m * m), 0.3 * m);
    s.sim.initial.v.at_site(m) = 0.5 * std::exp(-0.5 * m * m);
  }
  return s;
}

LatticeState test_state(int M) {
  auto s = LatticeState::zero(M);
  for (int m = -M; m <= M; ++m) {
    s.u.at_site(m) = Complex(std::sin(0.7 * m + 0.2), std::cos(1.3 * m));
    s.v.at_site(m) = 0.4 * std::cos(0.9 * m) - 0.1;
  }
  return s;
}

TEST(Scheme, NamesRoundTrip) {
  for (auto s : {Scheme::euler_maruyama, Scheme::exp_euler_maruyama})
    EXPECT_EQ(scheme_from_string(to_string(s)), s);
  EXPECT_THROW(scheme_from_string("rk4"), ConfigError);
}

TEST(EulerStep, DeterministicPartMatchesDenseDrift) {
  const int M = 5;
  for (auto b : {Boundary::zero_padding, Boundary::periodic}) {
    auto p = SystemParams::unforced(M, 2);
    for (int m = -M; m <= M; ++m) {
      p.f.at_site(m) = Complex(0.1 * m, -0.05);
      p.g.at_site(m) = 0.02 * m;
    }
    const auto fam = DiffusionFamily::zero(DeltaSequence::separable(2, M, 0.5));
    const auto s0 = test_state(M);
    const std::vector<double> dW = {0.0, 0.0};
    const auto s1 = step(s0, p, fam, dW, 0.01, Scheme::euler_maruyama, std::nullopt, b);
    Eigen::VectorXcd du;
    Eigen::VectorXd dv;
    ref::drift(s0, p, b, du, dv);
    const Eigen::VectorXcd eu = ref::to_vec(s0.u) + 0.01 * du;
    const Eigen::VectorXd ev = ref::to_vec(s0.v) + 0.01 * dv;
    EXPECT_LT((ref::to_vec(s1.u) - eu).norm(), 1e-14);
    EXPECT_LT((ref::to_vec(s1.v) - ev).norm(), 1e-14);
  }
}

TEST(EulerStep, NoiseTermUsesSameIncrementInBothComponents) {
  const int M = 3, K = 2;
  auto p = SystemParams::unforced(M, K);
  p.epsilon = 0.2;
  p.b[1].at_site(0) = Complex(0.3, 0.1);
  p.gamma[0].at_site(1) = 0.25;
  const DiffusionFamily fam(DiffusionKind::sine_bounded, DeltaSequence::separable(K, M, 0.5));
  const auto s0 = test_state(M);
  const std::vector<double> dW = {0.05, -0.08};
  const std::vector<double> zero = {0.0, 0.0};
  const auto noisy = step(s0, p, fam, dW, 0.01, Scheme::euler_maruyama);
  const auto quiet = step(s0, p, fam, zero, 0.01, Scheme::euler_maruyama);
  for (int m = -M; m <= M; ++m) {
    Complex hu{};
    double sv = 0.0;
    for (int k = 0; k < K; ++k) {
      hu += (fam.h(k, m, s0.u.at_site(m)) + p.b[k].at_site(m)) * dW[k];
      sv += (fam.sigma(k, m, s0.v.at_site(m)) + p.gamma[k].at_site(m)) * dW[k];
    }
    EXPECT_LT(std::abs(noisy.u.at_site(m) - quiet.u.at_site(m) - 0.2 * kMinusI * hu), 1e-15);
    EXPECT_NEAR(noisy.v.at_site(m) - quiet.v.at_site(m), 0.2 * sv, 1e-15);
  }
}

TEST(EulerStep, LargeCutoffLeavesStepUnchanged) {
  const int M = 4;
  auto p = SystemParams::unforced(M, 2);
  p.epsilon = 0.1;
  const DiffusionFamily fam(DiffusionKind::linear_saturating, DeltaSequence::separable(2, M, 0.5));
  const auto s0 = test_state(M);
  const std::vector<double> dW = {0.03, 0.01};
  const auto a = step(s0, p, fam, dW, 0.01, Scheme::euler_maruyama);
  const auto b = step(s0, p, fam, dW, 0.01, Scheme::euler_maruyama, CutoffLevel(100.0));
  EXPECT_EQ(a, b);
  const auto c = step(s0, p, fam, dW, 0.01, Scheme::euler_maruyama, CutoffLevel(0.1));
  EXPECT_NE(a, c);
}

TEST(LinearPropagator, MatchesDenseExponential) {
  for (auto b : {Boundary::zero_padding, Boundary::periodic}) {
    for (int M : {1, 4, 9}) {
      const double t = 0.37, alpha = 0.8;
      const auto lp = linear_propagator(M, alpha, t, b);
      const Eigen::MatrixXcd e = ref::propagator(M, alpha, t, b);
      EXPECT_LT((lp.exp_tl - e).norm(), 1e-13) << "M=" << M;
      // t phi_1(tL) = L^{-1} (e^{tL} - I)
      const int n = 2 * M + 1;
      const Eigen::MatrixXcd L =
          kMinusI * ref::dense_A(M, b).cast<Complex>() - alpha * Eigen::MatrixXcd::Identity(n, n);
      EXPECT_LT((L * lp.t_phi1_tl - (e - Eigen::MatrixXcd::Identity(n, n))).norm(), 1e-13);
    }
  }
}

TEST(LinearPropagator, SmallStepPhiIsAccurate) {
  const auto lp = linear_propagator(3, 1e-9, 1e-9, Boundary::zero_padding);
  // phi_1 -> I as t -> 0, so t phi_1(tL) ~ t I.
  EXPECT_NEAR(std::abs(lp.t_phi1_tl(0, 0) - 1e-9), 0.0, 1e-17);
}

TEST(ExpStep, ExactForLinearDeterministicSystem) {
  const int M = 6;
  auto p = SystemParams::unforced(M, 1);
  p.lambda = 0.0;
  p.coupling = false;
  const auto fam = DiffusionFamily::zero(DeltaSequence::separable(1, M, 0.5));
  SimConfig cfg;
  cfg.M = M;
  cfg.K = 1;
  cfg.dt = 0.25;
  cfg.T = 5.0;
  cfg.scheme = Scheme::exp_euler_maruyama;
  cfg.initial = InitialCondition::zero(M);
  cfg.initial.u.at_site(2) = Complex(1.0, -0.5);
  cfg.initial.v.at_site(0) = 0.7;
  const auto out = simulate_path(cfg, p, fam, 0);
  const Eigen::MatrixXcd e = ref::propagator(M, p.alpha, cfg.T, cfg.boundary);
  const Eigen::VectorXcd expected = e * ref::to_vec(cfg.initial.u);
  EXPECT_LT((ref::to_vec(out.snapshots.back().state.u) - expected).norm(), 1e-12);
  EXPECT_NEAR(out.snapshots.back().state.v.at_site(0), 0.7 * std::exp(-p.beta * cfg.T), 1e-14);
}

TEST(Simulate, RecordsOnStrideGrid) {
  auto s = make_setup(3, 2, 0.1);
  s.sim.record_stride = 10;
  const auto out = simulate_path(s.sim, s.params, s.family, 0);
  ASSERT_EQ(out.norms.size(), 6u);
  ASSERT_EQ(out.snapshots.size(), 6u);
  for (std::size_t i = 0; i < out.norms.size(); ++i) {
    EXPECT_NEAR(out.norms[i].t, 0.1 * static_cast<double>(i), 1e-12);
    EXPECT_NEAR(out.norms[i].norm_u_sq, norm_sq(out.snapshots[i].state.u), 1e-14);
    EXPECT_DOUBLE_EQ(out.norms[i].norm_u_4, out.norms[i].norm_u_sq * out.norms[i].norm_u_sq);
  }
  s.sim.store_states = false;
  const auto lean = simulate_path(s.sim, s.params, s.family, 0);
  EXPECT_TRUE(lean.snapshots.empty());
  ASSERT_EQ(lean.norms.size(), out.norms.size());
  EXPECT_EQ(lean.norms.back().norm_v_sq, out.norms.back().norm_v_sq);
}

TEST(Simulate, PathsAreReproducibleAndDistinct) {
  const auto s = make_setup(4, 3, 0.2);
  const auto a = simulate_path(s.sim, s.params, s.family, 3);
  const auto b = simulate_path(s.sim, s.params, s.family, 3);
  const auto c = simulate_path(s.sim, s.params, s.family, 4);
  EXPECT_EQ(a.snapshots.back().state, b.snapshots.back().state);
  EXPECT_NE(a.snapshots.back().state, c.snapshots.back().state);
}

TEST(Simulate, EnsembleIndependentOfWorkerCount) {
  auto s = make_setup(4, 3, 0.2);
  s.sim.n_paths = 70;
  const auto one = simulate_ensemble(s.sim, s.params, s.family, 1);
  const auto many = simulate_ensemble(s.sim, s.params, s.family, 5);
  ASSERT_EQ(one.size(), 70u);
  ASSERT_EQ(many.size(), 70u);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].path, i);
    EXPECT_EQ(many[i].path, i);
    EXPECT_EQ(one[i].snapshots.back().state, many[i].snapshots.back().state);
  }
}

TEST(Simulate, NoiseSubstepsShareBrownianPath) {
  // A run at dt with q = 2 aggregated increments and a run at dt/2 see the
  // same Brownian path, so their difference is a discretisation error that
  // shrinks with dt. Independent paths would differ at order eps.
  auto coarse = make_setup(3, 2, 0.3);
  coarse.sim.T = 1.0;
  auto fine = coarse;
  auto gap = [&](double dt) {
    coarse.sim.dt = dt;
    coarse.sim.noise_substeps = 2;
    fine.sim.dt = dt / 2;
    fine.sim.noise_substeps = 1;
    const auto a = simulate_path(coarse.sim, coarse.params, coarse.family, 1);
    const auto b = simulate_path(fine.sim, fine.params, fine.family, 1);
    const auto& sa = a.snapshots.back().state;
    const auto& sb = b.snapshots.back().state;
    return (ref::to_vec(sa.u) - ref::to_vec(sb.u)).norm() +
           (ref::to_vec(sa.v) - ref::to_vec(sb.v)).norm();
  };
  const double g1 = gap(0.02);
  const double g2 = gap(0.005);
  EXPECT_LT(g2, 0.5 * g1);
  EXPECT_LT(g2, 0.01);
}

TEST(Simulate, StoppingTimesRecorded) {
  auto s = make_setup(3, 2, 0.3);
  s.sim.stopping_levels = {CutoffLevel(0.01), CutoffLevel(1e6)};
  const auto out = simulate_path(s.sim, s.params, s.family, 0);
  ASSERT_EQ(out.stopping.size(), 2u);
  EXPECT_TRUE(out.stopping[0].hit());
  EXPECT_EQ(*out.stopping[0].hit_step, 0u);
  EXPECT_FALSE(out.stopping[1].hit());
}

TEST(InitialCondition, PerturbationIsPathSpecific) {
  auto ic = InitialCondition::zero(4);
  ic.u.at_site(0) = Complex(1.0, 0.0);
  EXPECT_EQ(ic.sample(0), ic.sample(9));
  ic.random_scale = 0.5;
  ic.seed = 3;
  EXPECT_EQ(ic.sample(2), ic.sample(2));
  EXPECT_NE(ic.sample(2), ic.sample(3));
  ic.envelope = RealSeq(4);
  ic.envelope.at_site(1) = 1.0;
  const auto s = ic.sample(5);
  EXPECT_EQ(s.u.at_site(0), Complex(1.0, 0.0));
  EXPECT_NE(s.u.at_site(1), Complex{});
  EXPECT_EQ(s.v.at_site(-2), 0.0);
}

TEST(SimConfig, Validation) {
  auto s = make_setup(3, 2, 0.1);
  EXPECT_NO_THROW(s.sim.validate(s.params, s.family));
  auto bad = s.sim;
  bad.T = 0.505;
  EXPECT_THROW(bad.validate(s.params, s.family), ConfigError);
  bad = s.sim;
  bad.dt = 0.0;
  EXPECT_THROW(bad.validate(s.params, s.family), ConfigError);
  bad = s.sim;
  bad.n_paths = 0;
  EXPECT_THROW(bad.validate(s.params, s.family), ConfigError);
  bad = s.sim;
  bad.dt = 0.25;
  EXPECT_THROW(bad.validate(s.params, s.family), ConfigError);
  bad.scheme = Scheme::exp_euler_maruyama;
  EXPECT_NO_THROW(bad.validate(s.params, s.family));
  bad = s.sim;
  bad.M = 4;
  EXPECT_THROW(bad.validate(s.params, s.family), DimensionError);
  EXPECT_EQ(s.sim.steps(), 50u);
}

}  // namespace
}  // namespace lsw
