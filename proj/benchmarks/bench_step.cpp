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

#include <benchmark/benchmark.h>

#include <vector>

#include "lsw/estimators.hpp"
#include "lsw/integrator.hpp"
#include "lsw/noise.hpp"

namespace {

struct Setup {
  lsw::SimConfig cfg;
  lsw::SystemParams params;
  lsw::DiffusionFamily family;
};

Setup make_setup(int M, int K, lsw::Scheme scheme) {
  Setup s;
  s.cfg.M = M;
  s.cfg.K = K;
  s.cfg.dt = 1e-3;
  s.cfg.scheme = scheme;
  s.params = lsw::SystemParams::unforced(M, K);
  s.params.epsilon = 0.1;
  s.params.f.at_site(0) = 1.0;
  s.params.gamma[0].at_site(0) = 0.5;
  s.family = lsw::DiffusionFamily(lsw::DiffusionKind::linear_saturating,
                                  lsw::DeltaSequence::separable(K, M, 0.5));
  return s;
}

void run_steps(benchmark::State& state, lsw::Scheme scheme, lsw::DiffusionKind kind) {
  const int M = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  Setup s = make_setup(M, K, scheme);
  s.family = lsw::DiffusionFamily(kind, lsw::DeltaSequence::separable(K, M, 0.5));
  const lsw::Stepper stepper(s.cfg, s.params, s.family);
  auto ws = stepper.make_workspace();
  lsw::LatticeState x = lsw::LatticeState::zero(M);
  x.u.at_site(0) = 1.0;
  const lsw::NoiseStream stream(1);
  std::vector<double> dW(static_cast<std::size_t>(K));
  std::uint64_t step = 0;
  for (auto _ : state) {
    stream.increments(0, step++, s.cfg.dt, dW);
    stepper.step(x, dW, ws);
    benchmark::DoNotOptimize(x.u.data());
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_EulerStep(benchmark::State& state) {
  run_steps(state, lsw::Scheme::euler_maruyama, lsw::DiffusionKind::linear_saturating);
}
BENCHMARK(BM_EulerStep)->Args({16, 4})->Args({64, 8})->Args({128, 8});

void BM_EulerStepSine(benchmark::State& state) {
  run_steps(state, lsw::Scheme::euler_maruyama, lsw::DiffusionKind::sine_bounded);
}
BENCHMARK(BM_EulerStepSine)->Args({64, 8});

void BM_ExpEulerStep(benchmark::State& state) {
  run_steps(state, lsw::Scheme::exp_euler_maruyama, lsw::DiffusionKind::linear_saturating);
}
BENCHMARK(BM_ExpEulerStep)->Args({16, 4})->Args({64, 8});

void BM_WienerIncrements(benchmark::State& state) {
  const lsw::NoiseStream stream(3);
  std::vector<double> dW(static_cast<std::size_t>(state.range(0)));
  std::uint64_t step = 0;
  for (auto _ : state) {
    stream.increments(0, step++, 1e-3, dW);
    benchmark::DoNotOptimize(dW.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WienerIncrements)->Arg(8)->Arg(64);

void BM_Wasserstein(benchmark::State& state) {
  const lsw::NoiseStream stream(5);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = stream.normal_pair(lsw::StreamDomain::bootstrap, 0, 0, i).first;
    b[i] = stream.normal_pair(lsw::StreamDomain::bootstrap, 1, 0, i).first;
  }
  for (auto _ : state) benchmark::DoNotOptimize(lsw::wasserstein1(a, b));
}
BENCHMARK(BM_Wasserstein)->Arg(10000);

}  // namespace
BENCHMARK_MAIN();
