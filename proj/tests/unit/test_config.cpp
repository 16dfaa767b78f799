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

#include "config.hpp"
#include "lsw/error.hpp"

namespace lsw::app {
namespace {

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.sim.M, 16);
  EXPECT_EQ(c.noise.K, 4);
  EXPECT_EQ(c.noise.kind, "linear_saturating");
  EXPECT_DOUBLE_EQ(c.system.alpha, 1.0);
  EXPECT_FALSE(c.system.epsilon_fraction.has_value());
  EXPECT_EQ(c.output.formats, (std::vector<std::string>{"csv", "binary"}));
}

TEST(ParseConfig, ReadsNestedSections) {
  const auto c = parse_config(R"(
system:
  alpha: 1.5
  epsilon_fraction: 0.5
  f: {kind: gaussian, amplitude: 0.2, width: 3}
  b:
    - {kind: point, site: 1, amplitude: 0.1}
noise:
  kind: custom_table
  table: {r: [0, 1, 2], phi: [0, 1, 1.5]}
  K: 2
  seed: 99
sim:
  M: 8
  scheme: exp_euler_maruyama
  boundary: periodic
  cutoff_ladder: [2, 4]
  initial:
    u: {kind: point, site: 0, amplitude: 1.0, phase: 0.5}
    random_scale: 0.2
experiment:
  eps_pairs: [[0.1, 0.0], [0.2, 0.0]]
  tail_n: [0, 4]
output:
  directory: out
  formats: [csv]
)");
  EXPECT_DOUBLE_EQ(c.system.alpha, 1.5);
  EXPECT_DOUBLE_EQ(*c.system.epsilon_fraction, 0.5);
  EXPECT_EQ(c.system.f.kind, "gaussian");
  ASSERT_EQ(c.system.b.size(), 1u);
  EXPECT_EQ(c.system.b[0].site, 1);
  EXPECT_EQ(c.noise.table_phi.back(), 1.5);
  EXPECT_EQ(c.noise.seed, 99u);
  EXPECT_EQ(c.sim.boundary, "periodic");
  EXPECT_EQ(c.sim.cutoff_ladder.size(), 2u);
  EXPECT_DOUBLE_EQ(c.sim.initial.u.phase, 0.5);
  ASSERT_EQ(c.experiment.eps_pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(c.experiment.eps_pairs[1].first, 0.2);
  EXPECT_EQ(*c.output.directory, "out");

  const auto r = resolve(c);
  EXPECT_EQ(r.params.radius(), 8);
  EXPECT_NEAR(r.params.epsilon, 0.5 * r.derived->eps0, 1e-15);
  EXPECT_EQ(r.sim.boundary, Boundary::periodic);
  EXPECT_EQ(r.sim.stopping_levels.size(), 2u);
  EXPECT_EQ(r.sim.initial.u.at_site(0), std::polar(1.0, 0.5));
  EXPECT_EQ(r.params.b[0].at_site(1), Complex(0.1, 0.0));
  EXPECT_EQ(r.params.b[1].at_site(1), Complex{});
  EXPECT_NEAR(r.family.delta().norm_sq(), 0.5, 1e-14);
}

ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return ConfigError("none");
}

TEST(ParseConfig, UnknownKeyReportsPosition) {
  const auto e = parse_error("sim:\n  M: 4\n  dtt: 0.1\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.column(), 3);
  EXPECT_NE(std::string(e.what()).find("dtt"), std::string::npos);
}

TEST(ParseConfig, RejectsMalformedValues) {
  EXPECT_EQ(parse_error("sim:\n  M: four\n").line(), 2);
  EXPECT_EQ(parse_error("sim:\n  boundary: reflecting\n").line(), 2);
  EXPECT_EQ(parse_error("sim:\n  scheme: rk4\n").line(), 2);
  EXPECT_EQ(parse_error("noise:\n  delta_profile: random\n").line(), 2);
  EXPECT_EQ(parse_error("system:\n  f: {kind: spiral}\n").line(), 2);
  EXPECT_EQ(parse_error("experiment:\n  eps_pairs: [[0.1]]\n").line(), 2);
  EXPECT_EQ(parse_error("output:\n  formats: [hdf5]\n").line(), 2);
  EXPECT_GT(parse_error("sim: [1, 2\n").line(), 0);
  EXPECT_THROW(parse_config("physics: {}\n"), ConfigError);
}

TEST(Resolve, RejectsInconsistentSettings) {
  auto c = parse_config("system:\n  lambda: 1.0\n");
  EXPECT_THROW(resolve(c), ConfigError);  // alpha - 18 lambda^2 / beta < 0
  const auto unsafe = resolve(c, true);
  EXPECT_FALSE(unsafe.derived.has_value());
  EXPECT_THROW(unsafe.constants("moments"), ConfigError);

  c = parse_config("system:\n  epsilon: 5.0\n");
  EXPECT_THROW(resolve(c), ConfigError);
  EXPECT_NO_THROW(resolve(c, true));
  c.system.allow_unsafe_epsilon = true;
  EXPECT_NO_THROW(resolve(c));

  c = parse_config("sim:\n  M: 2\nsystem:\n  f: {kind: point, site: 3}\n");
  EXPECT_THROW(resolve(c), ConfigError);
  c = parse_config("sim:\n  M: 1\nsystem:\n  f: {kind: values, values: [1, 2]}\n");
  EXPECT_THROW(resolve(c), ConfigError);
  c = parse_config("noise:\n  K: 1\nsystem:\n  b: [zero, zero]\n");
  EXPECT_THROW(resolve(c), ConfigError);
  c = parse_config("sim:\n  dt: 0.3\n  T: 1.0\n  scheme: exp_euler_maruyama\n");
  EXPECT_THROW(resolve(c), ConfigError);
}

TEST(Resolve, ExplicitDeltaTable) {
  const auto c = parse_config(R"(
sim: {M: 1}
noise:
  K: 2
  delta_profile: values
  delta_values: [[0.1, 0.2, 0.1], [0, 0.3, 0]]
)");
  const auto r = resolve(c);
  EXPECT_DOUBLE_EQ(r.family.delta()(1, 0), 0.3);
  EXPECT_NEAR(r.family.delta().norm_sq(), 0.01 + 0.04 + 0.01 + 0.09, 1e-15);
}

TEST(Profiles, Shapes) {
  ProfileSpec p;
  p.kind = "box";
  p.amplitude = 2.0;
  p.center = 1.0;
  p.width = 1.0;
  const auto box = build_real(p, 3);
  EXPECT_EQ(box.at_site(-1), 0.0);
  EXPECT_EQ(box.at_site(0), 2.0);
  EXPECT_EQ(box.at_site(2), 2.0);
  EXPECT_EQ(box.at_site(3), 0.0);
  p.kind = "gaussian";
  p.center = 0.0;
  const auto g = build_real(p, 3);
  EXPECT_DOUBLE_EQ(g.at_site(2), 2.0 * std::exp(-2.0));
  p.kind = "values";
  p.re = {1, 2, 3};
  p.im = {0, 1, 0};
  const auto v = build_complex(p, 1);
  EXPECT_EQ(v.at_site(0), Complex(2.0, 1.0));
  EXPECT_THROW(build_real(p, 1), ConfigError);
}

TEST(ToJson, RoundTripsThroughYaml) {
  const auto c = parse_config("sim:\n  M: 5\n  cutoff: 3\nnoise:\n  K: 3\n");
  const auto j = to_json(c);
  EXPECT_EQ(j["sim"]["M"], 5);
  EXPECT_EQ(j["sim"]["cutoff"], 3.0);
  EXPECT_EQ(j["noise"]["K"], 3);
  EXPECT_TRUE(j["system"]["epsilon_fraction"].is_null());
  // JSON is a YAML subset, so the dump parses back to the same document.
  const auto again = parse_config(j.dump());
  EXPECT_EQ(to_json(again), j);
}

}  // namespace
}  // namespace lsw::app
