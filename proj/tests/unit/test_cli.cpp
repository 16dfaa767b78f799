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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"
#include "lsw/error.hpp"

namespace lsw::app {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("lsw_cli_") + info->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunOptions options(const std::string& sub, unsigned workers = 1) const {
    RunOptions o;
    o.workers = workers;
    o.output_dir = dir_ / sub;
    return o;
  }

  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

nlohmann::json manifest(const fs::path& dir) {
  return nlohmann::json::parse(slurp(dir / "manifest.json"));
}

const char* kSmall = R"(
system: {epsilon: 0.1}
noise: {K: 2, seed: 3}
sim:
  M: 3
  dt: 0.01
  T: 0.1
  n_paths: 3
  initial:
    u: {kind: point, amplitude: 0.5}
)";

TEST_F(CliTest, UnknownVerbAndBadConfigExitOne) {
  const auto c = parse_config(kSmall);
  EXPECT_EQ(run_verb("integrate", c, options("a")), kExitConfigError);
  auto bad = c;
  bad.system.lambda = 1.0;
  EXPECT_EQ(run_verb("simulate", bad, options("b")), kExitConfigError);
  // Configuration problems are reported before anything is written.
  EXPECT_FALSE(fs::exists(dir_ / "b"));
}

TEST_F(CliTest, SimulateWritesNormsTrajectoryAndManifest) {
  const auto c = parse_config(kSmall);
  ASSERT_EQ(run_verb("simulate", c, options("run")), kExitSuccess);
  const auto out = dir_ / "run";
  const auto m = manifest(out);
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["verb"], "simulate");
  EXPECT_EQ(m["seed"], 3);
  EXPECT_EQ(m["config"]["sim"]["M"], 3);
  EXPECT_TRUE(m.contains("wall_clock_seconds"));

  std::istringstream norms(slurp(out / "norms.csv"));
  std::string line;
  std::getline(norms, line);
  EXPECT_EQ(line, "path,t,norm_u_sq,norm_v_sq");
  int rows = 0;
  while (std::getline(norms, line)) ++rows;
  EXPECT_EQ(rows, 3 * 11);

  const auto records = read_trajectory(out / "trajectory.bin");
  ASSERT_EQ(records.size(), 33u);
  const auto r = resolve(c);
  const auto path2 = simulate_path(r.sim, r.params, r.family, 2);
  const auto& last = records.back();
  EXPECT_EQ(last.path, 2u);
  EXPECT_DOUBLE_EQ(last.t, 0.1);
  EXPECT_EQ(last.state, path2.snapshots.back().state);
  EXPECT_EQ(last.norm_u_sq, path2.norms.back().norm_u_sq);
}

TEST_F(CliTest, OutputIsIndependentOfWorkerCount) {
  auto c = parse_config(kSmall);
  c.sim.n_paths = 40;
  ASSERT_EQ(run_verb("simulate", c, options("w1", 1)), kExitSuccess);
  ASSERT_EQ(run_verb("simulate", c, options("w3", 3)), kExitSuccess);
  EXPECT_EQ(slurp(dir_ / "w1" / "norms.csv"), slurp(dir_ / "w3" / "norms.csv"));
  EXPECT_EQ(slurp(dir_ / "w1" / "trajectory.bin"), slurp(dir_ / "w3" / "trajectory.bin"));
}

TEST_F(CliTest, CsvOnlyFormatSkipsTrajectory) {
  auto c = parse_config(kSmall);
  c.output.formats = {"csv"};
  ASSERT_EQ(run_verb("simulate", c, options("csv")), kExitSuccess);
  EXPECT_TRUE(fs::exists(dir_ / "csv" / "norms.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "csv" / "trajectory.bin"));
}

TEST_F(CliTest, MomentsAndTailsVerbs) {
  auto c = parse_config(kSmall);
  c.sim.n_paths = 8;
  ASSERT_EQ(run_verb("moments", c, options("mom")), kExitSuccess);
  const auto m = manifest(dir_ / "mom");
  EXPECT_NEAR(m["results"]["kappa"].get<double>(), 0.91, 1e-12);
  EXPECT_EQ(m["results"]["violations"], 0);
  EXPECT_EQ(slurp(dir_ / "mom" / "moments.csv").substr(0, 45),
            "t,m4u,m4u_se,m2v,m2v_se,envelope,violation\n0,");
  ASSERT_EQ(run_verb("tails", c, options("tails")), kExitSuccess);
  EXPECT_TRUE(manifest(dir_ / "tails")["results"]["monotone_in_n"].get<bool>());
}

TEST_F(CliTest, BlowUpExitsTwo) {
  auto c = parse_config(R"(
sim:
  M: 2
  dt: 1.0
  T: 200
  scheme: exp_euler_maruyama
  initial:
    u: {kind: point, amplitude: 1000}
    v: {kind: box, amplitude: 1000, width: 2}
)");
  EXPECT_EQ(run_verb("simulate", c, options("boom")), kExitBlowUp);
  const auto m = manifest(dir_ / "boom");
  EXPECT_EQ(m["status"], "failed");
  EXPECT_EQ(m["exit_code"], kExitBlowUp);
}

TEST_F(CliTest, PropertyFailureExitsThreeWithCompleteManifest) {
  auto c = parse_config(R"(
system:
  f: {kind: gaussian, amplitude: 0.3}
sim:
  M: 4
  dt: 0.01
  T: 1
  initial:
    u: {kind: point, amplitude: 1}
experiment:
  oracle_tolerance: 1e-300
)");
  EXPECT_EQ(run_verb("oracle-check", c, options("oracle")), kExitPropertyFailure);
  const auto m = manifest(dir_ / "oracle");
  EXPECT_EQ(m["status"], "complete");
  EXPECT_FALSE(m["results"]["passed"].get<bool>());
  c.experiment.oracle_tolerance = 1e-10;
  EXPECT_EQ(run_verb("oracle-check", c, options("oracle_ok")), kExitSuccess);
}

TEST_F(CliTest, OutputDirectoryPrecedence) {
  RunConfig c;
  ::unsetenv("LSW_OUTPUT_DIR");
  EXPECT_EQ(output_directory(std::nullopt, c), fs::path("lsw_output"));
  ::setenv("LSW_OUTPUT_DIR", "from_env", 1);
  EXPECT_EQ(output_directory(std::nullopt, c), fs::path("from_env"));
  c.output.directory = "from_config";
  EXPECT_EQ(output_directory(std::nullopt, c), fs::path("from_config"));
  EXPECT_EQ(output_directory(std::string("from_flag"), c), fs::path("from_flag"));
  ::unsetenv("LSW_OUTPUT_DIR");
}

TEST_F(CliTest, WritersValidateInput) {
  fs::create_directories(dir_);
  CsvWriter w(dir_ / "x.csv", {"a", "b"});
  w.cell(1.5);
  EXPECT_THROW(w.end_row(), Error);
  std::ofstream(dir_ / "bad.bin") << "NOTATRAJECTORY";
  EXPECT_THROW(read_trajectory(dir_ / "bad.bin"), Error);
  TrajectoryWriter t(dir_ / "t.bin", 1);
  auto s = LatticeState::zero(1);
  s.u.at_site(1) = Complex(0.25, -1.0);
  s.v.at_site(-1) = 3.0;
  t.write(7, 0.5, s);
  t.close();
  EXPECT_EQ(fs::file_size(dir_ / "t.bin"), 16u + 4 * 8 + 9 * 8);
  const auto recs = read_trajectory(dir_ / "t.bin");
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].path, 7u);
  EXPECT_EQ(recs[0].state, s);
  EXPECT_DOUBLE_EQ(recs[0].norm_u_sq, 1.0625);
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(LSWSIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(CliTest, BinaryEntryPoint) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "small.yaml") << kSmall;
  std::ofstream(dir_ / "broken.yaml") << "sim:\n  M: 3\n  speed: 2\n";
  EXPECT_EQ(run_binary("--help"), 0);
  EXPECT_EQ(run_binary("simulate --no-such-flag"), kExitConfigError);
  EXPECT_EQ(run_binary(""), kExitConfigError);
  EXPECT_EQ(run_binary("simulate -c " + (dir_ / "missing.yaml").string()), kExitConfigError);
  EXPECT_EQ(run_binary("simulate -q -c " + (dir_ / "broken.yaml").string()), kExitConfigError);
  EXPECT_EQ(run_binary("simulate -q -w 2 -c " + (dir_ / "small.yaml").string() + " -o " +
                       (dir_ / "bin").string()),
            kExitSuccess);
  EXPECT_TRUE(fs::exists(dir_ / "bin" / "norms.csv"));
}

}  // namespace
}  // namespace lsw::app
