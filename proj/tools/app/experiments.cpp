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

#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>

#include <fmt/format.h>

#include "lsw/error.hpp"
#include "lsw/estimators.hpp"
#include "lsw/oracle.hpp"
#include "lsw/property_suite.hpp"
#include "output.hpp"

namespace lsw::app {

namespace {

/// Raised when a verb finishes its outputs but a checked property fails.
struct PropertyFailure {
  std::string message;
};

struct Context {
  const RunConfig& config;
  const ResolvedRun& run;
  const RunOptions& options;
  Manifest& manifest;

  bool csv() const { return wants("csv"); }
  bool binary() const { return wants("binary"); }
  bool wants(std::string_view f) const {
    const auto& fs = config.output.formats;
    return std::find(fs.begin(), fs.end(), f) != fs.end();
  }
  std::filesystem::path file(const std::string& name) const {
    manifest.add_output(name);
    return options.output_dir / name;
  }
  template <class... Args>
  void log(fmt::format_string<Args...> f, Args&&... args) const {
    if (options.log) *options.log << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
};

class StoppingTally {
 public:
  explicit StoppingTally(const SimConfig& sim) {
    for (const auto& l : sim.stopping_levels) levels_.push_back(l.value());
    escapes_.assign(levels_.size(), 0);
  }
  void add(const PathOutput& p) {
    for (std::size_t i = 0; i < p.stopping.size(); ++i)
      if (p.stopping[i].hit()) ++escapes_[i];
    ++paths_;
  }
  void write(Context& ctx) const {
    if (levels_.empty()) return;
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      summary.push_back({{"n", levels_[i]},
                         {"escapes", escapes_[i]},
                         {"probability", probability(i)}});
    }
    ctx.manifest.results()["stopping"] = summary;
    if (!ctx.csv()) return;
    CsvWriter w(ctx.file("stopping.csv"), {"n", "paths", "escapes", "probability"});
    for (std::size_t i = 0; i < levels_.size(); ++i)
      w.cell(levels_[i]).cell(paths_).cell(escapes_[i]).cell(probability(i)).end_row();
    w.close();
  }

 private:
  double probability(std::size_t i) const {
    return paths_ == 0 ? 0.0 : static_cast<double>(escapes_[i]) / static_cast<double>(paths_);
  }
  std::vector<double> levels_;
  std::vector<std::size_t> escapes_;
  std::size_t paths_ = 0;
};

void write_properties(Context& ctx, const PropertyReport& report) {
  if (ctx.csv()) {
    CsvWriter w(ctx.file("properties.csv"),
                {"check", "trials", "worst", "tolerance", "passed", "detail"});
    for (const auto& c : report.checks)
      w.cell(c.name).cell(c.trials).cell(c.worst).cell(c.tolerance).cell(c.passed).cell(c.detail).end_row();
    w.close();
  }
  ctx.log("{:<40} {:>8} {:>12} {:>12}  {}", "check", "trials", "worst", "tolerance", "result");
  for (const auto& c : report.checks) {
    ctx.log("{:<40} {:>8} {:>12.4g} {:>12.4g}  {}{}", c.name, c.trials, c.worst, c.tolerance,
            c.passed ? "pass" : "FAIL", c.detail.empty() ? "" : "  (" + c.detail + ")");
  }
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& c : report.checks)
    if (!c.passed) failed.push_back(c.name);
  ctx.manifest.results()["failed_checks"] = failed;
  ctx.manifest.results()["passed"] = report.passed();
}

int verb_validate_operators(Context& ctx) {
  const auto& e = ctx.config.experiment;
  PropertyReport report;
  OperatorSuiteOptions op;
  op.radius = e.operator_radius;
  op.trials = e.operator_trials;
  report.append(operator_identities(op));
  ctx.manifest.stage("operator_identities");

  CutoffSuiteOptions cut;
  cut.pairs = e.cutoff_pairs;
  cut.level = e.cutoff_level;
  report.append(cutoff_properties(cut, ctx.run.family, ctx.run.params.lambda));
  ctx.manifest.stage("cutoff_properties");

  ConsistencyOptions cons;
  cons.paths = e.consistency_paths;
  cons.levels = ctx.run.sim.stopping_levels;
  if (cons.levels.empty()) {
    for (double f : {1.0, 2.0, 4.0}) cons.levels.emplace_back(f * e.cutoff_level);
  }
  report.append(truncation_consistency(ctx.run.sim, ctx.run.params, ctx.run.family, cons));
  ctx.manifest.stage("truncation_consistency");

  write_properties(ctx, report);
  if (!report.passed()) throw PropertyFailure{"operator or truncation property check failed"};
  return kExitSuccess;
}

int verb_simulate(Context& ctx) {
  const SimConfig& sim = ctx.run.sim;
  std::optional<CsvWriter> norms;
  std::optional<TrajectoryWriter> traj;
  if (ctx.csv()) norms.emplace(ctx.file("norms.csv"), std::initializer_list<std::string_view>{
                                                          "path", "t", "norm_u_sq", "norm_v_sq"});
  if (ctx.binary() && sim.store_states) traj.emplace(ctx.file("trajectory.bin"), sim.M);
  StoppingTally stopping(sim);
  run_ensemble(sim, ctx.run.params, ctx.run.family, ctx.options.workers, [&](PathOutput&& p) {
    if (norms) {
      for (const auto& s : p.norms) norms->cell(p.path).cell(s.t).cell(s.norm_u_sq).cell(s.norm_v_sq).end_row();
    }
    if (traj) {
      for (const auto& s : p.snapshots) traj->write(p.path, s.t, s.state);
    }
    stopping.add(p);
  });
  ctx.manifest.stage("simulate");
  if (norms) norms->close();
  if (traj) traj->close();
  stopping.write(ctx);
  ctx.manifest.stage("write");
  ctx.log("simulated {} paths over {} steps", sim.n_paths, sim.steps());
  return kExitSuccess;
}

int verb_moments(Context& ctx) {
  const DerivedConstants& derived = ctx.run.constants("the moments verb");
  SimConfig sim = ctx.run.sim;
  sim.store_states = false;
  MomentAccumulator acc;
  StoppingTally stopping(sim);
  run_ensemble(sim, ctx.run.params, ctx.run.family, ctx.options.workers, [&](PathOutput&& p) {
    acc.add(p);
    stopping.add(p);
  });
  ctx.manifest.stage("simulate");
  const MomentSeries series = acc.finish(derived);
  double worst_ratio = 0.0;
  for (const auto& r : series.rows) worst_ratio = std::max(worst_ratio, r.sum.mean / r.envelope);
  if (ctx.csv()) {
    CsvWriter w(ctx.file("moments.csv"),
                {"t", "m4u", "m4u_se", "m2v", "m2v_se", "envelope", "violation"});
    for (const auto& r : series.rows) {
      w.cell(r.t).cell(r.m4u.mean).cell(r.m4u.se).cell(r.m2v.mean).cell(r.m2v.se);
      w.cell(r.envelope).cell(r.violation).end_row();
    }
    w.close();
  }
  stopping.write(ctx);
  auto& res = ctx.manifest.results();
  res["kappa"] = derived.kappa;
  res["kappa_tilde"] = derived.kappa_tilde;
  res["eps0"] = derived.eps0;
  res["epsilon"] = ctx.run.params.epsilon;
  res["absorbing_bound"] = derived.absorbing_bound;
  res["initial_moment"] = series.initial_moment;
  res["violations"] = series.violations();
  res["max_moment_to_envelope"] = worst_ratio;
  ctx.manifest.stage("write");
  ctx.log("kappa = {:.6g}, kappa_tilde = {:.6g}, eps0 = {:.6g}, eps = {:.6g}", derived.kappa,
          derived.kappa_tilde, derived.eps0, ctx.run.params.epsilon);
  ctx.log("{} grid times, {} envelope violations, max E[|u|^4+|v|^2] / envelope = {:.4g}",
          series.rows.size(), series.violations(), worst_ratio);
  if (series.violations() > 0) throw PropertyFailure{"moment estimates exceed the envelope"};
  return kExitSuccess;
}

std::vector<int> tail_radii(const ExperimentSection& e, int M) {
  std::vector<int> n = e.tail_n;
  if (n.empty()) n = {0, M / 4, M / 2, (2 * M) / 3, M};
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  return n;
}

int verb_tails(Context& ctx) {
  SimConfig sim = ctx.run.sim;
  sim.store_states = true;
  TailAccumulator acc(tail_radii(ctx.config.experiment, sim.M), sim.M);
  run_ensemble(sim, ctx.run.params, ctx.run.family, ctx.options.workers,
               [&](PathOutput&& p) { acc.add(p); });
  ctx.manifest.stage("simulate");
  const TailSeries tails = acc.finish();
  if (ctx.csv()) {
    CsvWriter w(ctx.file("tails.csv"), {"t", "n", "tail", "smooth_tail"});
    for (std::size_t k = 0; k < tails.times.size(); ++k)
      for (std::size_t j = 0; j < tails.n_values.size(); ++j)
        w.cell(tails.times[k]).cell(tails.n_values[j]).cell(tails.hard[k][j]).cell(tails.smooth[k][j]).end_row();
    w.close();
  }
  const bool monotone = tails.monotone_in_n();
  ctx.manifest.results()["monotone_in_n"] = monotone;
  ctx.manifest.stage("write");
  ctx.log("{} grid times x {} tail radii, monotone in n: {}", tails.times.size(),
          tails.n_values.size(), monotone ? "yes" : "no");
  if (!monotone) throw PropertyFailure{"tail mass increases with n"};
  return kExitSuccess;
}

KbOptions kb_options(const Context& ctx) {
  const auto& e = ctx.config.experiment;
  KbOptions kb;
  kb.burn_in = e.burn_in ? *e.burn_in : default_burn_in(ctx.run.constants("the default burn-in"));
  kb.avg_T = e.avg_T;
  kb.observables = observables_by_name(e.observables);
  kb.workers = ctx.options.workers;
  return kb;
}

int verb_invariant_measure(Context& ctx) {
  const KbOptions kb = kb_options(ctx);
  const EmpiricalMeasure m = kb_measure(ctx.run.sim, ctx.run.params, ctx.run.family, kb);
  ctx.manifest.stage("simulate");
  nlohmann::json summary = nlohmann::json::object();
  std::optional<CsvWriter> sw;
  if (ctx.csv())
    sw.emplace(ctx.file("measure_summary.csv"),
               std::initializer_list<std::string_view>{"observable", "samples", "mean", "std"});
  for (std::size_t o = 0; o < m.observable_count(); ++o) {
    RunningStat stat;
    for (double x : m.samples(o)) stat.add(x);
    summary[m.names()[o]] = {{"mean", stat.mean()}, {"std", std::sqrt(stat.variance())}};
    if (sw) sw->cell(m.names()[o]).cell(stat.count()).cell(stat.mean()).cell(std::sqrt(stat.variance())).end_row();
    if (ctx.csv()) {
      const Histogram h = m.histogram(o, ctx.config.experiment.histogram_bins);
      CsvWriter w(ctx.file("measure_" + m.names()[o] + ".csv"), {"bin_lo", "bin_hi", "mass"});
      for (std::size_t i = 0; i < h.mass.size(); ++i)
        w.cell(h.edges[i]).cell(h.edges[i + 1]).cell(h.mass[i]).end_row();
      w.close();
    }
    ctx.log("{:<10} mean {:.6g}  std {:.6g}", m.names()[o], stat.mean(), std::sqrt(stat.variance()));
  }
  if (sw) sw->close();
  auto& res = ctx.manifest.results();
  res["burn_in"] = kb.burn_in;
  res["avg_T"] = kb.avg_T;
  res["samples"] = m.size();
  res["observables"] = summary;
  ctx.manifest.stage("write");
  return kExitSuccess;
}

int verb_eps_sweep(Context& ctx) {
  const auto& e = ctx.config.experiment;
  if (e.eps_pairs.empty() && e.eps_list.empty())
    throw ConfigError("eps-sweep needs experiment.eps_pairs or experiment.eps_list");
  auto& res = ctx.manifest.results();
  if (!e.eps_pairs.empty()) {
    SimConfig sim = ctx.run.sim;
    const DivergenceTable t =
        eps_divergence(sim, ctx.run.params, ctx.run.family, e.eps_pairs, ctx.options.workers);
    ctx.manifest.stage("eps_divergence");
    if (ctx.csv()) {
      CsvWriter w(ctx.file("eps_divergence.csv"), {"eps1", "eps2", "abs_gap", "divergence", "se"});
      for (const auto& r : t.rows)
        w.cell(r.eps1).cell(r.eps2).cell(std::abs(r.eps1 - r.eps2)).cell(r.divergence.mean).cell(r.divergence.se).end_row();
      w.close();
    }
    res["divergence_slope"] = std::isnan(t.slope) ? nlohmann::json(nullptr) : nlohmann::json(t.slope);
    for (const auto& r : t.rows)
      ctx.log("eps ({:.4g}, {:.4g}): divergence {:.6g} +- {:.2g}", r.eps1, r.eps2,
              r.divergence.mean, r.divergence.se);
    if (!std::isnan(t.slope)) ctx.log("log-log slope {:.4f}", t.slope);
  }
  if (!e.eps_list.empty()) {
    SweepOptions opt;
    opt.kb = kb_options(ctx);
    opt.bootstrap_replicates = e.bootstrap_replicates;
    opt.bootstrap_seed = e.bootstrap_seed;
    const auto rows = eps_measure_sweep(ctx.run.sim, ctx.run.params, ctx.run.family, e.eps_list, opt);
    ctx.manifest.stage("eps_measure_sweep");
    if (ctx.csv()) {
      CsvWriter w(ctx.file("eps_measure.csv"), {"eps", "distance", "noise_floor"});
      for (const auto& r : rows) w.cell(r.eps).cell(r.distance).cell(r.noise_floor).end_row();
      w.close();
    }
    std::vector<double> eps;
    std::vector<double> dist;
    for (const auto& r : rows) {
      eps.push_back(r.eps);
      dist.push_back(r.distance);
      ctx.log("eps {:.4g}: distance {:.6g} (noise floor {:.3g})", r.eps, r.distance, r.noise_floor);
    }
    if (rows.size() >= 2) {
      const double rho = spearman(eps, dist);
      res["spearman"] = std::isnan(rho) ? nlohmann::json(nullptr) : nlohmann::json(rho);
      ctx.log("Spearman rank correlation {:.4f}", rho);
    }
  }
  ctx.manifest.stage("write");
  return kExitSuccess;
}

int verb_oracle_check(Context& ctx) {
  const SimConfig& base = ctx.run.sim;
  if (base.M > kOracleMaxRadius)
    throw ConfigError(fmt::format("oracle-check requires sim.M <= {}", kOracleMaxRadius));
  SystemParams p = ctx.run.params;
  p.lambda = 0.0;
  p.epsilon = 0.0;
  p.coupling = false;
  const DiffusionFamily fam = DiffusionFamily::zero(ctx.run.family.delta());
  const LatticeState initial = base.initial.sample(0);
  const double tol = ctx.config.experiment.oracle_tolerance;

  SimConfig exp_cfg = base;
  exp_cfg.scheme = Scheme::exp_euler_maruyama;
  exp_cfg.n_paths = 1;
  exp_cfg.store_states = true;
  exp_cfg.stopping_levels.clear();
  exp_cfg.cutoff.reset();
  const PathOutput exp_run = simulate_path(exp_cfg, p, fam, 0);

  SimConfig euler_cfg = exp_cfg;
  euler_cfg.scheme = Scheme::euler_maruyama;
  std::optional<PathOutput> euler_run;
  if (base.dt * (4.0 + p.alpha) <= 0.5) euler_run = simulate_path(euler_cfg, p, fam, 0);
  ctx.manifest.stage("simulate");

  double worst = 0.0;
  std::optional<CsvWriter> w;
  if (ctx.csv())
    w.emplace(ctx.file("oracle.csv"), std::initializer_list<std::string_view>{
                                          "t", "oracle_norm_u", "exp_error", "euler_error"});
  for (std::size_t i = 0; i < exp_run.snapshots.size(); ++i) {
    const double t = exp_run.snapshots[i].t;
    const ComplexSeq ref = ou_complex_mean(initial.u, p.f, p.alpha, t, base.boundary);
    const double err = norm(exp_run.snapshots[i].state.u - ref);
    const double euler_err =
        euler_run ? norm(euler_run->snapshots[i].state.u - ref) : std::nan("");
    worst = std::max(worst, err / std::max(1.0, t));
    if (w) w->cell(t).cell(norm(ref)).cell(err).cell(euler_err).end_row();
  }
  if (w) w->close();

  if (ctx.csv()) {
    CsvWriter s(ctx.file("ou_stationary.csv"), {"site", "mean", "variance"});
    for (int m = -base.M; m <= base.M; ++m) {
      std::vector<double> gamma_site;
      for (const auto& gk : ctx.run.params.gamma) gamma_site.push_back(gk.at_site(m));
      const ScalarMoments st = ou_real_stationary(p.beta, ctx.run.params.epsilon, gamma_site,
                                                  ctx.run.params.g.at_site(m));
      s.cell(m).cell(st.mean).cell(st.variance).end_row();
    }
    s.close();
  }
  ctx.manifest.results()["max_exp_error_per_unit_time"] = worst;
  ctx.manifest.results()["tolerance"] = tol;
  ctx.manifest.stage("write");
  ctx.log("exp_euler_maruyama vs dense exponential: max error per unit time {:.3g} (tolerance {:.3g})",
          worst, tol);
  if (!(worst <= tol)) throw PropertyFailure{"integrator disagrees with the linear reference"};
  return kExitSuccess;
}

using VerbFn = int (*)(Context&);

const std::map<std::string_view, VerbFn>& verb_table() {
  static const std::map<std::string_view, VerbFn> table = {
      {"validate-operators", verb_validate_operators},
      {"simulate", verb_simulate},
      {"moments", verb_moments},
      {"tails", verb_tails},
      {"invariant-measure", verb_invariant_measure},
      {"eps-sweep", verb_eps_sweep},
      {"oracle-check", verb_oracle_check},
  };
  return table;
}

}  // namespace

const std::vector<std::string_view>& verbs() {
  static const std::vector<std::string_view> v = {"validate-operators", "simulate", "moments",
                                                  "tails", "invariant-measure", "eps-sweep",
                                                  "oracle-check"};
  return v;
}

std::filesystem::path output_directory(const std::optional<std::string>& flag,
                                       const RunConfig& config) {
  if (flag) return *flag;
  if (config.output.directory) return *config.output.directory;
  if (const char* env = std::getenv("LSW_OUTPUT_DIR"); env && *env) return env;
  return "lsw_output";
}

int run_verb(std::string_view verb, const RunConfig& config, const RunOptions& options) {
  const auto& table = verb_table();
  const auto it = table.find(verb);
  if (it == table.end()) {
    std::cerr << "error: unknown verb '" << verb << "'\n";
    return kExitConfigError;
  }
  std::optional<ResolvedRun> run;
  try {
    run = resolve(config, options.allow_unsafe);
  } catch (const Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::optional<Manifest> manifest;
  try {
    manifest.emplace(options.output_dir, std::string(verb), to_json(config), config.noise.seed,
                     options.workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  Context ctx{config, *run, options, *manifest};
  auto fail = [&](const std::string& message, int code) {
    std::cerr << "error: " << message << '\n';
    manifest->mark_failed(message, code);
    return code;
  };
  try {
    const int code = it->second(ctx);
    manifest->mark_complete();
    return code;
  } catch (const PropertyFailure& f) {
    std::cerr << "property failure: " << f.message << '\n';
    manifest->results()["passed"] = false;
    manifest->mark_complete();
    return kExitPropertyFailure;
  } catch (const BlowUpError& e) {
    return fail(e.what(), kExitBlowUp);
  } catch (const ConfigError& e) {
    return fail(e.what(), kExitConfigError);
  } catch (const DimensionError& e) {
    return fail(e.what(), kExitConfigError);
  } catch (const std::exception& e) {
    return fail(e.what(), kExitConfigError);
  }
}

}  // namespace lsw::app
