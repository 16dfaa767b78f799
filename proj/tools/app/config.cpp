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

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "lsw/error.hpp"

namespace lsw::app {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(message);
  throw ConfigError(message, mark.line + 1, mark.column + 1);
}

void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      fail(kv.first, "unknown key '" + key + "' in " + where + " (allowed: " + list + ")");
    }
  }
}

template <class T>
const char* type_name() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  if constexpr (std::is_same_v<T, std::string>) return "a string";
  if constexpr (std::is_integral_v<T>) return "an integer";
  return "a number";
}

template <class T>
T as(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) fail(node, where + " must be " + type_name<T>());
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, where + " must be " + type_name<T>() + " (got '" + node.Scalar() + "')");
  }
}

template <class T>
std::vector<T> as_list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(node, where + " must be a list");
  std::vector<T> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(as<T>(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <class T>
void read(const YAML::Node& map, const char* key, T& out, const std::string& where) {
  if (const YAML::Node n = map[key]) out = as<T>(n, where + "." + key);
}

template <class T>
void read(const YAML::Node& map, const char* key, std::optional<T>& out, const std::string& where) {
  if (const YAML::Node n = map[key]) {
    if (n.IsNull()) {
      out.reset();
    } else {
      out = as<T>(n, where + "." + key);
    }
  }
}

template <class T>
void read(const YAML::Node& map, const char* key, std::vector<T>& out, const std::string& where) {
  if (const YAML::Node n = map[key]) out = as_list<T>(n, where + "." + key);
}

ProfileSpec parse_profile(const YAML::Node& node, const std::string& where) {
  ProfileSpec p;
  if (node.IsScalar()) {
    p.kind = node.as<std::string>();
  } else {
    check_keys(node, {"kind", "amplitude", "phase", "site", "center", "width", "values", "im"},
               where);
    read(node, "kind", p.kind, where);
    read(node, "amplitude", p.amplitude, where);
    read(node, "phase", p.phase, where);
    read(node, "site", p.site, where);
    read(node, "center", p.center, where);
    read(node, "width", p.width, where);
    read(node, "values", p.re, where);
    read(node, "im", p.im, where);
  }
  static const std::vector<std::string> kinds = {"zero", "point", "gaussian", "box", "values"};
  if (std::find(kinds.begin(), kinds.end(), p.kind) == kinds.end()) {
    fail(node, where + ": unknown profile kind '" + p.kind +
                   "' (expected zero, point, gaussian, box or values)");
  }
  return p;
}

std::vector<ProfileSpec> parse_profile_list(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence()) fail(node, where + " must be a list of per-mode profiles");
  std::vector<ProfileSpec> out;
  for (std::size_t i = 0; i < node.size(); ++i)
    out.push_back(parse_profile(node[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_system(const YAML::Node& n, SystemSection& s) {
  const std::string w = "system";
  check_keys(n, {"alpha", "beta", "lambda", "epsilon", "epsilon_fraction", "coupling",
                 "allow_unsafe_epsilon", "f", "g", "b", "gamma"},
             w);
  read(n, "alpha", s.alpha, w);
  read(n, "beta", s.beta, w);
  read(n, "lambda", s.lambda, w);
  read(n, "epsilon", s.epsilon, w);
  read(n, "epsilon_fraction", s.epsilon_fraction, w);
  read(n, "coupling", s.coupling, w);
  read(n, "allow_unsafe_epsilon", s.allow_unsafe_epsilon, w);
  if (n["f"]) s.f = parse_profile(n["f"], "system.f");
  if (n["g"]) s.g = parse_profile(n["g"], "system.g");
  if (n["b"]) s.b = parse_profile_list(n["b"], "system.b");
  if (n["gamma"]) s.gamma = parse_profile_list(n["gamma"], "system.gamma");
}

void parse_noise(const YAML::Node& n, NoiseSection& s) {
  const std::string w = "noise";
  check_keys(n, {"kind", "scale", "offset", "table", "K", "delta_profile", "delta_norm_sq",
                 "delta_values", "seed"},
             w);
  read(n, "kind", s.kind, w);
  read(n, "scale", s.scale, w);
  read(n, "offset", s.offset, w);
  if (const YAML::Node t = n["table"]) {
    check_keys(t, {"r", "phi"}, "noise.table");
    read(t, "r", s.table_r, "noise.table");
    read(t, "phi", s.table_phi, "noise.table");
  }
  read(n, "K", s.K, w);
  read(n, "delta_profile", s.delta_profile, w);
  read(n, "delta_norm_sq", s.delta_norm_sq, w);
  if (const YAML::Node d = n["delta_values"]) {
    if (!d.IsSequence()) fail(d, "noise.delta_values must be a list of per-mode lists");
    s.delta_values.clear();
    for (std::size_t k = 0; k < d.size(); ++k)
      s.delta_values.push_back(
          as_list<double>(d[k], "noise.delta_values[" + std::to_string(k) + "]"));
  }
  read(n, "seed", s.seed, w);
  if (s.delta_profile != "separable" && s.delta_profile != "values") {
    fail(n["delta_profile"], "noise.delta_profile must be 'separable' or 'values'");
  }
}

void parse_sim(const YAML::Node& n, SimSection& s) {
  const std::string w = "sim";
  check_keys(n, {"M", "dt", "T", "n_paths", "scheme", "boundary", "cutoff", "cutoff_ladder",
                 "record_stride", "noise_substeps", "store_states", "initial"},
             w);
  read(n, "M", s.M, w);
  read(n, "dt", s.dt, w);
  read(n, "T", s.T, w);
  read(n, "n_paths", s.n_paths, w);
  read(n, "scheme", s.scheme, w);
  read(n, "boundary", s.boundary, w);
  read(n, "cutoff", s.cutoff, w);
  read(n, "cutoff_ladder", s.cutoff_ladder, w);
  read(n, "record_stride", s.record_stride, w);
  read(n, "noise_substeps", s.noise_substeps, w);
  read(n, "store_states", s.store_states, w);
  if (const YAML::Node i = n["initial"]) {
    const std::string wi = "sim.initial";
    check_keys(i, {"u", "v", "random_scale", "envelope", "seed"}, wi);
    if (i["u"]) s.initial.u = parse_profile(i["u"], wi + ".u");
    if (i["v"]) s.initial.v = parse_profile(i["v"], wi + ".v");
    read(i, "random_scale", s.initial.random_scale, wi);
    if (i["envelope"] && !i["envelope"].IsNull())
      s.initial.envelope = parse_profile(i["envelope"], wi + ".envelope");
    read(i, "seed", s.initial.seed, wi);
  }
  if (s.boundary != "zero_padding" && s.boundary != "periodic")
    fail(n["boundary"], "sim.boundary must be 'zero_padding' or 'periodic'");
  if (n["scheme"]) {
    try {
      scheme_from_string(s.scheme);
    } catch (const ConfigError& e) {
      fail(n["scheme"], e.what());
    }
  }
}

void parse_experiment(const YAML::Node& n, ExperimentSection& s) {
  const std::string w = "experiment";
  check_keys(n, {"tail_n", "burn_in", "avg_T", "observables", "histogram_bins", "eps_pairs",
                 "eps_list", "bootstrap_replicates", "bootstrap_seed", "operator_radius",
                 "operator_trials", "cutoff_pairs", "cutoff_level", "consistency_paths",
                 "oracle_tolerance"},
             w);
  read(n, "tail_n", s.tail_n, w);
  read(n, "burn_in", s.burn_in, w);
  read(n, "avg_T", s.avg_T, w);
  read(n, "observables", s.observables, w);
  read(n, "histogram_bins", s.histogram_bins, w);
  if (const YAML::Node p = n["eps_pairs"]) {
    if (!p.IsSequence()) fail(p, "experiment.eps_pairs must be a list of [eps1, eps2] pairs");
    s.eps_pairs.clear();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto pair = as_list<double>(p[i], "experiment.eps_pairs[" + std::to_string(i) + "]");
      if (pair.size() != 2) fail(p[i], "experiment.eps_pairs entries must have two values");
      s.eps_pairs.emplace_back(pair[0], pair[1]);
    }
  }
  read(n, "eps_list", s.eps_list, w);
  read(n, "bootstrap_replicates", s.bootstrap_replicates, w);
  read(n, "bootstrap_seed", s.bootstrap_seed, w);
  read(n, "operator_radius", s.operator_radius, w);
  read(n, "operator_trials", s.operator_trials, w);
  read(n, "cutoff_pairs", s.cutoff_pairs, w);
  read(n, "cutoff_level", s.cutoff_level, w);
  read(n, "consistency_paths", s.consistency_paths, w);
  read(n, "oracle_tolerance", s.oracle_tolerance, w);
}

void parse_output(const YAML::Node& n, OutputSection& s) {
  check_keys(n, {"directory", "formats"}, "output");
  read(n, "directory", s.directory, "output");
  if (const YAML::Node f = n["formats"]) {
    s.formats = as_list<std::string>(f, "output.formats");
    for (std::size_t i = 0; i < s.formats.size(); ++i)
      if (s.formats[i] != "csv" && s.formats[i] != "binary")
        fail(f[i], "output.formats entries must be 'csv' or 'binary'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("malformed configuration: " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  RunConfig c;
  if (root.IsNull()) return c;
  check_keys(root, {"system", "noise", "sim", "experiment", "output"}, "the configuration root");
  if (root["system"]) parse_system(root["system"], c.system);
  if (root["noise"]) parse_noise(root["noise"], c.noise);
  if (root["sim"]) parse_sim(root["sim"], c.sim);
  if (root["experiment"]) parse_experiment(root["experiment"], c.experiment);
  if (root["output"]) parse_output(root["output"], c.output);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

namespace {

template <class T>
Seq<T> build_profile(const ProfileSpec& spec, int radius, T unit) {
  Seq<T> out(radius);
  const auto n = out.size();
  if (spec.kind == "zero") return out;
  if (spec.kind == "point") {
    if (std::abs(spec.site) > radius)
      throw ConfigError("point profile site " + std::to_string(spec.site) + " outside the lattice");
    out.at_site(spec.site) = spec.amplitude * unit;
    return out;
  }
  if (spec.kind == "gaussian" || spec.kind == "box") {
    if (!(spec.width > 0.0)) throw ConfigError("profile width must be positive");
    for (int m = -radius; m <= radius; ++m) {
      const double x = m - spec.center;
      const double w = spec.kind == "gaussian"
                           ? std::exp(-x * x / (2.0 * spec.width * spec.width))
                           : (std::abs(x) <= spec.width ? 1.0 : 0.0);
      out.at_site(m) = spec.amplitude * w * unit;
    }
    return out;
  }
  if (spec.re.size() != n)
    throw ConfigError("values profile needs " + std::to_string(n) + " entries (2M+1)");
  for (std::size_t i = 0; i < n; ++i) out[i] = spec.re[i] * unit;
  return out;
}

}  // namespace

ComplexSeq build_complex(const ProfileSpec& spec, int radius) {
  const Complex unit = std::polar(1.0, spec.phase);
  ComplexSeq out = build_profile<Complex>(spec, radius, unit);
  if (spec.kind == "values" && !spec.im.empty()) {
    if (spec.im.size() != out.size())
      throw ConfigError("values profile 'im' needs " + std::to_string(out.size()) + " entries");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += spec.im[i] * unit * Complex(0.0, 1.0);
  }
  return out;
}

RealSeq build_real(const ProfileSpec& spec, int radius) {
  if (!spec.im.empty()) throw ConfigError("real profiles take no 'im' values");
  return build_profile<double>(spec, radius, 1.0);
}

const DerivedConstants& ResolvedRun::constants(const std::string& purpose) const {
  if (!derived) {
    throw ConfigError(purpose +
                      " needs the derived constants, which do not exist when the "
                      "dissipativity condition alpha - 18 lambda^2 / beta > 0 fails");
  }
  return *derived;
}

ResolvedRun resolve(const RunConfig& c, bool allow_unsafe) {
  const int M = c.sim.M;
  const int K = c.noise.K;
  if (M < 1) throw ConfigError("sim.M must be at least 1");
  if (K < 1) throw ConfigError("noise.K must be at least 1");

  ResolvedRun r;
  SystemParams& p = r.params;
  p = SystemParams::unforced(M, K);
  p.alpha = c.system.alpha;
  p.beta = c.system.beta;
  p.lambda = c.system.lambda;
  p.epsilon = c.system.epsilon;
  p.coupling = c.system.coupling;
  p.f = build_complex(c.system.f, M);
  p.g = build_real(c.system.g, M);
  if (c.system.b.size() > static_cast<std::size_t>(K) ||
      c.system.gamma.size() > static_cast<std::size_t>(K))
    throw ConfigError("system.b and system.gamma may list at most noise.K profiles");
  for (std::size_t k = 0; k < c.system.b.size(); ++k) p.b[k] = build_complex(c.system.b[k], M);
  for (std::size_t k = 0; k < c.system.gamma.size(); ++k)
    p.gamma[k] = build_real(c.system.gamma[k], M);

  DeltaSequence delta;
  if (c.noise.delta_profile == "separable") {
    if (!(c.noise.delta_norm_sq > 0.0)) throw ConfigError("noise.delta_norm_sq must be positive");
    delta = DeltaSequence::separable(K, M, c.noise.delta_norm_sq);
  } else {
    if (c.noise.delta_values.size() != static_cast<std::size_t>(K))
      throw ConfigError("noise.delta_values must list exactly K per-mode sequences");
    std::vector<double> values;
    for (const auto& mode : c.noise.delta_values) {
      if (mode.size() != static_cast<std::size_t>(2 * M + 1))
        throw ConfigError("each noise.delta_values entry needs 2M+1 values");
      values.insert(values.end(), mode.begin(), mode.end());
    }
    delta = DeltaSequence(K, M, std::move(values));
  }
  const double delta_norm_sq = delta.norm_sq();
  r.family = DiffusionFamily(diffusion_kind_from_string(c.noise.kind), std::move(delta),
                             c.noise.scale, c.noise.offset,
                             ShapeTable{c.noise.table_r, c.noise.table_phi});

  try {
    r.derived = derive_constants(p, delta_norm_sq);
  } catch (const ConfigError&) {
    if (!allow_unsafe) throw;
  }
  if (c.system.epsilon_fraction) {
    if (!(*c.system.epsilon_fraction >= 0.0))
      throw ConfigError("system.epsilon_fraction must be non-negative");
    p.epsilon = *c.system.epsilon_fraction * r.constants("system.epsilon_fraction").eps0;
  }
  p.validate();
  if (r.derived) check_noise_intensity(p, *r.derived, allow_unsafe || c.system.allow_unsafe_epsilon);

  SimConfig& s = r.sim;
  s.M = M;
  s.K = K;
  s.dt = c.sim.dt;
  s.T = c.sim.T;
  s.n_paths = c.sim.n_paths;
  s.seed = c.noise.seed;
  s.scheme = scheme_from_string(c.sim.scheme);
  s.boundary = c.sim.boundary == "periodic" ? Boundary::periodic : Boundary::zero_padding;
  if (c.sim.cutoff) s.cutoff = CutoffLevel(*c.sim.cutoff);
  for (double n : c.sim.cutoff_ladder) s.stopping_levels.emplace_back(n);
  s.record_stride = c.sim.record_stride;
  s.noise_substeps = c.sim.noise_substeps;
  s.store_states = c.sim.store_states;
  s.initial.u = build_complex(c.sim.initial.u, M);
  s.initial.v = build_real(c.sim.initial.v, M);
  s.initial.random_scale = c.sim.initial.random_scale;
  if (c.sim.initial.envelope) s.initial.envelope = build_real(*c.sim.initial.envelope, M);
  s.initial.seed = c.sim.initial.seed;
  s.validate(p, r.family);
  return r;
}

namespace {

nlohmann::json profile_json(const ProfileSpec& p) {
  nlohmann::json j = {{"kind", p.kind}};
  if (p.kind == "point") {
    j["amplitude"] = p.amplitude;
    j["site"] = p.site;
  } else if (p.kind == "gaussian" || p.kind == "box") {
    j["amplitude"] = p.amplitude;
    j["center"] = p.center;
    j["width"] = p.width;
  } else if (p.kind == "values") {
    j["values"] = p.re;
    if (!p.im.empty()) j["im"] = p.im;
  }
  if (p.phase != 0.0) j["phase"] = p.phase;
  return j;
}

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json sys = {{"alpha", c.system.alpha},
                        {"beta", c.system.beta},
                        {"lambda", c.system.lambda},
                        {"epsilon", c.system.epsilon},
                        {"epsilon_fraction", opt(c.system.epsilon_fraction)},
                        {"coupling", c.system.coupling},
                        {"allow_unsafe_epsilon", c.system.allow_unsafe_epsilon},
                        {"f", profile_json(c.system.f)},
                        {"g", profile_json(c.system.g)},
                        {"b", nlohmann::json::array()},
                        {"gamma", nlohmann::json::array()}};
  for (const auto& p : c.system.b) sys["b"].push_back(profile_json(p));
  for (const auto& p : c.system.gamma) sys["gamma"].push_back(profile_json(p));

  nlohmann::json noise = {{"kind", c.noise.kind},
                          {"scale", c.noise.scale},
                          {"offset", c.noise.offset},
                          {"table", {{"r", c.noise.table_r}, {"phi", c.noise.table_phi}}},
                          {"K", c.noise.K},
                          {"delta_profile", c.noise.delta_profile},
                          {"delta_norm_sq", c.noise.delta_norm_sq},
                          {"delta_values", c.noise.delta_values},
                          {"seed", c.noise.seed}};

  const auto& in = c.sim.initial;
  nlohmann::json initial = {{"u", profile_json(in.u)},
                            {"v", profile_json(in.v)},
                            {"random_scale", in.random_scale},
                            {"envelope", in.envelope ? profile_json(*in.envelope) : nlohmann::json(nullptr)},
                            {"seed", in.seed}};
  nlohmann::json sim = {{"M", c.sim.M},
                        {"dt", c.sim.dt},
                        {"T", c.sim.T},
                        {"n_paths", c.sim.n_paths},
                        {"scheme", c.sim.scheme},
                        {"boundary", c.sim.boundary},
                        {"cutoff", opt(c.sim.cutoff)},
                        {"cutoff_ladder", c.sim.cutoff_ladder},
                        {"record_stride", c.sim.record_stride},
                        {"noise_substeps", c.sim.noise_substeps},
                        {"store_states", c.sim.store_states},
                        {"initial", initial}};

  const auto& e = c.experiment;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : e.eps_pairs) pairs.push_back({a, b});
  nlohmann::json exp = {{"tail_n", e.tail_n},
                        {"burn_in", opt(e.burn_in)},
                        {"avg_T", e.avg_T},
                        {"observables", e.observables},
                        {"histogram_bins", e.histogram_bins},
                        {"eps_pairs", pairs},
                        {"eps_list", e.eps_list},
                        {"bootstrap_replicates", e.bootstrap_replicates},
                        {"bootstrap_seed", e.bootstrap_seed},
                        {"operator_radius", e.operator_radius},
                        {"operator_trials", e.operator_trials},
                        {"cutoff_pairs", e.cutoff_pairs},
                        {"cutoff_level", e.cutoff_level},
                        {"consistency_paths", e.consistency_paths},
                        {"oracle_tolerance", e.oracle_tolerance}};
  nlohmann::json out = {{"directory", opt(c.output.directory)}, {"formats", c.output.formats}};
  return {{"system", sys}, {"noise", noise}, {"sim", sim}, {"experiment", exp}, {"output", out}};
}

}  // namespace lsw::app
