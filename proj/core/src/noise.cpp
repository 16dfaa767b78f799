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

#include "lsw/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lsw/error.hpp"

namespace lsw {

DeltaSequence::DeltaSequence(int modes, int radius, std::vector<double> values)
    : modes_(modes), radius_(radius), values_(std::move(values)) {
  if (modes < 1) throw ConfigError("number of noise modes K must be at least 1");
  if (radius < 1) throw DimensionError("lattice radius must be a positive integer");
  if (values_.size() != static_cast<std::size_t>(modes) * sites())
    throw DimensionError("delta table must hold K * (2M+1) entries");
  for (double d : values_) {
    if (!(d >= 0.0) || !std::isfinite(d))
      throw ConfigError("delta entries must be finite and non-negative");
  }
  norm_sq_ = recompute_norm_sq();
}

DeltaSequence DeltaSequence::separable(int modes, int radius, double target_norm_sq) {
  if (!(target_norm_sq >= 0.0)) throw ConfigError("delta norm target must be non-negative");
  if (modes < 1) throw ConfigError("number of noise modes K must be at least 1");
  if (radius < 1) throw DimensionError("lattice radius must be a positive integer");
  const std::size_t n = static_cast<std::size_t>(2 * radius + 1);
  std::vector<double> shape(static_cast<std::size_t>(modes) * n);
  double shape_sq = 0.0;
  for (int k = 0; k < modes; ++k) {
    const double mode_w = std::pow(2.0, -0.5 * (k + 1));
    for (int m = -radius; m <= radius; ++m) {
      const double d = mode_w / (1.0 + std::abs(m));
      shape[static_cast<std::size_t>(k) * n + static_cast<std::size_t>(m + radius)] = d;
      shape_sq += d * d;
    }
  }
  const double c = std::sqrt(target_norm_sq / shape_sq);
  for (double& d : shape) d *= c;
  DeltaSequence seq(modes, radius, std::move(shape));

  // Closed forms for the discarded part of the infinite profile.
  const double zeta2 = std::numbers::pi * std::numbers::pi / 6.0;
  const double all_sites = 2.0 * zeta2 - 1.0;
  double partial = 0.0;
  for (int j = 1; j <= radius + 1; ++j) partial += 1.0 / (static_cast<double>(j) * j);
  const double outer_sites = 2.0 * (zeta2 - partial);
  const double kept_modes = 1.0 - std::pow(2.0, -modes);
  const double dropped_modes = std::pow(2.0, -modes);
  seq.discarded_tail_sq_ = c * c * (dropped_modes * all_sites + kept_modes * outer_sites);
  return seq;
}

double DeltaSequence::recompute_norm_sq() const {
  double s = 0.0;
  for (double d : values_) s += d * d;
  return s;
}

double DeltaSequence::max_site_sum_sq() const {
  double best = 0.0;
  for (std::size_t i = 0; i < sites(); ++i) {
    double s = 0.0;
    for (int k = 0; k < modes_; ++k) {
      const double d = values_[static_cast<std::size_t>(k) * sites() + i];
      s += d * d;
    }
    best = std::max(best, s);
  }
  return best;
}

std::string_view to_string(DiffusionKind kind) {
  switch (kind) {
    case DiffusionKind::zero: return "zero";
    case DiffusionKind::linear_saturating: return "linear_saturating";
    case DiffusionKind::sine_bounded: return "sine_bounded";
    case DiffusionKind::custom_table: return "custom_table";
  }
  return "unknown";
}

DiffusionKind diffusion_kind_from_string(std::string_view name) {
  if (name == "zero") return DiffusionKind::zero;
  if (name == "linear_saturating") return DiffusionKind::linear_saturating;
  if (name == "sine_bounded") return DiffusionKind::sine_bounded;
  if (name == "custom_table") return DiffusionKind::custom_table;
  throw ConfigError("unknown diffusion family '" + std::string(name) +
                    "' (expected zero, linear_saturating, sine_bounded or custom_table)");
}

DiffusionFamily::DiffusionFamily(DiffusionKind kind, DeltaSequence delta, double scale,
                                 double offset, ShapeTable table)
    : kind_(kind),
      delta_(std::move(delta)),
      scale_(scale),
      offset_(offset),
      table_(std::move(table)) {
  if (kind_ == DiffusionKind::linear_saturating) {
    if (!(scale_ >= 0.0 && scale_ <= 1.0))
      throw ConfigError("linear_saturating scale c must lie in [0, 1]");
    if (!(std::abs(offset_) <= 1.0))
      throw ConfigError("linear_saturating offset must lie in [-1, 1]");
  } else if (offset_ != 0.0) {
    throw ConfigError("an offset is only supported by the linear_saturating family");
  }
  if (kind_ == DiffusionKind::custom_table) {
    const auto& r = table_.r;
    const auto& phi = table_.phi;
    if (r.size() < 2 || r.size() != phi.size())
      throw ConfigError("custom_table needs at least two (r, phi) nodes");
    if (r.front() != 0.0 || phi.front() != 0.0)
      throw ConfigError("custom_table must start at (0, 0)");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i]) || !std::isfinite(phi[i]))
        throw ConfigError("custom_table entries must be finite");
      if (i > 0 && !(r[i] > r[i - 1]))
        throw ConfigError("custom_table radii must be strictly increasing");
      if (std::abs(phi[i]) > 1.0 + r[i])
        throw ConfigError("custom_table violates the growth bound |phi(r)| <= 1 + r");
    }
  }
}

double DiffusionFamily::profile(double r) const {
  switch (kind_) {
    case DiffusionKind::zero: return 0.0;
    case DiffusionKind::linear_saturating: return scale_ * r / (1.0 + r);
    case DiffusionKind::sine_bounded: return std::sin(r);
    case DiffusionKind::custom_table: {
      const auto& rs = table_.r;
      const auto& ps = table_.phi;
      if (r >= rs.back()) return ps.back();
      const auto it = std::upper_bound(rs.begin(), rs.end(), r);
      const std::size_t j = static_cast<std::size_t>(it - rs.begin());
      const double w = (r - rs[j - 1]) / (rs[j] - rs[j - 1]);
      return ps[j - 1] + w * (ps[j] - ps[j - 1]);
    }
  }
  return 0.0;
}

Complex DiffusionFamily::shape_h(Complex z) const {
  if (kind_ == DiffusionKind::zero) return {};
  if (kind_ == DiffusionKind::linear_saturating) {
    return scale_ * z / (1.0 + std::abs(z)) + offset_;
  }
  const double r = std::abs(z);
  if (r == 0.0) return {};
  return (profile(r) / r) * z;
}

double DiffusionFamily::shape_sigma(double s) const {
  switch (kind_) {
    case DiffusionKind::zero: return 0.0;
    case DiffusionKind::linear_saturating: return scale_ * s / (1.0 + std::abs(s)) + offset_;
    case DiffusionKind::sine_bounded: return std::sin(s);
    case DiffusionKind::custom_table: return s < 0.0 ? -profile(-s) : profile(s);
  }
  return 0.0;
}

double DiffusionFamily::lipschitz_modulus(double n) const {
  switch (kind_) {
    case DiffusionKind::zero: return 0.0;
    // Radial maps phi(|z|) z/|z| have Jacobian singular values |phi'(r)| and
    // |phi(r)|/r; both are bounded by c (resp. 1) for these two profiles.
    case DiffusionKind::linear_saturating: return scale_;
    case DiffusionKind::sine_bounded: return 1.0;
    case DiffusionKind::custom_table: {
      const auto& rs = table_.r;
      const auto& ps = table_.phi;
      double best = 0.0;
      for (std::size_t j = 1; j < rs.size() && rs[j - 1] <= n; ++j) {
        best = std::max(best, std::abs((ps[j] - ps[j - 1]) / (rs[j] - rs[j - 1])));
        if (rs[j] <= n) best = std::max(best, std::abs(ps[j]) / rs[j]);
      }
      if (n > 0.0) best = std::max(best, std::abs(profile(n)) / n);
      return best;
    }
  }
  return 0.0;
}

std::vector<ComplexSeq> eval_h(const DiffusionFamily& family, const ComplexSeq& u) {
  if (family.radius() != u.radius())
    throw DimensionError("diffusion family and state have different lattice radius");
  const int radius = u.radius();
  std::vector<ComplexSeq> out(static_cast<std::size_t>(family.modes()), ComplexSeq(radius));
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Complex psi = family.shape_h(u[i]);
    const int m = static_cast<int>(i) - radius;
    for (int k = 0; k < family.modes(); ++k)
      out[static_cast<std::size_t>(k)][i] = family.delta()(k, m) * psi;
  }
  return out;
}

std::vector<RealSeq> eval_sigma(const DiffusionFamily& family, const RealSeq& v) {
  if (family.radius() != v.radius())
    throw DimensionError("diffusion family and state have different lattice radius");
  const int radius = v.radius();
  std::vector<RealSeq> out(static_cast<std::size_t>(family.modes()), RealSeq(radius));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double psi = family.shape_sigma(v[i]);
    const int m = static_cast<int>(i) - radius;
    for (int k = 0; k < family.modes(); ++k)
      out[static_cast<std::size_t>(k)][i] = family.delta()(k, m) * psi;
  }
  return out;
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform on the open interval (0, 1).
inline double open_uniform(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

std::array<std::uint32_t, 4> NoiseStream::block(StreamDomain domain, std::uint64_t path,
                                                 std::uint32_t index,
                                                 std::uint64_t step) const {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
      static_cast<std::uint32_t>(path),
      (static_cast<std::uint32_t>(domain) << 28) | (index & 0x0FFFFFFFu)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                            static_cast<std::uint32_t>(seed_ >> 32)};
  return philox4x32(ctr, key);
}

std::pair<double, double> NoiseStream::normal_pair(StreamDomain domain, std::uint64_t path,
                                                   std::uint32_t index,
                                                   std::uint64_t step) const {
  const auto w = block(domain, path, index, step);
  const double u1 = open_uniform(w[0], w[1]);
  const double u2 = open_uniform(w[2], w[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double NoiseStream::standard_normal(std::uint64_t path, int k, std::uint64_t step) const {
  const auto [a, b] =
      normal_pair(StreamDomain::wiener, path, static_cast<std::uint32_t>(k / 2), step);
  return (k % 2 == 0) ? a : b;
}

void NoiseStream::increments(std::uint64_t path, std::uint64_t step, double dt,
                             std::span<double> out) const {
  const double sd = std::sqrt(dt);
  const std::size_t modes = out.size();
  for (std::size_t k = 0; k < modes; k += 2) {
    const auto [a, b] =
        normal_pair(StreamDomain::wiener, path, static_cast<std::uint32_t>(k / 2), step);
    out[k] = sd * a;
    if (k + 1 < modes) out[k + 1] = sd * b;
  }
}

double NoiseStream::uniform(StreamDomain domain, std::uint64_t path, std::uint32_t index,
                            std::uint64_t step) const {
  const auto w = block(domain, path, index, step);
  const std::uint64_t bits = ((static_cast<std::uint64_t>(w[0]) << 32) | w[1]) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::vector<double> wiener_increments(const NoiseStream& stream, std::uint64_t path,
                                      std::uint64_t step, double dt, int modes) {
  if (!(dt > 0.0)) throw ConfigError("time step dt must be positive");
  std::vector<double> out(static_cast<std::size_t>(modes));
  stream.increments(path, step, dt, out);
  return out;
}

}  // namespace lsw
