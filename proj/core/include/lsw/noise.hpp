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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lsw/lattice.hpp"

namespace lsw {

/// Non-negative growth bounds delta_{k,m}, modes k = 0..K-1 (mode index k
/// here is the 1-based mode k+1), sites m = -M..M.
class DeltaSequence {
 public:
  DeltaSequence() = default;
  /// `values` is mode-major: values[k * (2M+1) + (m + M)].
  DeltaSequence(int modes, int radius, std::vector<double> values);

  /// delta_{k,m} = c 2^{-k/2} (1+|m|)^{-1} (k 1-based), with c chosen so that
  /// the truncated norm over K modes and 2M+1 sites equals `target_norm_sq`.
  static DeltaSequence separable(int modes, int radius, double target_norm_sq);

  int modes() const noexcept { return modes_; }
  int radius() const noexcept { return radius_; }
  std::size_t sites() const noexcept { return static_cast<std::size_t>(2 * radius_ + 1); }

  /// k is 0-based, m is the lattice site.
  double operator()(int k, int m) const {
    return values_[static_cast<std::size_t>(k) * sites() + static_cast<std::size_t>(m + radius_)];
  }
  std::span<const double> mode(int k) const {
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(k) * sites(),
                                                    sites());
  }
  std::span<const double> values() const noexcept { return values_; }

  /// Cached sum over k, m of delta_{k,m}^2.
  double norm_sq() const noexcept { return norm_sq_; }
  double recompute_norm_sq() const;
  /// max over sites of sum_k delta_{k,m}^2.
  double max_site_sum_sq() const;

  /// For separable profiles: the squared norm carried by modes k > K and
  /// sites |m| > M that the truncation discards. Zero for explicit tables.
  double discarded_tail_sq() const noexcept { return discarded_tail_sq_; }

 private:
  int modes_ = 0;
  int radius_ = 0;
  std::vector<double> values_;
  double norm_sq_ = 0.0;
  double discarded_tail_sq_ = 0.0;
};

enum class DiffusionKind { zero, linear_saturating, sine_bounded, custom_table };

std::string_view to_string(DiffusionKind kind);
DiffusionKind diffusion_kind_from_string(std::string_view name);

/// Radial profile phi(r) sampled at increasing radii, linearly interpolated
/// and held constant past the last node. Requires r_0 = 0 and phi(0) = 0.
struct ShapeTable {
  std::vector<double> r;
  std::vector<double> phi;
};

/// Site/mode separable diffusion coefficients
///
///   h_{k,m}(z)     = delta_{k,m} psi_h(z),   psi_h(z) = phi(|z|) z / |z| (+ offset)
///   sigma_{k,m}(s) = delta_{k,m} psi_s(s),   psi_s(s) = sign(s) phi(|s|) (+ offset)
///
/// with phi(r) = c r / (1 + r) for linear_saturating, sin r for sine_bounded
/// and the tabulated profile for custom_table. Every shape satisfies
/// |psi(s)| <= 1 + |s|, hence |h_{k,m}(s)| <= delta_{k,m} (1 + |s|).
class DiffusionFamily {
 public:
  DiffusionFamily() = default;
  DiffusionFamily(DiffusionKind kind, DeltaSequence delta, double scale = 1.0,
                  double offset = 0.0, ShapeTable table = {});

  static DiffusionFamily zero(DeltaSequence delta) {
    return {DiffusionKind::zero, std::move(delta)};
  }

  DiffusionKind kind() const noexcept { return kind_; }
  const DeltaSequence& delta() const noexcept { return delta_; }
  int modes() const noexcept { return delta_.modes(); }
  int radius() const noexcept { return delta_.radius(); }
  double scale() const noexcept { return scale_; }
  double offset() const noexcept { return offset_; }
  const ShapeTable& table() const noexcept { return table_; }

  Complex shape_h(Complex z) const;
  double shape_sigma(double s) const;

  Complex h(int k, int m, Complex z) const { return delta_(k, m) * shape_h(z); }
  double sigma(int k, int m, double s) const { return delta_(k, m) * shape_sigma(s); }

  /// Lipschitz modulus of psi_h and psi_s on the ball |s| <= n. Per-site
  /// moduli are delta_{k,m} times this value.
  double lipschitz_modulus(double n) const;

 private:
  double profile(double r) const;

  DiffusionKind kind_ = DiffusionKind::zero;
  DeltaSequence delta_;
  double scale_ = 1.0;
  double offset_ = 0.0;
  ShapeTable table_;
};

/// h_k(u) for k = 1..K.
std::vector<ComplexSeq> eval_h(const DiffusionFamily& family, const ComplexSeq& u);
/// sigma_k(v) for k = 1..K.
std::vector<RealSeq> eval_sigma(const DiffusionFamily& family, const RealSeq& v);

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Independent random streams separated by purpose.
enum class StreamDomain : std::uint32_t { wiener = 0, initial = 1, bootstrap = 2 };

/// Stateless standard-normal source indexed by (seed, domain, path, index, step).
///
/// Every draw is a pure function of its index tuple, so results do not depend
/// on evaluation order, worker count or which other draws were requested.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Two independent N(0,1) draws for the given index tuple.
  std::pair<double, double> normal_pair(StreamDomain domain, std::uint64_t path,
                                        std::uint32_t index, std::uint64_t step) const;

  /// Standard normal for Wiener mode k (0-based) at the given step.
  double standard_normal(std::uint64_t path, int k, std::uint64_t step) const;

  /// K independent N(0, dt) increments written to `out`.
  void increments(std::uint64_t path, std::uint64_t step, double dt,
                  std::span<double> out) const;

  /// Uniform on [0, 1) for auxiliary resampling.
  double uniform(StreamDomain domain, std::uint64_t path, std::uint32_t index,
                 std::uint64_t step) const;

 private:
  std::array<std::uint32_t, 4> block(StreamDomain domain, std::uint64_t path,
                                     std::uint32_t index, std::uint64_t step) const;
  std::uint64_t seed_;
};

std::vector<double> wiener_increments(const NoiseStream& stream, std::uint64_t path,
                                      std::uint64_t step, double dt, int modes);

}  // namespace lsw
