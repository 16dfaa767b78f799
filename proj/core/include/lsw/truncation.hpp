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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lsw/lattice.hpp"
#include "lsw/noise.hpp"

namespace lsw {

/// Truncation radius n > 0 of the cutoff functions.
class CutoffLevel {
 public:
  explicit CutoffLevel(double n);
  double value() const noexcept { return n_; }
  friend bool operator==(CutoffLevel, CutoffLevel) = default;

 private:
  double n_;
};

/// Identity inside |z| <= n, radial projection onto |z| = n outside.
Complex cutoff_complex(Complex z, CutoffLevel n);
double cutoff_real(double s, CutoffLevel n);

ComplexSeq cutoff(const ComplexSeq& u, CutoffLevel n);
RealSeq cutoff(const RealSeq& v, CutoffLevel n);

/// F^n(u, v)_m = rho_n(u_m) rho_n(v_m)
ComplexSeq truncated_F(const ComplexSeq& u, const RealSeq& v, CutoffLevel n);
/// G^n(u) = lambda B(|rho_n u|^2)
RealSeq truncated_G(const ComplexSeq& u, CutoffLevel n, double lambda,
                    Boundary b = Boundary::zero_padding);
std::vector<ComplexSeq> truncated_h(const DiffusionFamily& family, const ComplexSeq& u,
                                    CutoffLevel n);
std::vector<RealSeq> truncated_sigma(const DiffusionFamily& family, const RealSeq& v,
                                     CutoffLevel n);

/// Global Lipschitz constants of the truncated maps (squared-norm form):
///   |F^n(1) - F^n(2)|^2          <= q1 (|du|^2 + |dv|^2)
///   |G^n(1) - G^n(2)|^2          <= q2 |du|^2
///   sum_k |h^n_k(1) - h^n_k(2)|^2 <= q3 |du|^2
///   sum_k |s^n_k(1) - s^n_k(2)|^2 <= q4 |dv|^2
///
/// Derived from the cutoff moduli 2 (complex) and 1 (real), |rho_n| <= n,
/// |B|^2 <= 4 and the family modulus on the n-ball:
///   q1 = max(2 n^2 * 4, 2 n^2) = 8 n^2,
///   q2 = 4 lambda^2 (2n * 2)^2 = 64 lambda^2 n^2,
///   q3 = 4 L(n)^2 max_m sum_k delta_{k,m}^2,  q4 = L(n)^2 max_m sum_k delta_{k,m}^2.
struct TruncationConstants {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
};

TruncationConstants truncation_constants(const DiffusionFamily& family, double lambda,
                                         CutoffLevel n);

/// First grid time at which |u| + |v| exceeds the level.
struct StoppingRecord {
  CutoffLevel level{1.0};
  std::optional<std::size_t> hit_step;
  std::optional<double> hit_time;
  double trigger_norm = 0.0;  ///< |u| + |v| at the hit; 0 when never hit

  bool hit() const noexcept { return hit_step.has_value(); }
};

/// Scans |u(t_j)| + |v(t_j)| sampled at t_j = j dt.
StoppingRecord detect_stopping(std::span<const double> combined_norms, double dt,
                               CutoffLevel n);

/// Incremental form of detect_stopping for use inside a time loop.
class StoppingDetector {
 public:
  StoppingDetector(CutoffLevel n, double dt) : dt_(dt) { record_.level = n; }

  void observe(std::size_t step, double combined_norm) {
    if (record_.hit_step || !(combined_norm > record_.level.value())) return;
    record_.hit_step = step;
    record_.hit_time = static_cast<double>(step) * dt_;
    record_.trigger_norm = combined_norm;
  }

  const StoppingRecord& record() const noexcept { return record_; }

 private:
  StoppingRecord record_;
  double dt_;
};

}  // namespace lsw
