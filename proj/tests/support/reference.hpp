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

// Test-side reference computations. Everything here is written independently
// of the library code paths it is compared against: operators come from dense
// matrices, exponentials from Eigen's MatrixFunctions module, statistics from
// textbook formulas.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lsw/lattice.hpp"
#include "lsw/system.hpp"

namespace lsw::ref {

inline Eigen::MatrixXd dense_A(int radius, Boundary b) {
  const int n = 2 * radius + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0;
    if (i > 0) a(i, i - 1) = -1.0;
    if (i + 1 < n) a(i, i + 1) = -1.0;
  }
  if (b == Boundary::periodic) {
    a(0, n - 1) = -1.0;
    a(n - 1, 0) = -1.0;
  }
  return a;
}

inline Eigen::MatrixXd dense_B(int radius, Boundary b) {
  const int n = 2 * radius + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = -1.0;
    if (i + 1 < n) m(i, i + 1) = 1.0;
  }
  if (b == Boundary::periodic) m(n - 1, 0) = 1.0;
  return m;
}

inline Eigen::VectorXcd to_vec(const ComplexSeq& u) {
  Eigen::VectorXcd x(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) x(static_cast<Eigen::Index>(i)) = u[i];
  return x;
}

inline Eigen::VectorXd to_vec(const RealSeq& v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v[i];
  return x;
}

/// e^{t(-iA - alpha)} by Eigen's own matrix exponential.
inline Eigen::MatrixXcd propagator(int radius, double alpha, double t, Boundary b) {
  const Eigen::MatrixXcd a = dense_A(radius, b).cast<Complex>();
  const int n = 2 * radius + 1;
  const Eigen::MatrixXcd l =
      Complex(0.0, -1.0) * a - alpha * Eigen::MatrixXcd::Identity(n, n);
  return (t * l).exp();
}

/// Drift assembled from dense matrices.
inline void drift(const LatticeState& s, const SystemParams& p, Boundary b, Eigen::VectorXcd& du,
                  Eigen::VectorXd& dv) {
  const int r = s.radius();
  const Eigen::VectorXcd u = to_vec(s.u);
  const Eigen::VectorXd v = to_vec(s.v);
  const Eigen::VectorXcd uv = u.cwiseProduct(v.cast<Complex>());
  const Eigen::VectorXcd au = dense_A(r, b).cast<Complex>() * u;
  const Complex mi(0.0, -1.0);
  du = mi * au - p.alpha * u + (p.coupling ? Eigen::VectorXcd(mi * uv)
                                           : Eigen::VectorXcd::Zero(u.size())) +
       mi * to_vec(p.f);
  const Eigen::VectorXd mod = u.cwiseAbs2();
  dv = -p.beta * v - p.lambda * (dense_B(r, b) * mod) + to_vec(p.g);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Kolmogorov-Smirnov statistic of samples against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(double n) { return 1.628 / std::sqrt(n); }

/// W1 between equally sized samples: mean gap between order statistics.
inline double w1_equal_size(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

/// E v(t)^2 of dv = (-beta v + g) dt + eps sum_k c_k dW_k from v(0) = v0.
inline double ou_second_moment(double beta, double eps, double c_sq_sum, double g, double v0,
                               double t) {
  const double mean = v0 * std::exp(-beta * t) + g / beta * (1.0 - std::exp(-beta * t));
  const double var = eps * eps * c_sq_sum * (1.0 - std::exp(-2.0 * beta * t)) / (2.0 * beta);
  return mean * mean + var;
}

/// Philox4x32-10 known-answer vectors from the Random123 distribution.
struct PhiloxKat {
  std::array<std::uint32_t, 4> counter;
  std::array<std::uint32_t, 2> key;
  std::array<std::uint32_t, 4> expected;
};

inline const std::array<PhiloxKat, 3>& philox_kats() {
  static const std::array<PhiloxKat, 3> kats = {{
      {{0, 0, 0, 0}, {0, 0}, {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}},
      {{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
       {0xffffffffu, 0xffffffffu},
       {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}},
      {{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
       {0xa4093822u, 0x299f31d0u},
       {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}},
  }};
  return kats;
}

}  // namespace lsw::ref
