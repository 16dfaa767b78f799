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

#include "lsw/oracle.hpp"

#include <array>
#include <cmath>
#include <string>

#include "lsw/error.hpp"

namespace lsw {

Eigen::MatrixXcd expm_pade13(const Eigen::MatrixXcd& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw DimensionError("matrix exponential of a non-square matrix");

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > theta13) s = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Eigen::MatrixXcd x = a / std::ldexp(1.0, s);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd x2 = x * x;
  const Eigen::MatrixXcd x4 = x2 * x2;
  const Eigen::MatrixXcd x6 = x4 * x2;
  const Eigen::MatrixXcd u =
      x * (x6 * (b[13] * x6 + b[11] * x4 + b[9] * x2) + b[7] * x6 + b[5] * x4 + b[3] * x2 +
           b[1] * id);
  const Eigen::MatrixXcd v =
      x6 * (b[12] * x6 + b[10] * x4 + b[8] * x2) + b[6] * x6 + b[4] * x4 + b[2] * x2 + b[0] * id;
  Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < s; ++i) r = r * r;
  return r;
}

namespace {

void require_small(int radius) {
  if (radius > kOracleMaxRadius) {
    throw SizeError("dense reference limited to M <= " + std::to_string(kOracleMaxRadius) +
                    " (got M = " + std::to_string(radius) + ")");
  }
}

}  // namespace

Eigen::MatrixXcd linear_generator(int radius, double alpha, Boundary b) {
  const auto n = static_cast<Eigen::Index>(2 * radius + 1);
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  const Complex mi(0.0, -1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    l(i, i) = 2.0 * mi - alpha;
    if (i > 0) l(i, i - 1) += -mi;
    if (i + 1 < n) l(i, i + 1) += -mi;
  }
  if (b == Boundary::periodic) {
    l(0, n - 1) += -mi;
    l(n - 1, 0) += -mi;
  }
  return l;
}

ComplexSeq ou_complex_mean(const ComplexSeq& u0, const ComplexSeq& f, double alpha, double t,
                           Boundary b) {
  require_same_radius(u0, f);
  require_small(u0.radius());
  const auto n = static_cast<Eigen::Index>(u0.size());
  Eigen::MatrixXcd aug = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = t * linear_generator(u0.radius(), alpha, b);
  for (Eigen::Index i = 0; i < n; ++i)
    aug(i, n) = t * Complex(0.0, -1.0) * f[static_cast<std::size_t>(i)];
  const Eigen::MatrixXcd e = expm_pade13(aug);
  ComplexSeq out(u0.radius());
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex acc = e(i, n);
    for (Eigen::Index j = 0; j < n; ++j) acc += e(i, j) * u0[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Eigen::MatrixXcd ou_complex_covariance(const std::vector<ComplexSeq>& b, double eps, double alpha,
                                       double t, Boundary boundary) {
  if (b.empty()) throw DimensionError("covariance reference needs at least one noise mode");
  const int radius = b.front().radius();
  require_small(radius);
  const auto n = static_cast<Eigen::Index>(2 * radius + 1);
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& bk : b) {
    if (bk.radius() != radius) throw DimensionError("noise profiles differ in radius");
    Eigen::VectorXcd col(n);
    for (Eigen::Index i = 0; i < n; ++i) col(i) = bk[static_cast<std::size_t>(i)];
    q += eps * eps * col * col.adjoint();
  }
  const Eigen::MatrixXcd l = linear_generator(radius, alpha, boundary);
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -t * l;
  block.topRightCorner(n, n) = t * q;
  block.bottomRightCorner(n, n) = t * l.adjoint();
  const Eigen::MatrixXcd e = expm_pade13(block);
  const Eigen::MatrixXcd phi = e.bottomRightCorner(n, n).adjoint();
  return phi * e.topRightCorner(n, n);
}

ScalarMoments ou_real_stationary(double beta, double eps, std::span<const double> gamma_site,
                                 double g) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  double s = 0.0;
  for (double c : gamma_site) s += c * c;
  return {g / beta, eps * eps * s / (2.0 * beta)};
}

ScalarMoments ou_real_transient(double beta, double eps, std::span<const double> gamma_site,
                                double g, double v0, double t) {
  const ScalarMoments st = ou_real_stationary(beta, eps, gamma_site, g);
  const double decay = std::exp(-beta * t);
  return {st.mean + (v0 - st.mean) * decay, st.variance * -std::expm1(-2.0 * beta * t)};
}

}  // namespace lsw
