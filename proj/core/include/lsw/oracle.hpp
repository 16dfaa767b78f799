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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsw/lattice.hpp"

namespace lsw {

/// Largest lattice radius accepted by the dense references.
inline constexpr int kOracleMaxRadius = 32;

/// Matrix exponential by scaling and squaring with the degree-13 Pade
/// approximant.
Eigen::MatrixXcd expm_pade13(const Eigen::MatrixXcd& a);

/// Dense matrix of -i A - alpha on the lattice of the given radius.
Eigen::MatrixXcd linear_generator(int radius, double alpha, Boundary b = Boundary::zero_padding);

/// Mean of the linear lattice flow du = (-i A - alpha) u dt - i f dt at time t:
/// e^{tL} u0 plus the forced response, from one exponential of an augmented
/// matrix. Throws SizeError above kOracleMaxRadius.
ComplexSeq ou_complex_mean(const ComplexSeq& u0, const ComplexSeq& f, double alpha, double t,
                           Boundary b = Boundary::zero_padding);

/// Covariance E[(u - Eu)(u - Eu)^*] at time t for the same flow driven by
/// additive noise -i eps sum_k b_k dW_k, from the block exponential of
/// [[-L, Q], [0, L^*]] with Q = eps^2 sum_k b_k b_k^*.
Eigen::MatrixXcd ou_complex_covariance(const std::vector<ComplexSeq>& b, double eps,
                                       double alpha, double t,
                                       Boundary boundary = Boundary::zero_padding);

struct ScalarMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Stationary law of dv = (-beta v + g) dt + eps sum_k gamma_k dW_k at one
/// site: mean g / beta, variance eps^2 sum_k gamma_k^2 / (2 beta).
ScalarMoments ou_real_stationary(double beta, double eps, std::span<const double> gamma_site,
                                 double g = 0.0);

/// Law of the same scalar process at time t started from v0.
ScalarMoments ou_real_transient(double beta, double eps, std::span<const double> gamma_site,
                                double g, double v0, double t);

}  // namespace lsw
