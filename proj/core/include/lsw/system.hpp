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

#include <vector>

#include "lsw/lattice.hpp"

namespace lsw {

/// Coefficients and (time-independent) forcing of the coupled lattice system
///
///   i du = (A u - i alpha u + u v + f) dt + eps sum_k (h_k(u) + b_k) dW_k
///     dv = (-beta v - lambda B|u|^2 + g) dt + eps sum_k (sigma_k(v) + gamma_k) dW_k
///
/// `b` and `gamma` hold one profile per noise mode; both lists have length K.
struct SystemParams {
  double alpha = 1.0;
  double beta = 2.0;
  double lambda = 0.1;
  double epsilon = 0.0;
  /// When false the u v coupling in the u-equation is switched off. Only used
  /// to reduce the system to decoupled linear equations for reference checks.
  bool coupling = true;
  ComplexSeq f;
  RealSeq g;
  std::vector<ComplexSeq> b;
  std::vector<RealSeq> gamma;

  /// Zero forcing and K zero additive profiles on a lattice of the given radius.
  static SystemParams unforced(int radius, int modes);

  int radius() const noexcept { return f.radius(); }
  int modes() const noexcept { return static_cast<int>(b.size()); }

  /// sum_k ||b_k||^2 and sum_k ||gamma_k||^2.
  double b_norm_sq() const;
  double gamma_norm_sq() const;

  /// ||f||^4 + ||g||^4 + ||b||^4 + ||gamma||^4.
  double forcing_quartic() const;

  /// Throws ConfigError on non-positive rates, negative intensity or shape
  /// mismatches between the forcing sequences.
  void validate() const;
};

struct DerivedConstants {
  double kappa = 0.0;        ///< decay rate of E[|u|^4 + |v|^2]
  double kappa_tilde = 0.0;  ///< forcing gain
  /// Admissible noise intensity. Both square-root constraints enter the
  /// absorption estimate, so the smaller one is used.
  double eps0 = 0.0;
  /// The larger of the two square roots, kept for reporting.
  double eps0_max_form = 0.0;
  /// (kappa_tilde / kappa) (1 + |f|^4 + |g|^4 + |b|^4 + |gamma|^4)
  double absorbing_bound = 0.0;

  /// e^{-kappa t} * initial + absorbing_bound
  double envelope(double t, double initial_moment) const;
};

/// Evaluates the explicit constant chain. Requires alpha - 18 lambda^2 / beta > 0
/// and a positive noise bound norm; throws ConfigError otherwise.
DerivedConstants derive_constants(const SystemParams& params, double delta_norm_sq);

/// Rejects epsilon > eps0 unless `allow_outside` is set.
void check_noise_intensity(const SystemParams& params, const DerivedConstants& derived,
                           bool allow_outside);

/// F(u, v)_m = u_m v_m
ComplexSeq coupling_F(const ComplexSeq& u, const RealSeq& v);

/// G(u)_m = lambda (|u_{m+1}|^2 - |u_m|^2)
RealSeq coupling_G(const ComplexSeq& u, double lambda, Boundary b = Boundary::zero_padding);

struct Drift {
  ComplexSeq du;
  RealSeq dv;
};

/// du = -i A u - alpha u - i F(u, v) - i f,  dv = -beta v - G(u) + g
Drift drift(const LatticeState& state, const SystemParams& params,
            Boundary b = Boundary::zero_padding);

}  // namespace lsw
