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

#include "lsw/truncation.hpp"

#include <cmath>

#include "lsw/error.hpp"

namespace lsw {

CutoffLevel::CutoffLevel(double n) : n_(n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("cutoff level must be positive");
}

Complex cutoff_complex(Complex z, CutoffLevel n) {
  const double r = std::abs(z);
  if (r <= n.value()) return z;
  return (n.value() / r) * z;
}

double cutoff_real(double s, CutoffLevel n) {
  if (std::abs(s) <= n.value()) return s;
  return s > 0.0 ? n.value() : -n.value();
}

ComplexSeq cutoff(const ComplexSeq& u, CutoffLevel n) {
  ComplexSeq out(u.radius());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = cutoff_complex(u[i], n);
  return out;
}

RealSeq cutoff(const RealSeq& v, CutoffLevel n) {
  RealSeq out(v.radius());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = cutoff_real(v[i], n);
  return out;
}

ComplexSeq truncated_F(const ComplexSeq& u, const RealSeq& v, CutoffLevel n) {
  require_same_radius(u, v);
  ComplexSeq out(u.radius());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = cutoff_complex(u[i], n) * cutoff_real(v[i], n);
  return out;
}

RealSeq truncated_G(const ComplexSeq& u, CutoffLevel n, double lambda, Boundary b) {
  RealSeq out = apply_B(abs_sq(cutoff(u, n)), b);
  out *= lambda;
  return out;
}

std::vector<ComplexSeq> truncated_h(const DiffusionFamily& family, const ComplexSeq& u,
                                    CutoffLevel n) {
  return eval_h(family, cutoff(u, n));
}

std::vector<RealSeq> truncated_sigma(const DiffusionFamily& family, const RealSeq& v,
                                     CutoffLevel n) {
  return eval_sigma(family, cutoff(v, n));
}

TruncationConstants truncation_constants(const DiffusionFamily& family, double lambda,
                                         CutoffLevel level) {
  const double n = level.value();
  // |a1 b1 - a2 b2|^2 <= 2 |a1|^2 |b1 - b2|^2 + 2 |b2|^2 |a1 - a2|^2 with
  // |a1|, |b2| <= n and |a1 - a2| <= 2 |du|, |b1 - b2| <= |dv|.
  TruncationConstants q;
  q.q1 = 8.0 * n * n;
  // ||a|^2 - |b|^2| <= (|a| + |b|) |a - b| <= 2n * 2|du|, and |B w|^2 <= 4 |w|^2.
  q.q2 = 64.0 * lambda * lambda * n * n;
  const double lip = family.lipschitz_modulus(n);
  const double site = family.delta().max_site_sum_sq();
  q.q3 = 4.0 * lip * lip * site;
  q.q4 = lip * lip * site;
  return q;
}

StoppingRecord detect_stopping(std::span<const double> combined_norms, double dt,
                               CutoffLevel n) {
  StoppingDetector det(n, dt);
  for (std::size_t j = 0; j < combined_norms.size(); ++j) {
    det.observe(j, combined_norms[j]);
    if (det.record().hit()) break;
  }
  return det.record();
}

}  // namespace lsw
