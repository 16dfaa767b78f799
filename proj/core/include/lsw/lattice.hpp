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

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "lsw/error.hpp"

namespace lsw {

using Complex = std::complex<double>;

/// How neighbours outside sites -M..M are treated by the difference operators.
enum class Boundary {
  zero_padding,  ///< u_m = 0 for |m| > M
  periodic,      ///< site M+1 is site -M
};

/// A sequence over the finite lattice sites -M..M, stored densely.
///
/// `at_site(m)` indexes by lattice site, `operator[](i)` by storage slot
/// (slot i holds site i - M).
template <class T>
class Seq {
 public:
  using value_type = T;

  Seq() = default;

  explicit Seq(int radius) : radius_(radius) {
    if (radius < 1) throw DimensionError("lattice radius must be a positive integer");
    values_.assign(static_cast<std::size_t>(2 * radius + 1), T{});
  }

  Seq(int radius, std::vector<T> values) : radius_(radius), values_(std::move(values)) {
    if (radius < 1) throw DimensionError("lattice radius must be a positive integer");
    if (values_.size() != static_cast<std::size_t>(2 * radius + 1))
      throw DimensionError("sequence length does not match 2M+1");
  }

  static Seq impulse(int radius, int site, T value = T{1}) {
    Seq s(radius);
    s.at_site(site) = value;
    return s;
  }

  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& at_site(int m) { return values_[static_cast<std::size_t>(m + radius_)]; }
  const T& at_site(int m) const { return values_[static_cast<std::size_t>(m + radius_)]; }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  T* data() noexcept { return values_.data(); }
  const T* data() const noexcept { return values_.data(); }
  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  bool all_finite() const {
    for (const T& x : values_) {
      if constexpr (std::is_same_v<T, Complex>) {
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
      } else {
        if (!std::isfinite(x)) return false;
      }
    }
    return true;
  }

  Seq& operator+=(const Seq& o);
  Seq& operator-=(const Seq& o);
  Seq& operator*=(T s) {
    for (T& x : values_) x *= s;
    return *this;
  }

  friend bool operator==(const Seq&, const Seq&) = default;

 private:
  int radius_ = 0;
  std::vector<T> values_;
};

using ComplexSeq = Seq<Complex>;
using RealSeq = Seq<double>;

template <class A, class B>
void require_same_radius(const Seq<A>& a, const Seq<B>& b) {
  if (a.radius() != b.radius()) {
    throw DimensionError("lattice radius mismatch: " + std::to_string(a.radius()) + " vs " +
                         std::to_string(b.radius()));
  }
}

template <class T>
Seq<T>& Seq<T>::operator+=(const Seq& o) {
  require_same_radius(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

template <class T>
Seq<T>& Seq<T>::operator-=(const Seq& o) {
  require_same_radius(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

template <class T>
Seq<T> operator+(Seq<T> a, const Seq<T>& b) {
  a += b;
  return a;
}

template <class T>
Seq<T> operator-(Seq<T> a, const Seq<T>& b) {
  a -= b;
  return a;
}

template <class T>
Seq<T> operator*(T s, Seq<T> a) {
  a *= s;
  return a;
}

/// The pair (u, v): complex short wave and real long wave on a common lattice.
struct LatticeState {
  ComplexSeq u;
  RealSeq v;

  LatticeState() = default;
  LatticeState(ComplexSeq u_in, RealSeq v_in) : u(std::move(u_in)), v(std::move(v_in)) {
    require_same_radius(u, v);
  }

  static LatticeState zero(int radius) { return {ComplexSeq(radius), RealSeq(radius)}; }

  int radius() const noexcept { return u.radius(); }
  bool all_finite() const { return u.all_finite() && v.all_finite(); }

  friend bool operator==(const LatticeState&, const LatticeState&) = default;
};

namespace detail {

template <class T>
inline T neighbour(const Seq<T>& s, std::ptrdiff_t i, Boundary b) {
  const auto n = static_cast<std::ptrdiff_t>(s.size());
  if (i >= 0 && i < n) return s[static_cast<std::size_t>(i)];
  if (b == Boundary::zero_padding) return T{};
  return s[static_cast<std::size_t>((i + n) % n)];
}

inline double conj_if_complex(double x) { return x; }
inline Complex conj_if_complex(Complex x) { return std::conj(x); }

}  // namespace detail

/// (A u)_m = -u_{m-1} + 2 u_m - u_{m+1}
template <class T>
Seq<T> apply_A(const Seq<T>& u, Boundary b = Boundary::zero_padding) {
  Seq<T> out(u.radius());
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = 2.0 * u[static_cast<std::size_t>(i)] -
                                       detail::neighbour(u, i - 1, b) -
                                       detail::neighbour(u, i + 1, b);
  }
  return out;
}

/// (B u)_m = u_{m+1} - u_m
template <class T>
Seq<T> apply_B(const Seq<T>& u, Boundary b = Boundary::zero_padding) {
  Seq<T> out(u.radius());
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        detail::neighbour(u, i + 1, b) - u[static_cast<std::size_t>(i)];
  }
  return out;
}

/// (B* u)_m = u_{m-1} - u_m
template <class T>
Seq<T> apply_B_star(const Seq<T>& u, Boundary b = Boundary::zero_padding) {
  Seq<T> out(u.radius());
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        detail::neighbour(u, i - 1, b) - u[static_cast<std::size_t>(i)];
  }
  return out;
}

/// sum_m a_m conj(b_m); conjugate-linear in the second argument.
template <class T>
T inner(const Seq<T>& a, const Seq<T>& b) {
  require_same_radius(a, b);
  T acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * detail::conj_if_complex(b[i]);
  return acc;
}

template <class T>
double norm_sq(const Seq<T>& a) {
  double acc = 0.0;
  for (const T& x : a) acc += std::norm(x);
  return acc;
}

template <class T>
double norm(const Seq<T>& a) {
  return std::sqrt(norm_sq(a));
}

/// Squared modulus sequence |u|^2.
RealSeq abs_sq(const ComplexSeq& u);

}  // namespace lsw
