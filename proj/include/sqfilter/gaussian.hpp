// Copyright 2026 The sqfilter Authors
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

// Single-mode quasi-free (Gaussian) state parameters.

#include <cmath>
#include <string>
#include <utility>

#include "sqfilter/common.hpp"

namespace sqf {

/// Mean photon number n and squeezing m = <aa> of a mean-zero Gaussian mode.
template <typename Scalar>
struct SqueezingParams {
  Scalar n{0};
  Complex<Scalar> m{0, 0};

  /// Deficit n(n+1) - |m|^2; non-negative for a valid covariance.
  Scalar deficit() const { return n * (n + 1) - std::norm(m); }
};

enum class SqueezingClass { thermal, sub_maximal, maximal, invalid };

inline const char* to_string(SqueezingClass c) {
  switch (c) {
    case SqueezingClass::thermal: return "thermal";
    case SqueezingClass::sub_maximal: return "sub_maximal";
    case SqueezingClass::maximal: return "maximal";
    case SqueezingClass::invalid: return "invalid";
  }
  return "?";
}

/// Relative tolerance applied to deficit / (n(n+1)+1) for maximal/invalid decisions.
inline constexpr double kClassifyTolerance = 1e-9;

template <typename Scalar>
Scalar relative_deficit(const SqueezingParams<Scalar>& p) {
  return p.deficit() / (p.n * (p.n + 1) + 1);
}

template <typename Scalar>
void validate(const SqueezingParams<Scalar>& p) {
  if (!(p.n >= 0)) {
    throw ValidationError("squeezing params: n >= 0 violated (n = " + std::to_string(double(p.n)) +
                          ")");
  }
  if (relative_deficit(p) < -Scalar(kClassifyTolerance)) {
    throw ValidationError("squeezing params: n(n+1) - |m|^2 >= 0 violated (deficit = " +
                          std::to_string(double(p.deficit())) + ")");
  }
}

template <typename Scalar>
SqueezingClass classify(const SqueezingParams<Scalar>& p) {
  if (!(p.n >= 0)) return SqueezingClass::invalid;
  const Scalar rel = relative_deficit(p);
  if (rel < -Scalar(kClassifyTolerance)) return SqueezingClass::invalid;
  if (p.m == Complex<Scalar>(0)) return SqueezingClass::thermal;
  if (rel <= Scalar(kClassifyTolerance)) return SqueezingClass::maximal;
  return SqueezingClass::sub_maximal;
}

/// Covariance [[<aa*>, <aa>], [<a*a*>, <a*a>]] = [[n+1, m], [m*, n]].
template <typename Scalar>
CMatrix2<Scalar> covariance_matrix(const SqueezingParams<Scalar>& p) {
  validate(p);
  CMatrix2<Scalar> c;
  c << Complex<Scalar>(p.n + 1), p.m, std::conj(p.m), Complex<Scalar>(p.n);
  return c;
}

/// Closed-form eigenvalues (lambda_+, lambda_-) of the covariance matrix.
template <typename Scalar>
std::pair<Scalar, Scalar> covariance_eigenvalues(const SqueezingParams<Scalar>& p) {
  validate(p);
  const Scalar centre = (2 * p.n + 1) / 2;
  const Scalar radius = std::sqrt(std::norm(p.m) + Scalar(0.25));
  return {centre + radius, centre - radius};
}

/// Characteristic function <exp(i u* a + i u a*)> of the Gaussian state.
template <typename Scalar>
Scalar characteristic_value(const SqueezingParams<Scalar>& p, Complex<Scalar> u) {
  validate(p);
  const Complex<Scalar> uc = std::conj(u);
  return std::exp(-(2 * p.n + 1) * std::norm(u) / 2 - std::real(p.m * uc * uc));
}

/// Variance rate of the quadrature e^{i lambda} a + e^{-i lambda} a*.
template <typename Scalar>
Scalar quadrature_variance(const SqueezingParams<Scalar>& p, Scalar phase) {
  validate(p);
  return 2 * p.n + 1 + 2 * std::real(std::polar(Scalar(1), 2 * phase) * p.m);
}

}  // namespace sqf
