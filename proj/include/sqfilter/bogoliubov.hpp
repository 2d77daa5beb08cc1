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

// Two-mode Bogoliubov transformations
//
//   b_i = x_i a_1 + y_i a_1* + z_i a_2 + w_i a_2*,   i = 1, 2,
//
// acting on a pair of vacuum modes, and the balanced subclass in which the
// second row is the first with (x, y) and (z, w) interchanged.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "sqfilter/common.hpp"
#include "sqfilter/gaussian.hpp"

namespace sqf {

template <typename Scalar>
struct ModeRow {
  Complex<Scalar> x, y, z, w;
};

template <typename Scalar>
struct TwoModeCoeffs {
  std::array<ModeRow<Scalar>, 2> rows;

  const ModeRow<Scalar>& operator[](int i) const { return rows[i]; }
  ModeRow<Scalar>& operator[](int i) { return rows[i]; }

  static TwoModeCoeffs identity() {
    TwoModeCoeffs c{};
    c.rows[0].x = 1;
    c.rows[1].z = 1;
    return c;
  }
};

/// Coefficients (x, y, z, w) of a balanced transformation.
template <typename Scalar>
struct BalancedCoeffs {
  Complex<Scalar> x{1, 0}, y{0, 0}, z{0, 0}, w{0, 0};
};

/// Residuals of the canonical commutation identities.
template <typename Scalar>
struct BogoliubovReport {
  Scalar commutator_11{0};   // |[b1,b1*] - 1|
  Scalar commutator_22{0};   // |[b2,b2*] - 1|
  Scalar commutator_12{0};   // |[b1,b2*]|
  Scalar annihilator_12{0};  // |[b1,b2]|
  Scalar tolerance{0};

  Scalar max_residual() const {
    return std::max({commutator_11, commutator_22, commutator_12, annihilator_12});
  }
  bool passed() const { return max_residual() <= tolerance; }
};

template <typename Scalar>
Scalar coefficient_scale(const TwoModeCoeffs<Scalar>& c) {
  Scalar s = 1;
  for (const auto& r : c.rows) {
    s = std::max({s, std::norm(r.x), std::norm(r.y), std::norm(r.z), std::norm(r.w)});
  }
  return s;
}

/// Scale-aware acceptance threshold for the identity checks.
template <typename Scalar>
Scalar default_identity_tolerance(const TwoModeCoeffs<Scalar>& c) {
  return Scalar(1e-9) * coefficient_scale(c);
}

template <typename Scalar>
BogoliubovReport<Scalar> verify_bogoliubov(const TwoModeCoeffs<Scalar>& c, Scalar tol) {
  auto gram = [&](int i, int j) {
    const auto& a = c[i];
    const auto& b = c[j];
    return a.x * std::conj(b.x) + a.z * std::conj(b.z) - a.y * std::conj(b.y) -
           a.w * std::conj(b.w);
  };
  BogoliubovReport<Scalar> r;
  r.commutator_11 = std::abs(gram(0, 0) - Scalar(1));
  r.commutator_22 = std::abs(gram(1, 1) - Scalar(1));
  r.commutator_12 = std::abs(gram(0, 1));
  r.annihilator_12 = std::abs(c[0].x * c[1].y - c[0].y * c[1].x + c[0].z * c[1].w - c[0].w * c[1].z);
  r.tolerance = tol;
  return r;
}

template <typename Scalar>
void require_bogoliubov(const TwoModeCoeffs<Scalar>& c, const char* where) {
  const auto report = verify_bogoliubov(c, default_identity_tolerance(c));
  if (!report.passed()) {
    throw ValidationError(std::string(where) +
                          ": coefficients are not a Bogoliubov transformation (max residual " +
                          std::to_string(double(report.max_residual())) + ")");
  }
}

/// Marginal (n_i, m_i) of each output mode on the joint vacuum.
template <typename Scalar>
std::pair<SqueezingParams<Scalar>, SqueezingParams<Scalar>> marginals(
    const TwoModeCoeffs<Scalar>& c) {
  require_bogoliubov(c, "marginals");
  auto one = [](const ModeRow<Scalar>& r) {
    return SqueezingParams<Scalar>{std::norm(r.y) + std::norm(r.w), r.x * r.y + r.z * r.w};
  };
  return {one(c[0]), one(c[1])};
}

/// |x_i|^2 + |z_i|^2 - (n_i + 1) for each row; zero for any Bogoliubov transform.
template <typename Scalar>
std::pair<Scalar, Scalar> number_consistency(const TwoModeCoeffs<Scalar>& c) {
  auto one = [](const ModeRow<Scalar>& r) {
    return std::norm(r.x) + std::norm(r.z) - (std::norm(r.y) + std::norm(r.w) + 1);
  };
  return {one(c[0]), one(c[1])};
}

/// Inter-mode correlations v = <b1 b2*>, u = <b1 b2>.
template <typename Scalar>
struct Correlations {
  Complex<Scalar> u;
  Complex<Scalar> v;
};

template <typename Scalar>
Correlations<Scalar> correlations(const TwoModeCoeffs<Scalar>& c) {
  require_bogoliubov(c, "correlations");
  const auto& a = c[0];
  const auto& b = c[1];
  return {a.x * b.y + a.z * b.w, a.x * std::conj(b.x) + a.z * std::conj(b.z)};
}

/// Alternative expressions for the correlations that hold by the commutation
/// identities. `u_as_printed` is the literal y1 x1 + w1 z2 reading, which does
/// not hold in general; `u_swapped` = y1 x2 + w1 z2 does.
template <typename Scalar>
struct CorrelationAlternates {
  Complex<Scalar> v_from_creation;
  Complex<Scalar> u_as_printed;
  Complex<Scalar> u_swapped;
};

template <typename Scalar>
CorrelationAlternates<Scalar> correlation_alternates(const TwoModeCoeffs<Scalar>& c) {
  const auto& a = c[0];
  const auto& b = c[1];
  return {std::conj(a.y) * b.y + std::conj(a.w) * b.w, a.y * a.x + a.w * b.z,
          a.y * b.x + a.w * b.z};
}

/// Matrix acting on (a1, a1*, a2, a2*) that yields (b1, b1*, b2, b2*).
template <typename Scalar>
CMatrix4<Scalar> to_doubled(const TwoModeCoeffs<Scalar>& c) {
  CMatrix4<Scalar> s;
  for (int i = 0; i < 2; ++i) {
    const auto& r = c[i];
    s.row(2 * i) << r.x, r.y, r.z, r.w;
    s.row(2 * i + 1) << std::conj(r.y), std::conj(r.x), std::conj(r.w), std::conj(r.z);
  }
  return s;
}

template <typename Scalar>
TwoModeCoeffs<Scalar> from_doubled(const CMatrix4<Scalar>& s) {
  TwoModeCoeffs<Scalar> c;
  for (int i = 0; i < 2; ++i) {
    c[i] = {s(2 * i, 0), s(2 * i, 1), s(2 * i, 2), s(2 * i, 3)};
  }
  return c;
}

/// Transformation expressing a in terms of b (the inverse of c).
template <typename Scalar>
TwoModeCoeffs<Scalar> invert(const TwoModeCoeffs<Scalar>& c) {
  require_bogoliubov(c, "invert");
  const auto& r1 = c[0];
  const auto& r2 = c[1];
  TwoModeCoeffs<Scalar> inv;
  inv[0] = {std::conj(r1.x), -r1.y, std::conj(r2.x), -r2.y};
  inv[1] = {std::conj(r1.z), -r1.w, std::conj(r2.z), -r2.w};
  return inv;
}

/// `outer` after `inner`: if inner maps a -> b and outer maps b -> c, the result maps a -> c.
template <typename Scalar>
TwoModeCoeffs<Scalar> compose(const TwoModeCoeffs<Scalar>& outer,
                              const TwoModeCoeffs<Scalar>& inner) {
  return from_doubled<Scalar>(to_doubled(outer) * to_doubled(inner));
}

/// max |invert(c) o c - identity| over the doubled coefficient matrix.
template <typename Scalar>
Scalar inversion_residual(const TwoModeCoeffs<Scalar>& c) {
  const CMatrix4<Scalar> prod = to_doubled(invert(c)) * to_doubled(c);
  return (prod - CMatrix4<Scalar>::Identity()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Balanced transformations

template <typename Scalar>
struct BalancedResiduals {
  Scalar normalization;  // |x|^2 + |z|^2 - |y|^2 - |w|^2 - 1
  Scalar cross;          // x z* + z x* - y w* - w y*
  Scalar max() const { return std::max(std::abs(normalization), std::abs(cross)); }
};

template <typename Scalar>
BalancedResiduals<Scalar> balanced_residuals(const BalancedCoeffs<Scalar>& b) {
  const auto cross = b.x * std::conj(b.z) + b.z * std::conj(b.x) - b.y * std::conj(b.w) -
                     b.w * std::conj(b.y);
  return {std::norm(b.x) + std::norm(b.z) - std::norm(b.y) - std::norm(b.w) - 1, std::abs(cross)};
}

template <typename Scalar>
TwoModeCoeffs<Scalar> lift_unchecked(const BalancedCoeffs<Scalar>& b) {
  TwoModeCoeffs<Scalar> c;
  c[0] = {b.x, b.y, b.z, b.w};
  c[1] = {b.z, b.w, b.x, b.y};
  return c;
}

/// Two-mode form of a balanced transformation (second row = interchanged first row).
template <typename Scalar>
TwoModeCoeffs<Scalar> lift_balanced(const BalancedCoeffs<Scalar>& b) {
  const auto c = lift_unchecked(b);
  const auto res = balanced_residuals(b);
  if (res.max() > default_identity_tolerance(c)) {
    throw ValidationError("lift_balanced: balanced identities violated (residual " +
                          std::to_string(double(res.max())) + ")");
  }
  return c;
}

/// Single-mode state parameters shared by both balanced modes.
template <typename Scalar>
SqueezingParams<Scalar> balanced_marginal(const BalancedCoeffs<Scalar>& b) {
  return marginals(lift_balanced(b)).first;
}

/// The replacement (x, y, z, w) -> (x*, -y, z*, -w), which preserves the balanced identities.
template <typename Scalar>
BalancedCoeffs<Scalar> conjugate_partner(const BalancedCoeffs<Scalar>& b) {
  return {std::conj(b.x), -b.y, std::conj(b.z), -b.w};
}

/// Two-mode squeezing / single-mode squeezing / rotation family parametrized by (r, rho, theta).
template <typename Scalar>
BalancedCoeffs<Scalar> balanced_from_bv(Scalar r, Scalar rho, Scalar theta) {
  const Complex<Scalar> phase = std::polar(Scalar(1), theta / 2);
  const Scalar cr = std::cosh(r / 2), sr = std::sinh(r / 2);
  const Scalar cp = std::cosh(rho / 2), sp = std::sinh(rho / 2);
  return {phase * (cr * cp), phase * (cr * sp), phase * (sr * sp), phase * (sr * cp)};
}

template <typename Scalar>
struct BvParams {
  Scalar r{0}, rho{0}, theta{0};
};

/// (r, rho, theta) whose balanced transformation has marginal (n, m). Defined
/// for every valid (n, m), including maximal squeezing (r = 0).
template <typename Scalar>
BvParams<Scalar> bv_params_for(const SqueezingParams<Scalar>& p) {
  validate(p);
  const Scalar two_n1 = 2 * p.n + 1;
  const Scalar abs_m = std::abs(p.m);
  // 2n+1 = cosh r cosh rho, 2|m| = cosh r sinh rho.
  const Scalar cosh_r = std::max(Scalar(1), std::sqrt(two_n1 * two_n1 - 4 * abs_m * abs_m));
  return {std::acosh(cosh_r), std::atanh(std::min(Scalar(1), 2 * abs_m / two_n1)),
          abs_m > 0 ? std::arg(p.m) : Scalar(0)};
}

/// Coefficient formula of HKKR evaluated literally. It yields the
/// requested marginals but satisfies the cross identity only when Re m = 0;
/// `balanced_from_hkkr` is the corrected constructor.
template <typename Scalar>
BalancedCoeffs<Scalar> hkkr_as_printed(Scalar n, Complex<Scalar> m) {
  const SqueezingParams<Scalar> p{n, m};
  const auto cls = classify(p);
  if (cls == SqueezingClass::invalid || cls == SqueezingClass::maximal) {
    throw DomainError(std::string("hkkr: requires sub-maximal squeezing, got ") + to_string(cls));
  }
  const Scalar rho = std::sqrt(std::norm(m) + Scalar(0.25));
  const Scalar plus = rho + m.real(), minus = rho - m.real();
  if (!(plus > 0) || !(minus > 0)) {
    throw DomainError("hkkr: singular parametrization (rho +/- Re m <= 0)");
  }
  const Scalar kp = std::sqrt((n + Scalar(0.5) + rho) / (rho * plus));
  const Scalar km = std::sqrt((n + Scalar(0.5) - rho) / (rho * minus));
  const Complex<Scalar> half_m = m / Scalar(2);
  const Scalar q = Scalar(0.25), h = rho / 2;
  return {kp * (h + half_m + q), kp * (h + half_m - q), km * (h - half_m - q),
          km * (h - half_m + q)};
}

/// Balanced transformation in the HKKR form. The literal formula is
/// evaluated at the purely imaginary squeezing i|m| (where it is exact) and the
/// output modes are then rotated by the phase that carries i|m| onto m.
template <typename Scalar>
BalancedCoeffs<Scalar> balanced_from_hkkr(Scalar n, Complex<Scalar> m) {
  const Scalar abs_m = std::abs(m);
  auto b = hkkr_as_printed(n, Complex<Scalar>(0, abs_m));
  if (abs_m > 0) {
    const Complex<Scalar> rot = std::polar(Scalar(1), (std::arg(m) - std::numbers::pi_v<Scalar> / 2) / 2);
    b.x *= rot;
    b.y *= rot;
    b.z *= rot;
    b.w *= rot;
  }
  return b;
}

/// True when the relative deficit is small enough that the HKKR
/// coefficients lose precision.
template <typename Scalar>
bool near_maximal(const SqueezingParams<Scalar>& p, Scalar threshold = Scalar(1e-6)) {
  return relative_deficit(p) < threshold;
}

/// Araki-Woods thermal construction: b1 = sqrt(n+1) a1 + sqrt(n) a2*, b2 = sqrt(n) a1* + sqrt(n+1) a2.
template <typename Scalar>
TwoModeCoeffs<Scalar> araki_woods(Scalar n) {
  TwoModeCoeffs<Scalar> c{};
  c[0].x = std::sqrt(n + 1);
  c[0].w = std::sqrt(n);
  c[1].y = std::sqrt(n);
  c[1].z = std::sqrt(n + 1);
  return c;
}

/// Maximally squeezed mode e^{i theta/2}(sqrt(n+1) a + sqrt(n) a*), which has
/// squeezing e^{i theta} sqrt(n(n+1)).
template <typename Scalar>
std::pair<Complex<Scalar>, Complex<Scalar>> maximal_single_mode(Scalar n, Scalar theta) {
  const Complex<Scalar> phase = std::polar(Scalar(1), theta / 2);
  return {phase * std::sqrt(n + 1), phase * std::sqrt(n)};
}

/// Two independent maximally squeezed modes built on beam-splitter-mixed
/// vacuum inputs a1' = t a1 + s a2, a2' = -s* a1 + t* a2 with |t|^2 + |s|^2 = 1.
/// The outputs are uncorrelated by construction.
template <typename Scalar>
TwoModeCoeffs<Scalar> factorized_maximal_pair(Scalar n1, Scalar theta1, Scalar n2, Scalar theta2,
                                              Complex<Scalar> t, Complex<Scalar> s) {
  const auto [p1, q1] = maximal_single_mode(n1, theta1);
  const auto [p2, q2] = maximal_single_mode(n2, theta2);
  TwoModeCoeffs<Scalar> c;
  // b1 = p1 a1' + q1 a1'*, b2 = p2 a2' + q2 a2'*.
  c[0] = {p1 * t, q1 * std::conj(t), p1 * s, q1 * std::conj(s)};
  c[1] = {-p2 * std::conj(s), -q2 * s, p2 * std::conj(t), q2 * t};
  return c;
}

// ---------------------------------------------------------------------------
// Doubled-matrix form

/// Complex conjugation j psi = J conj(psi) on C^2, with J a symmetric unitary.
template <typename Scalar>
struct Conjugation {
  CMatrix2<Scalar> J = CMatrix2<Scalar>::Identity();

  static Conjugation standard() { return {}; }

  /// j A j
  CMatrix2<Scalar> sharp(const CMatrix2<Scalar>& a) const { return J * a.conjugate() * J.adjoint(); }
  /// j A* j
  CMatrix2<Scalar> transpose(const CMatrix2<Scalar>& a) const {
    return J * a.transpose() * J.adjoint();
  }
};

/// Blocks (S_-, S_+) with (b1, b2) = S_- (a1, a2) + S_+ (a1*, a2*).
template <typename Scalar>
std::pair<CMatrix2<Scalar>, CMatrix2<Scalar>> doubled_blocks(const TwoModeCoeffs<Scalar>& c) {
  CMatrix2<Scalar> minus, plus;
  minus << c[0].x, c[0].z, c[1].x, c[1].z;
  plus << c[0].y, c[0].w, c[1].y, c[1].w;
  return {minus, plus};
}

/// max |S S^{-1} - I| with S = [[S-, S+], [S+#, S-#]] and the closed-form
/// inverse [[S-*, -S+^T], [-S+*, S-^T]].
template <typename Scalar>
Scalar doubled_matrix_inverse_check(const CMatrix2<Scalar>& s_minus,
                                    const CMatrix2<Scalar>& s_plus,
                                    const Conjugation<Scalar>& conj = Conjugation<Scalar>::standard()) {
  CMatrix4<Scalar> s, s_inv;
  s.template block<2, 2>(0, 0) = s_minus;
  s.template block<2, 2>(0, 2) = s_plus;
  s.template block<2, 2>(2, 0) = conj.sharp(s_plus);
  s.template block<2, 2>(2, 2) = conj.sharp(s_minus);
  s_inv.template block<2, 2>(0, 0) = s_minus.adjoint();
  s_inv.template block<2, 2>(0, 2) = -conj.transpose(s_plus);
  s_inv.template block<2, 2>(2, 0) = -s_plus.adjoint();
  s_inv.template block<2, 2>(2, 2) = conj.transpose(s_minus);
  return (s * s_inv - CMatrix4<Scalar>::Identity()).cwiseAbs().maxCoeff();
}

}  // namespace sqf
