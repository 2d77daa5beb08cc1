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

// Quadrature phase selection and the transfer coefficients that express the
// noise increments dB, dB* acting on the vacuum in terms of the measured
// quadrature dZ = dB + dB* and a commutant quadrature
// dZ' = e^{i lambda} dB' + e^{-i lambda} dB'*.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "sqfilter/bogoliubov.hpp"
#include "sqfilter/common.hpp"
#include "sqfilter/gaussian.hpp"

namespace sqf {

template <typename Scalar>
struct TransferCoeffs {
  Complex<Scalar> alpha, beta, gamma, delta;
  Scalar phase{0};
  Scalar var_z{1};        // dZ dZ / dt
  Scalar var_z_prime{1};  // dZ' dZ' / dt
  Complex<Scalar> determinant{1, 0};
};

/// Reduces an angle to (-pi/2, pi/2].
template <typename Scalar>
Scalar reduce_half_turn(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  a = std::remainder(a, pi);  // [-pi/2, pi/2]
  if (a <= -pi / 2) a += pi;
  return a;
}

/// Phase making dZ and dZ' uncorrelated: cos(l)(v + Re u) = sin(l) Im u.
template <typename Scalar>
Scalar independent_phase(Complex<Scalar> u, Scalar v, Scalar eps = Scalar(1e-14)) {
  const Scalar a = v + u.real();
  const Scalar b = u.imag();
  const Scalar scale = std::max({Scalar(1), std::abs(u), std::abs(v)});
  if (std::abs(a) <= eps * scale && std::abs(b) <= eps * scale) {
    throw DegeneratePhaseError(
        "independent_phase: v + Re u and Im u both vanish; every phase decorrelates");
  }
  return reduce_half_turn(std::atan2(a, b));
}

template <typename Scalar>
Scalar independent_phase(const BalancedCoeffs<Scalar>& b) {
  const auto corr = correlations(lift_balanced(b));
  return independent_phase(corr.u, corr.v.real());
}

/// Independent phase, or `fallback` when every phase is admissible.
template <typename Scalar>
Scalar independent_phase_or(const BalancedCoeffs<Scalar>& b, Scalar fallback) {
  try {
    return independent_phase(b);
  } catch (const DegeneratePhaseError&) {
    return fallback;
  }
}

/// dZ dZ' / dt = 2 (cos l (v + Re u) - sin l Im u).
template <typename Scalar>
Scalar cross_variation(const BalancedCoeffs<Scalar>& b, Scalar phase) {
  const auto corr = correlations(lift_balanced(b));
  return 2 * (std::cos(phase) * (corr.v.real() + corr.u.real()) - std::sin(phase) * corr.u.imag());
}

template <typename Scalar>
Scalar singular_transfer_threshold(const BalancedCoeffs<Scalar>& b) {
  const Scalar s = 1 + std::abs(b.x) + std::abs(b.y) + std::abs(b.z) + std::abs(b.w);
  return Scalar(1e-12) * s * s;
}

/// [[alpha, beta], [gamma, delta]] = [[y, w], [x*, z*]] M^{-1}, where M maps the
/// vacuum creation increments onto (dZ, dZ').
template <typename Scalar>
TransferCoeffs<Scalar> transfer_matrix(const BalancedCoeffs<Scalar>& b, Scalar phase) {
  const Complex<Scalar> e = std::polar(Scalar(1), phase);
  const Complex<Scalar> xc = std::conj(b.x), zc = std::conj(b.z);
  CMatrix2<Scalar> noise, quad;
  noise << b.y, b.w, xc, zc;
  quad << xc + b.y, zc + b.w, e * b.w + zc / e, e * b.y + xc / e;
  const Complex<Scalar> det = quad(0, 0) * quad(1, 1) - quad(0, 1) * quad(1, 0);
  if (!(std::abs(det) >= singular_transfer_threshold(b))) {
    throw SingularTransferError("transfer_matrix: |D| below threshold", det);
  }
  const auto marginal = balanced_marginal(b);
  CMatrix2<Scalar> quad_inv;
  quad_inv << quad(1, 1), -quad(0, 1), -quad(1, 0), quad(0, 0);
  quad_inv /= det;
  const CMatrix2<Scalar> t = noise * quad_inv;
  TransferCoeffs<Scalar> out;
  out.alpha = t(0, 0);
  out.beta = t(0, 1);
  out.gamma = t(1, 0);
  out.delta = t(1, 1);
  out.phase = phase;
  out.var_z = quadrature_variance(marginal, Scalar(0));
  out.var_z_prime = quadrature_variance(marginal, phase);
  out.determinant = det;
  return out;
}

/// Transfer coefficients at the independent phase (or `fallback_phase` when the
/// representation is uncorrelated and any phase works).
template <typename Scalar>
TransferCoeffs<Scalar> transfer_at_independent_phase(const BalancedCoeffs<Scalar>& b,
                                                     Scalar fallback_phase = Scalar(0)) {
  return transfer_matrix(b, independent_phase_or(b, fallback_phase));
}

template <typename Scalar>
struct TransferIdentityReport {
  Scalar number;        // |alpha|^2 varZ + |beta|^2 varZ' - n
  Scalar number_plus;   // |gamma|^2 varZ + |delta|^2 varZ' - (n+1)
  Scalar squeezing;     // gamma* alpha varZ + delta* beta varZ' - m
  Scalar sum_alpha_gamma;  // alpha + gamma - 1
  Scalar sum_beta_delta;   // beta + delta
  Scalar max() const {
    return std::max({number, number_plus, squeezing, sum_alpha_gamma, sum_beta_delta});
  }
};

/// Residuals of the moment identities with variances taken from first principles
/// (varZ = 2n+1+2Re m, varZ' = 2n+1+2Re(e^{2il} m)).
template <typename Scalar>
TransferIdentityReport<Scalar> verify_transfer_identities(const TransferCoeffs<Scalar>& t,
                                                          const SqueezingParams<Scalar>& p) {
  const Scalar vz = quadrature_variance(p, Scalar(0));
  const Scalar vzp = quadrature_variance(p, t.phase);
  TransferIdentityReport<Scalar> r;
  r.number = std::abs(std::norm(t.alpha) * vz + std::norm(t.beta) * vzp - p.n);
  r.number_plus = std::abs(std::norm(t.gamma) * vz + std::norm(t.delta) * vzp - (p.n + 1));
  r.squeezing = std::abs(std::conj(t.gamma) * t.alpha * vz + std::conj(t.delta) * t.beta * vzp - p.m);
  r.sum_alpha_gamma = std::abs(t.alpha + t.gamma - Scalar(1));
  r.sum_beta_delta = std::abs(t.beta + t.delta);
  return r;
}

/// The same identities evaluated with the (2n+1+Re m) and (2n+1+Re(e^{2il} m))
/// weights as printed in the original statement.
template <typename Scalar>
TransferIdentityReport<Scalar> verify_transfer_identities_printed_weights(
    const TransferCoeffs<Scalar>& t, const SqueezingParams<Scalar>& p) {
  const Scalar vz = 2 * p.n + 1 + p.m.real();
  const Scalar vzp = 2 * p.n + 1 + std::real(std::polar(Scalar(1), 2 * t.phase) * p.m);
  TransferIdentityReport<Scalar> r;
  r.number = std::abs(std::norm(t.alpha) * vz + std::norm(t.beta) * vzp - p.n);
  r.number_plus = std::abs(std::norm(t.gamma) * vz + std::norm(t.delta) * vzp - (p.n + 1));
  r.squeezing = std::abs(std::conj(t.gamma) * t.alpha * vz + std::conj(t.delta) * t.beta * vzp - p.m);
  r.sum_alpha_gamma = std::abs(t.alpha + t.gamma - Scalar(1));
  r.sum_beta_delta = std::abs(t.beta + t.delta);
  return r;
}

/// Second moments <dB dB*>, <dB* dB>, <dB dB> rebuilt from transfer coefficients
/// under independence of dZ and dZ'.
template <typename Scalar>
struct ReconstructedMoments {
  Scalar anti_normal;       // <dB dB*>/dt = n + 1
  Scalar normal;            // <dB* dB>/dt = n
  Complex<Scalar> squeeze;  // <dB dB>/dt = m
};

template <typename Scalar>
ReconstructedMoments<Scalar> reconstruct_moments(const TransferCoeffs<Scalar>& t) {
  return {std::norm(t.gamma) * t.var_z + std::norm(t.delta) * t.var_z_prime,
          std::norm(t.alpha) * t.var_z + std::norm(t.beta) * t.var_z_prime,
          std::conj(t.gamma) * t.alpha * t.var_z + std::conj(t.delta) * t.beta * t.var_z_prime};
}

template <typename Scalar>
struct ClosedFormAlphaGamma {
  Complex<Scalar> alpha_printed;     // (n + Re m/2 + i Im m) / (2n+1+Re m)
  Complex<Scalar> gamma_printed;     // (n+1 + Re m/2 - i Im m) / (2n+1+Re m)
  Complex<Scalar> alpha_moment;      // (n + m) / (2n+1+2Re m)
  Complex<Scalar> gamma_moment;      // (n+1 + Re m - i Im m) / (2n+1+2Re m)
  Complex<Scalar> alpha_transfer;    // from transfer_matrix on a balanced representation
  Scalar printed_deviation;          // |alpha_printed - alpha_transfer|
  Scalar moment_deviation;           // |alpha_moment - alpha_transfer|
  bool printed_consistent;           // printed_deviation <= 1e-9
  bool moment_consistent;            // moment_deviation <= 1e-9
};

/// Closed forms for alpha, gamma checked against the authoritative transfer
/// matrix of a balanced representation of p at its independent phase.
template <typename Scalar>
ClosedFormAlphaGamma<Scalar> closed_form_alpha_gamma(const SqueezingParams<Scalar>& p) {
  validate(p);
  ClosedFormAlphaGamma<Scalar> out;
  const Scalar re = p.m.real(), im = p.m.imag();
  const Scalar printed_den = 2 * p.n + 1 + re;
  out.alpha_printed = Complex<Scalar>(p.n + re / 2, im) / printed_den;
  out.gamma_printed = Complex<Scalar>(p.n + 1 + re / 2, -im) / printed_den;
  out.alpha_moment = (p.n + p.m) / (2 * p.n + 1 + 2 * re);
  out.gamma_moment = Scalar(1) - out.alpha_moment;

  const auto bv = bv_params_for(p);
  const auto b = balanced_from_bv(bv.r, bv.rho, bv.theta);
  out.alpha_transfer = transfer_at_independent_phase(b).alpha;
  out.printed_deviation = std::abs(out.alpha_printed - out.alpha_transfer);
  out.moment_deviation = std::abs(out.alpha_moment - out.alpha_transfer);
  out.printed_consistent = out.printed_deviation <= Scalar(1e-9);
  out.moment_consistent = out.moment_deviation <= Scalar(1e-9);
  return out;
}

}  // namespace sqf
