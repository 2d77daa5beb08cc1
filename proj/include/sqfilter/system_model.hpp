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

// Finite-dimensional system driven through a single squeezed noise channel:
// Hamiltonian H, coupling L and bath parameters (n, m).

#include <cmath>
#include <string>

#include "sqfilter/common.hpp"
#include "sqfilter/gaussian.hpp"

namespace sqf {

template <typename Scalar>
struct SystemModel {
  CMatrix<Scalar> H;
  CMatrix<Scalar> L;
  SqueezingParams<Scalar> bath;

  Eigen::Index dim() const { return H.rows(); }
};

template <typename Scalar>
void validate(const SystemModel<Scalar>& mdl) {
  const auto d = mdl.H.rows();
  if (d <= 0) throw ShapeError("system model: dimension must be positive");
  require_square(mdl.H, d, "system model H");
  require_square(mdl.L, d, "system model L");
  if (hermitian_residual(mdl.H) > Scalar(1e-12) * (1 + mdl.H.cwiseAbs().maxCoeff())) {
    throw ValidationError("system model: H must be Hermitian");
  }
  validate(mdl.bath);
}

/// K = -(n+1)/2 L*L - n/2 LL* - m/2 L*^2 - m*/2 L^2 - iH.
template <typename Scalar>
CMatrix<Scalar> ito_drift_K(const SystemModel<Scalar>& mdl) {
  const auto& L = mdl.L;
  const CMatrix<Scalar> Ld = L.adjoint();
  const Scalar n = mdl.bath.n;
  const Complex<Scalar> m = mdl.bath.m;
  return -Scalar(0.5) * (n + 1) * (Ld * L) - Scalar(0.5) * n * (L * Ld) -
         kI<Scalar> * mdl.H + Scalar(0.5) * m * (Ld * Ld) + Scalar(0.5) * std::conj(m) * (L * L);
}

/// K + K* + (n+1)L*L + nLL* - mL*^2 - m*L^2, which vanishes for an isometric evolution
/// driven by noise with dB dB = m dt.
template <typename Scalar>
CMatrix<Scalar> isometry_defect(const SystemModel<Scalar>& mdl) {
  const auto K = ito_drift_K(mdl);
  const auto& L = mdl.L;
  const CMatrix<Scalar> Ld = L.adjoint();
  const Scalar n = mdl.bath.n;
  const Complex<Scalar> m = mdl.bath.m;
  return K + K.adjoint() + (n + 1) * (Ld * L) + n * (L * Ld) - m * (Ld * Ld) -
         std::conj(m) * (L * L);
}

namespace detail {
// (1/2)[A, X]B + (1/2)A[X, B]
template <typename Scalar>
CMatrix<Scalar> dissipator_block(const CMatrix<Scalar>& A, const CMatrix<Scalar>& X,
                                 const CMatrix<Scalar>& B) {
  return Scalar(0.5) * (A * X - X * A) * B + Scalar(0.5) * A * (X * B - B * X);
}
}  // namespace detail

/// Heisenberg-picture generator acting on a system observable X.
template <typename Scalar>
CMatrix<Scalar> lindblad_heisenberg(const SystemModel<Scalar>& mdl, const CMatrix<Scalar>& X) {
  require_square(X, mdl.dim(), "lindblad_heisenberg X");
  const auto& L = mdl.L;
  const CMatrix<Scalar> Ld = L.adjoint();
  const Scalar n = mdl.bath.n;
  const Complex<Scalar> m = mdl.bath.m;
  return (n + 1) * detail::dissipator_block<Scalar>(Ld, X, L) +
         n * detail::dissipator_block<Scalar>(L, X, Ld) -
         m * detail::dissipator_block<Scalar>(Ld, X, Ld) -
         std::conj(m) * detail::dissipator_block<Scalar>(L, X, L) -
         kI<Scalar> * (X * mdl.H - mdl.H * X);
}

/// Precomputed operators for repeated application of the Schrodinger-picture
/// generator rho -> K rho + rho K* + (n+1) L rho L* + n L* rho L - m L* rho L* - m* L rho L.
template <typename Scalar>
class Generator {
 public:
  explicit Generator(const SystemModel<Scalar>& mdl)
      : K_(ito_drift_K(mdl)),
        Kd_(K_.adjoint()),
        L_(mdl.L),
        Ld_(mdl.L.adjoint()),
        n_(mdl.bath.n),
        m_(mdl.bath.m) {}

  CMatrix<Scalar> operator()(const CMatrix<Scalar>& rho) const {
    CMatrix<Scalar> out = K_ * rho + rho * Kd_;
    const CMatrix<Scalar> L_rho = L_ * rho;
    const CMatrix<Scalar> Ld_rho = Ld_ * rho;
    out.noalias() += (n_ + 1) * (L_rho * Ld_);
    out.noalias() += n_ * (Ld_rho * L_);
    if (m_ != Complex<Scalar>(0)) {
      out.noalias() -= m_ * (Ld_rho * Ld_);
      out.noalias() -= std::conj(m_) * (L_rho * L_);
    }
    return out;
  }

  Eigen::Index dim() const { return K_.rows(); }

 private:
  CMatrix<Scalar> K_, Kd_, L_, Ld_;
  Scalar n_;
  Complex<Scalar> m_;
};

/// Adjoint generator under tr((LX) rho) = tr(X L*(rho)); evolves density matrices.
template <typename Scalar>
CMatrix<Scalar> lindblad_schrodinger(const SystemModel<Scalar>& mdl, const CMatrix<Scalar>& rho) {
  require_square(rho, mdl.dim(), "lindblad_schrodinger rho");
  return Generator<Scalar>(mdl)(rho);
}

/// Matrix of the Schrodinger generator on column-major vec(rho).
template <typename Scalar>
CMatrix<Scalar> superoperator(const SystemModel<Scalar>& mdl) {
  const auto d = mdl.dim();
  const Generator<Scalar> gen(mdl);
  CMatrix<Scalar> S(d * d, d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      CMatrix<Scalar> e = CMatrix<Scalar>::Zero(d, d);
      e(i, j) = 1;
      const CMatrix<Scalar> col = gen(e);
      S.col(j * d + i) = col.reshaped();
    }
  }
  return S;
}

/// Unit-trace null vector of the generator.
template <typename Scalar>
CMatrix<Scalar> stationary_state(const SystemModel<Scalar>& mdl) {
  const auto d = mdl.dim();
  const auto S = superoperator(mdl);
  Eigen::JacobiSVD<CMatrix<Scalar>> svd(S, Eigen::ComputeFullV);
  const auto v = svd.matrixV().col(S.cols() - 1);
  CMatrix<Scalar> rho = v.reshaped(d, d);
  rho /= rho.trace();
  return Scalar(0.5) * (rho + rho.adjoint());
}

template <typename Scalar>
void validate_state(const CMatrix<Scalar>& rho, Eigen::Index d, Scalar tol = Scalar(1e-8)) {
  require_square(rho, d, "density matrix");
  if (hermitian_residual(rho) > tol) throw ValidationError("density matrix: not Hermitian");
  if (std::abs(rho.trace() - Scalar(1)) > tol) {
    throw ValidationError("density matrix: trace must be 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(Scalar(0.5) * (rho + rho.adjoint()));
  if (es.eigenvalues().minCoeff() < -tol) {
    throw ValidationError("density matrix: not positive semidefinite");
  }
}

/// Steps needed to cover `duration` with step `dt`; the ratio must be integral.
inline long step_count(double duration, double dt) {
  if (!(dt > 0) || !(duration >= 0)) throw ValidationError("time grid: need dt > 0, T >= 0");
  const double ratio = duration / dt;
  const long steps = std::lround(ratio);
  if (std::abs(ratio - double(steps)) > 1e-6 * std::max(1.0, ratio)) {
    throw ValidationError("time grid: T must be an integer multiple of dt");
  }
  return steps;
}

/// Deterministic evolution d rho/dt = L*(rho) by the classical fourth-order Runge-Kutta method.
template <typename Scalar>
CMatrix<Scalar> master_equation_evolve(const SystemModel<Scalar>& mdl, const CMatrix<Scalar>& rho0,
                                       Scalar duration, Scalar dt = Scalar(1e-3)) {
  validate(mdl);
  validate_state(rho0, mdl.dim());
  const long steps = step_count(double(duration), double(dt));
  const Generator<Scalar> gen(mdl);
  CMatrix<Scalar> rho = rho0;
  for (long k = 0; k < steps; ++k) {
    const CMatrix<Scalar> k1 = gen(rho);
    const CMatrix<Scalar> k2 = gen(rho + (dt / 2) * k1);
    const CMatrix<Scalar> k3 = gen(rho + (dt / 2) * k2);
    const CMatrix<Scalar> k4 = gen(rho + dt * k3);
    rho += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    rho = Scalar(0.5) * (rho + rho.adjoint()).eval();
  }
  return rho;
}

template <typename Scalar>
struct CheckedEvolution {
  CMatrix<Scalar> rho;
  Scalar step_halving_error;  // max |rho(dt) - rho(dt/2)|
};

/// Evolution plus a step-halving estimate of its discretization error.
template <typename Scalar>
CheckedEvolution<Scalar> master_equation_evolve_checked(const SystemModel<Scalar>& mdl,
                                                        const CMatrix<Scalar>& rho0,
                                                        Scalar duration, Scalar dt = Scalar(1e-3)) {
  auto coarse = master_equation_evolve(mdl, rho0, duration, dt);
  auto fine = master_equation_evolve(mdl, rho0, duration, dt / 2);
  const Scalar err = (coarse - fine).cwiseAbs().maxCoeff();
  return {std::move(fine), err};
}

}  // namespace sqf
