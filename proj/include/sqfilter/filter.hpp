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

// Unnormalized (Zakai) and normalized (Kushner-Stratonovich) filters for
// homodyne detection of the output quadrature, propagated in density form:
// sigma_t(X) = tr(varsigma_t X), pi_t(X) = tr(rho_t X).

#include <cmath>
#include <string>

#include "sqfilter/common.hpp"
#include "sqfilter/quadrature.hpp"
#include "sqfilter/system_model.hpp"

namespace sqf {

template <typename Scalar>
struct FilterState {
  CMatrix<Scalar> rho;  // unnormalized for Zakai, unit trace for Kushner
  Scalar t{0};
};

/// Measurement operator gamma L - alpha L* entering the filter gain.
template <typename Scalar>
CMatrix<Scalar> tilde_L(const SystemModel<Scalar>& mdl, const TransferCoeffs<Scalar>& t) {
  return t.gamma * mdl.L - t.alpha * mdl.L.adjoint();
}

/// Everything a filter step needs, computed once per model.
template <typename Scalar>
class FilterKernel {
 public:
  FilterKernel(const SystemModel<Scalar>& mdl, const TransferCoeffs<Scalar>& t)
      : gen_(mdl),
        tl_(tilde_L(mdl, t)),
        tld_(tl_.adjoint()),
        gain_(tl_ + tld_),
        var_z_(t.var_z) {}

  const Generator<Scalar>& generator() const { return gen_; }
  const CMatrix<Scalar>& tilde_l() const { return tl_; }
  /// tilde L + tilde L*
  const CMatrix<Scalar>& gain_operator() const { return gain_; }
  Scalar var_z() const { return var_z_; }

  /// tr((tilde L + tilde L*) rho)
  Scalar gain_expectation(const CMatrix<Scalar>& rho) const {
    return std::real((gain_ * rho).trace());
  }

  /// varsigma + L*(varsigma) dt + (tL varsigma + varsigma tL*) dY
  void zakai_update(CMatrix<Scalar>& s, Scalar dy, Scalar dt) const {
    CMatrix<Scalar> next = s + dt * gen_(s);
    next.noalias() += dy * (tl_ * s);
    next.noalias() += dy * (s * tld_);
    s = Scalar(0.5) * (next + next.adjoint());
  }

  /// rho + L*(rho) dt + (tL rho + rho tL* - tr(gain rho) rho) dI, renormalized.
  /// Returns the trace before renormalization.
  Scalar kushner_update(CMatrix<Scalar>& rho, Scalar di, Scalar dt) const {
    const Scalar g = gain_expectation(rho);
    CMatrix<Scalar> next = rho + dt * gen_(rho);
    next.noalias() += di * (tl_ * rho);
    next.noalias() += di * (rho * tld_);
    next -= (di * g) * rho;
    rho = Scalar(0.5) * (next + next.adjoint());
    const Scalar tr = std::real(rho.trace());
    if (tr > 0) rho /= tr;
    return tr;
  }

  /// dI = dY - varZ tr((tL + tL*) rho) dt
  Scalar innovation(const CMatrix<Scalar>& rho, Scalar dy, Scalar dt) const {
    return dy - var_z_ * gain_expectation(rho) * dt;
  }

 private:
  Generator<Scalar> gen_;
  CMatrix<Scalar> tl_, tld_, gain_;
  Scalar var_z_;
};

/// One Euler-Maruyama step of the Zakai equation driven by the record increment dY.
template <typename Scalar>
FilterState<Scalar> zakai_step(const SystemModel<Scalar>& mdl, const TransferCoeffs<Scalar>& t,
                               const FilterState<Scalar>& s, Scalar dy, Scalar dt) {
  require_square(s.rho, mdl.dim(), "zakai_step state");
  FilterState<Scalar> out{s.rho, s.t + dt};
  FilterKernel<Scalar>(mdl, t).zakai_update(out.rho, dy, dt);
  return out;
}

/// One Euler-Maruyama step of the Kushner-Stratonovich equation driven by the innovation dI.
template <typename Scalar>
FilterState<Scalar> kushner_step(const SystemModel<Scalar>& mdl, const TransferCoeffs<Scalar>& t,
                                 const FilterState<Scalar>& s, Scalar di, Scalar dt) {
  require_square(s.rho, mdl.dim(), "kushner_step state");
  if (std::abs(s.rho.trace() - Scalar(1)) > Scalar(1e-8)) {
    throw ValidationError("kushner_step: state must have unit trace");
  }
  FilterState<Scalar> out{s.rho, s.t + dt};
  const Scalar tr = FilterKernel<Scalar>(mdl, t).kushner_update(out.rho, di, dt);
  if (!(tr > 0)) {
    throw StepFailure("kushner_step: trace collapsed to " + std::to_string(double(tr)) +
                          "; reduce dt",
                      double(out.t));
  }
  return out;
}

template <typename Scalar>
Scalar innovations_increment(const SystemModel<Scalar>& mdl, const TransferCoeffs<Scalar>& t,
                             const CMatrix<Scalar>& rho, Scalar dy, Scalar dt) {
  const CMatrix<Scalar> tl = tilde_L(mdl, t);
  const CMatrix<Scalar> gain = tl + tl.adjoint();
  return dy - t.var_z * std::real((gain * rho).trace()) * dt;
}

/// Smallest eigenvalue of a Hermitian matrix (closed form for 2x2).
template <typename Scalar>
Scalar min_eigenvalue(const CMatrix<Scalar>& rho) {
  if (rho.rows() == 2) {
    const Scalar a = std::real(rho(0, 0)), d = std::real(rho(1, 1));
    const Scalar h = (a - d) / 2;
    return (a + d) / 2 - std::sqrt(h * h + std::norm(rho(0, 1)));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace sqf
