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

// Phase curves lambda(theta) for the (r, rho, theta) balanced family at fixed
// tau = cosh^2(rho/2) / (cosh^2(rho/2) + sinh^2(rho/2)), i.e. cosh(rho) = 1/(2 tau - 1).

#include <string>
#include <vector>

namespace sqf {

struct LambdaRow {
  double tau = 0;
  double theta = 0;
  double rho = 0;                    // squeezing parameter used for the derived column
  double lambda_closed_form = 0;         // arctan((2 tau + cos theta) / sin theta)
  double lambda_derived = 0;         // independent phase of the balanced coefficients
  double tau_effective = 0;          // sqrt(tau (1 - tau)) = tanh(rho) / 2
  double lambda_closed_form_effective = 0;  // closed form with tau_effective in place of tau
  bool degenerate_theta = false;     // |sin theta| below 1e-12
  bool tau_limit = false;            // tau = 1/2 (rho -> infinity), evaluated at rho = kTauLimitRho
  bool any_phase = false;            // uncorrelated modes: every phase is independent

  std::string flags() const;
};

inline constexpr double kTauLimitRho = 40.0;

/// The six curves of the published figure: tau = 0.5, 0.6, ..., 1.0.
std::vector<double> figure_taus();

/// `points` angles (k + 1/2) 2 pi / points, which never hit sin theta = 0.
std::vector<double> theta_grid(int points);

/// One row; `r` is the two-mode parameter of the representation (any r > 0
/// gives the same phase). Throws DomainError for tau outside [1/2, 1].
LambdaRow lambda_row(double tau, double theta, double r = 1.0);

std::vector<LambdaRow> lambda_curve(const std::vector<double>& taus,
                                    const std::vector<double>& thetas, double r = 1.0);

/// CSV with header, 17 significant digits.
std::string lambda_curve_csv(const std::vector<LambdaRow>& rows);

struct LambdaComparison {
  double max_derived_vs_effective = 0;  // derived vs closed form at tau_effective, all rows
  double max_derived_vs_closed_form_half = 0;  // derived vs closed form on the tau = 1/2 rows
  double max_derived_vs_closed_form = 0;    // largest systematic gap over all rows
};

/// Angles are compared modulo pi; degenerate rows are skipped.
LambdaComparison compare_lambda(const std::vector<LambdaRow>& rows);

}  // namespace sqf
