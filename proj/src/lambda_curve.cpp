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

#include "sqfilter/lambda_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sqfilter/quadrature.hpp"

namespace sqf {

namespace {

constexpr double kPi = std::numbers::pi;

double closed_form_phase(double tau, double theta) {
  // arctan of a ratio, kept finite at sin theta = 0 through atan2 and reduced
  // to the same half-open interval as the derived phase.
  return reduce_half_turn(std::atan2(2 * tau + std::cos(theta), std::sin(theta)));
}

double angle_gap(double a, double b) {
  return std::abs(std::remainder(a - b, kPi));
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string LambdaRow::flags() const {
  std::string out;
  if (degenerate_theta) out += "degenerate_sin_theta";
  if (tau_limit) {
    if (!out.empty()) out += '|';
    out += "tau_half_limit";
  }
  if (any_phase) {
    if (!out.empty()) out += '|';
    out += "any_phase";
  }
  return out;
}

std::vector<double> figure_taus() { return {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

std::vector<double> theta_grid(int points) {
  if (points < 1) throw ValidationError("theta grid: need at least one point");
  std::vector<double> out(points);
  for (int k = 0; k < points; ++k) out[k] = (k + 0.5) * 2 * kPi / points;
  return out;
}

LambdaRow lambda_row(double tau, double theta, double r) {
  if (!(tau >= 0.5 && tau <= 1.0)) throw DomainError("lambda curve: tau must lie in [1/2, 1]");
  if (!(r > 0)) throw DomainError("lambda curve: r must be positive");
  LambdaRow row;
  row.tau = tau;
  row.theta = theta;
  row.tau_limit = tau - 0.5 < 1e-12;
  row.rho = row.tau_limit ? kTauLimitRho : std::acosh(1.0 / (2 * tau - 1));
  row.degenerate_theta = std::abs(std::sin(theta)) < 1e-12;
  row.lambda_closed_form = closed_form_phase(tau, theta);
  row.tau_effective = 0.5 * std::tanh(row.rho);
  row.lambda_closed_form_effective = closed_form_phase(row.tau_effective, theta);
  const auto b = balanced_from_bv(r, row.rho, theta);
  try {
    row.lambda_derived = independent_phase(b);
  } catch (const DegeneratePhaseError&) {
    // Every phase decorrelates here; report the thermal choice pi/2.
    row.any_phase = true;
    row.lambda_derived = std::numbers::pi / 2;
  }
  return row;
}

std::vector<LambdaRow> lambda_curve(const std::vector<double>& taus,
                                    const std::vector<double>& thetas, double r) {
  std::vector<LambdaRow> rows;
  rows.reserve(taus.size() * thetas.size());
  for (double tau : taus) {
    for (double theta : thetas) rows.push_back(lambda_row(tau, theta, r));
  }
  return rows;
}

std::string lambda_curve_csv(const std::vector<LambdaRow>& rows) {
  std::string out =
      "tau,theta,lambda_closed_form,lambda_derived,tau_effective,lambda_closed_form_tau_effective,rho,flags\n";
  for (const auto& r : rows) {
    out += number(r.tau) + ',' + number(r.theta) + ',' + number(r.lambda_closed_form) + ',' +
           number(r.lambda_derived) + ',' + number(r.tau_effective) + ',' +
           number(r.lambda_closed_form_effective) + ',' + number(r.rho) + ',' + r.flags() + '\n';
  }
  return out;
}

LambdaComparison compare_lambda(const std::vector<LambdaRow>& rows) {
  LambdaComparison c;
  for (const auto& r : rows) {
    if (r.degenerate_theta) continue;
    c.max_derived_vs_effective =
        std::max(c.max_derived_vs_effective, angle_gap(r.lambda_derived, r.lambda_closed_form_effective));
    const double gap = angle_gap(r.lambda_derived, r.lambda_closed_form);
    c.max_derived_vs_closed_form = std::max(c.max_derived_vs_closed_form, gap);
    if (r.tau_limit) c.max_derived_vs_closed_form_half = std::max(c.max_derived_vs_closed_form_half, gap);
  }
  return c;
}

}  // namespace sqf
