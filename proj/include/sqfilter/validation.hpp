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

// Independent oracles, limit checks and statistical harnesses that certify the
// coefficient formulas and the filters, collected into a JSON report.

#include <cstdint>
#include <string>
#include <vector>

#include "sqfilter/simulation.hpp"

namespace sqf {

/// Second moments per unit time on the joint vacuum, from the Fock Ito table
/// dA_i dA_j* = delta_ij dt applied to the raw coefficients.
struct MomentTable {
  cdouble bb_dag;      // <dB dB*>
  cdouble b_dag_b;     // <dB* dB>
  cdouble bb;          // <dB dB>
  cdouble bp_bp_dag;   // <dB' dB'*>
  cdouble b_bp_dag;    // <dB dB'*>
  cdouble b_bp;        // <dB dB'>
};

MomentTable gaussian_moment_oracle(const BalancedCoeffs<double>& b);

/// Largest deviation between the oracle table and marginals()/correlations().
double moment_oracle_residual(const BalancedCoeffs<double>& b);

struct SweepResult {
  long draws = 0;
  double max_residual = 0;
  double threshold = 0;
  bool passed = false;
  double seconds = 0;
};

/// Commutation, marginal, number, correlation, inversion and balanced
/// identities over `draws` BV and `draws` HKKR parameter sets.
SweepResult bogoliubov_identity_sweep(long draws, std::uint64_t seed);

/// |deficit - sinh^2(r)/4| over random BV draws.
SweepResult bv_deficit_sweep(long draws, std::uint64_t seed);

/// Uncorrelated pairs of maximally squeezed modes: max relative gap between
/// |m|^2 and n(n+1) over both marginals.
SweepResult uncorrelated_maximal_sweep(long draws, std::uint64_t seed);

struct TransferSweep {
  long draws = 0;
  double max_sum_residual = 0;              // alpha+gamma-1, beta+delta
  double max_moment_residual = 0;           // (n+1, n, m) with varZ = 2n+1+2Re m
  double max_moment_residual_printed = 0;   // same with 2n+1+Re m weights
  double max_alpha_closed_form = 0;         // |alpha - (n+m)/(2n+1+2Re m)|
  double max_alpha_printed_closed_form = 0; // |alpha - printed closed form|
  double max_hkkr_literal_cross = 0;        // literal HKKR cross identity
  double seconds = 0;
};

TransferSweep transfer_identity_sweep(long draws, std::uint64_t seed);

struct ThermalLimit {
  double n = 0;
  cdouble alpha, gamma;
  double alpha_deviation = 0;    // |alpha - n/(2n+1)|
  double tilde_l_deviation = 0;  // |tL - ((n+1)L - nL*)/(2n+1)|
  double hkkr_deviation = 0;     // |HKKR(n,0) - (sqrt(n+1), 0, 0, sqrt(n))|
  bool passed = false;
};

/// Transfer coefficients of HKKR(n, 0) at phase pi/2 against the thermal formulas.
ThermalLimit thermal_limit_check(double n, const MatrixXc& L);

struct VacuumLimit {
  double dt = 0;
  double max_deviation = 0;  // max over steps of max |rho - rho_ref| entries
  double threshold = 0;      // 10 dt
  bool passed = false;
};

/// Kushner filter with a vacuum bath against the independent vacuum homodyne
/// filter on the same innovation path.
VacuumLimit vacuum_limit_check(const SystemModel<double>& mdl, const MatrixXc& rho0,
                               const std::vector<double>& dI, double dt);

struct VacuumConvergence {
  std::vector<double> dts;         // coarsest first
  std::vector<double> deviations;  // mean over paths of the max deviation
  double halving_ratio = 0;        // deviation(dt) / deviation(dt/2) at the coarsest pair
  bool passed = false;             // deviation(dt) <= 1e-2 and ratio in [1.5, 2.7]
};

/// Deviation at dt and its halvings, on Brownian paths sampled at the finest
/// step and aggregated for the coarser runs.
VacuumConvergence vacuum_convergence(const SystemModel<double>& mdl, const MatrixXc& rho0,
                                     double duration, double dt, int halvings, int paths,
                                     std::uint64_t seed);

struct TimeCheck {
  double t = 0;
  double mean = 0;
  double stderr_ = 0;
  double reference = 0;
  double bias = 0;
  bool passed = false;
};

struct UnbiasednessResult {
  FilterMode mode = FilterMode::kushner;
  long trajectories = 0;
  std::vector<TimeCheck> checks;
  InnovationStats innovations;
  PositivityStats positivity;
  bool passed = false;
};

/// Ensemble mean of pi_t(X) (Kushner) or sigma_t(X) (Zakai) against the master
/// equation at the requested times; pass iff every |bias| <= 3 stderr.
UnbiasednessResult unbiasedness_test(const SystemModel<double>& mdl, const TransferCoeffs<double>& t,
                                     const MatrixXc& rho0, long trajectories, double duration,
                                     double dt, const MatrixXc& X, const std::vector<double>& times,
                                     const EnsembleOptions& base);

struct InnovationCheck {
  double mean = 0, variance = 0;
  double mean_bound = 0;      // 3 / sqrt(count)
  double variance_bound = 0;  // 3 sqrt(2 / (count - 1))
  bool mean_passed = false, variance_passed = false;
};

InnovationCheck innovation_check(long count, double mean, double variance);

/// Arbitration of the innovations drift: records are generated with the
/// first-principles filter, and a second filter driven by
/// dI = dY - (n + Re m/2) tr((L + L*) rho) dt runs alongside. Each filter's
/// ensemble mean of X at `duration` is compared with the master equation.
/// Both filters see the same record, so if the printed coefficient were right
/// the two estimates would coincide pathwise; `paired` tests their mean
/// difference against zero.
struct DriftArbitration {
  long trajectories = 0;
  long collapsed = 0;  // printed-drift runs whose trace collapsed
  TimeCheck first_principles;
  TimeCheck printed;
  TimeCheck paired;
};

DriftArbitration innovations_drift_arbitration(const SystemModel<double>& mdl,
                                               const TransferCoeffs<double>& t,
                                               const MatrixXc& rho0, long trajectories,
                                               double duration, double dt, const MatrixXc& X,
                                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Report

struct Check {
  std::string name;
  double residual = 0;
  double threshold = 0;
  bool passed = false;
  bool informational = false;  // reported, excluded from the overall verdict
  std::string detail;
};

struct Verdict {
  std::string question;
  std::string candidates;
  std::string resolution;
  std::string evidence;
};

struct ValidationReport {
  std::vector<Check> checks;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;

  bool passed() const;
  std::string to_json() const;
};

struct SuiteOptions {
  long sweep_draws = 1000;
  long trajectories = 10000;
  long arbitration_trajectories = 2000;
  double duration = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool run_ensembles = true;
};

/// Everything `check` reports for one configured model. `b` is the balanced
/// representation of mdl.bath in use; `observables` name the ensemble checks.
ValidationReport run_validation_suite(const SystemModel<double>& mdl,
                                      const BalancedCoeffs<double>& b, const MatrixXc& rho0,
                                      const std::vector<Observable>& observables,
                                      const SuiteOptions& opts);

}  // namespace sqf
