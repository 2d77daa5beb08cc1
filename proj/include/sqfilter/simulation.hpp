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

// Trajectory generation and ensemble averaging for the filters.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sqfilter/filter.hpp"

namespace sqf {

struct Observable {
  std::string name;
  MatrixXc matrix;
};

/// Per-trajectory RNG stream derived from (master seed, trajectory index).
std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index);

enum class FilterMode { kushner, zakai };

const char* to_string(FilterMode mode);

struct PositivityStats {
  double min_eigenvalue = 1.0;
  long violations = 0;  // steps with min eigenvalue < -1e-6
  double first_violation_time = -1.0;
};

/// Standardized innovation sums, kept for both the first-principles
/// normalization and the printed (n + Re m/2) drift with (2n+1+Re m) variance.
struct InnovationStats {
  long count = 0;
  double sum = 0, sum_sq = 0;
  double printed_sum = 0, printed_sum_sq = 0;

  void merge(const InnovationStats& o);
  double mean() const { return count ? sum / count : 0.0; }
  double variance() const;
  double printed_mean() const { return count ? printed_sum / count : 0.0; }
  double printed_variance() const;
};

struct Trajectory {
  double dt = 0;
  long steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  FilterMode mode = FilterMode::kushner;
  std::vector<double> dY;  // length steps
  std::vector<double> dI;  // length steps (Kushner mode; recomputed from dY)
  /// estimates[k][j]: observable k at grid point j (length steps + 1). For
  /// Zakai runs these are the unnormalized tr(varsigma X).
  std::vector<std::vector<double>> estimates;
  /// Zakai runs only: tr(varsigma X) / tr(varsigma).
  std::vector<std::vector<double>> normalized;
  std::vector<double> norm;  // tr(varsigma) (Zakai) or 1 (Kushner)
  long snapshot_stride = 0;
  std::vector<MatrixXc> snapshots;  // every snapshot_stride steps when > 0
  PositivityStats positivity;
  InnovationStats innovations;

  double time(long j) const { return double(j) * dt; }
};

struct TrajectoryOptions {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  long snapshot_stride = 0;
  bool keep_record = true;  // store dY / dI sequences
};

/// Physical-measure simulation: dI ~ N(0, varZ dt), dY = dI + varZ tr(gain rho) dt,
/// then a Kushner step.
Trajectory simulate_trajectory(const SystemModel<double>& mdl, const TransferCoeffs<double>& t,
                               const MatrixXc& rho0, double duration, double dt,
                               const std::vector<Observable>& observables,
                               const TrajectoryOptions& opts);

/// Reference-measure simulation: dY ~ N(0, varZ dt) driving the Zakai equation.
Trajectory simulate_zakai_reference(const SystemModel<double>& mdl,
                                    const TransferCoeffs<double>& t, const MatrixXc& rho0,
                                    double duration, double dt,
                                    const std::vector<Observable>& observables,
                                    const TrajectoryOptions& opts);

/// Drives the Zakai equation with a given record; returns tr(varsigma X)/tr(varsigma)
/// on the grid (length dY.size() + 1) for observable X.
std::vector<double> zakai_ratio_along(const SystemModel<double>& mdl,
                                      const TransferCoeffs<double>& t, const MatrixXc& rho0,
                                      const std::vector<double>& dY, double dt,
                                      const MatrixXc& X);

struct EnsembleOptions {
  FilterMode mode = FilterMode::kushner;
  long trajectories = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;           // 0: hardware concurrency
  long record_stride = 1;         // summary grid stride (in steps)
  long keep_trajectories = 0;     // full Trajectory objects retained for output
  long snapshot_stride = 0;
};

struct ObservableSummary {
  std::string name;
  std::vector<double> mean;       // per summary grid point
  std::vector<double> stderr_;    // standard error of the mean
  std::vector<double> reference;  // master-equation value
  /// Zakai runs: ensemble mean and stderr of the normalized ratio.
  std::vector<double> normalized_mean;
  std::vector<double> normalized_stderr;
};

struct EnsembleSummary {
  FilterMode mode = FilterMode::kushner;
  long trajectories = 0;
  double dt = 0;
  long record_stride = 1;
  std::vector<double> times;
  std::vector<ObservableSummary> observables;
  InnovationStats innovations;
  PositivityStats positivity;
  std::vector<Trajectory> kept;
};

/// Runs `opts.trajectories` independent trajectories (in parallel when
/// threads > 1) and aggregates them in a fixed block order, so the summary is
/// independent of the thread count.
EnsembleSummary run_ensemble(const SystemModel<double>& mdl, const TransferCoeffs<double>& t,
                             const MatrixXc& rho0, double duration, double dt,
                             const std::vector<Observable>& observables,
                             const EnsembleOptions& opts);

/// tr(rho_ME(t) X) on the grid t = j * dt * stride, j = 0..steps/stride, by RK4.
std::vector<std::vector<double>> master_equation_series(const SystemModel<double>& mdl,
                                                        const MatrixXc& rho0, double duration,
                                                        double dt, long stride,
                                                        const std::vector<Observable>& observables);

}  // namespace sqf
