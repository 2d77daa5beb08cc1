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

#include "sqfilter/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace sqf {

namespace {

constexpr long kBlockSize = 64;
constexpr double kPositivityFloor = -1e-6;

double expectation(const MatrixXc& rho, const MatrixXc& X) {
  // tr(rho X) without forming the product.
  return std::real((rho.transpose().array() * X.array()).sum());
}

void track_positivity(PositivityStats& stats, const MatrixXc& rho, double t) {
  const double ev = min_eigenvalue<double>(rho);
  stats.min_eigenvalue = std::min(stats.min_eigenvalue, ev);
  if (ev < kPositivityFloor) {
    if (stats.violations == 0) stats.first_violation_time = t;
    ++stats.violations;
  }
}

void merge_positivity(PositivityStats& into, const PositivityStats& from) {
  if (from.violations > 0 &&
      (into.violations == 0 || from.first_violation_time < into.first_violation_time)) {
    into.first_violation_time = from.first_violation_time;
  }
  into.violations += from.violations;
  into.min_eigenvalue = std::min(into.min_eigenvalue, from.min_eigenvalue);
}

Trajectory make_trajectory(double dt, long steps, const TrajectoryOptions& opts, FilterMode mode,
                           std::size_t n_obs) {
  Trajectory tr;
  tr.dt = dt;
  tr.steps = steps;
  tr.seed = opts.seed;
  tr.index = opts.index;
  tr.mode = mode;
  tr.snapshot_stride = opts.snapshot_stride;
  if (opts.keep_record) {
    tr.dY.reserve(steps);
    if (mode == FilterMode::kushner) tr.dI.reserve(steps);
  }
  tr.estimates.assign(n_obs, std::vector<double>(steps + 1));
  if (mode == FilterMode::zakai) tr.normalized.assign(n_obs, std::vector<double>(steps + 1));
  tr.norm.assign(steps + 1, 1.0);
  return tr;
}

void check_inputs(const SystemModel<double>& mdl, const MatrixXc& rho0,
                  const std::vector<Observable>& observables) {
  validate(mdl);
  validate_state(rho0, mdl.dim());
  for (const auto& o : observables) require_square(o.matrix, mdl.dim(), o.name.c_str());
}

}  // namespace

const char* to_string(FilterMode mode) {
  return mode == FilterMode::kushner ? "kushner" : "zakai";
}

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index),
                    std::uint32_t(index >> 32), std::uint32_t(0x5eed)};
  return std::mt19937_64(seq);
}

void InnovationStats::merge(const InnovationStats& o) {
  count += o.count;
  sum += o.sum;
  sum_sq += o.sum_sq;
  printed_sum += o.printed_sum;
  printed_sum_sq += o.printed_sum_sq;
}

double InnovationStats::variance() const {
  if (count < 2) return 0.0;
  const double mu = mean();
  return (sum_sq - count * mu * mu) / double(count - 1);
}

double InnovationStats::printed_variance() const {
  if (count < 2) return 0.0;
  const double mu = printed_mean();
  return (printed_sum_sq - count * mu * mu) / double(count - 1);
}

Trajectory simulate_trajectory(const SystemModel<double>& mdl, const TransferCoeffs<double>& t,
                               const MatrixXc& rho0, double duration, double dt,
                               const std::vector<Observable>& observables,
                               const TrajectoryOptions& opts) {
  check_inputs(mdl, rho0, observables);
  const long steps = step_count(duration, dt);
  const FilterKernel<double> kernel(mdl, t);
  auto rng = trajectory_rng(opts.seed, opts.index);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(t.var_z * dt);

  // Printed innovation normalization, tracked for arbitration only.
  const MatrixXc quad = mdl.L + mdl.L.adjoint();
  const double printed_drift = mdl.bath.n + 0.5 * mdl.bath.m.real();
  const double printed_sd = std::sqrt((2 * mdl.bath.n + 1 + mdl.bath.m.real()) * dt);

  Trajectory tr = make_trajectory(dt, steps, opts, FilterMode::kushner, observables.size());
  MatrixXc rho = rho0;
  auto record = [&](long j) {
    for (std::size_t k = 0; k < observables.size(); ++k) {
      tr.estimates[k][j] = expectation(rho, observables[k].matrix);
    }
    if (opts.snapshot_stride > 0 && j % opts.snapshot_stride == 0) tr.snapshots.push_back(rho);
  };
  record(0);
  for (long j = 0; j < steps; ++j) {
    const double di_draw = sd * normal(rng);
    const double dy = di_draw + t.var_z * kernel.gain_expectation(rho) * dt;
    // Innovation recomputed from the record through the filter's own drift.
    const double di = kernel.innovation(rho, dy, dt);
    const double z = di / sd;
    const double zp = (dy - printed_drift * expectation(rho, quad) * dt) / printed_sd;
    auto& st = tr.innovations;
    ++st.count;
    st.sum += z;
    st.sum_sq += z * z;
    st.printed_sum += zp;
    st.printed_sum_sq += zp * zp;
    if (opts.keep_record) {
      tr.dY.push_back(dy);
      tr.dI.push_back(di);
    }
    const double trace = kernel.kushner_update(rho, di, dt);
    if (!(trace > 0)) {
      throw StepFailure("trajectory " + std::to_string(opts.index) +
                            ": trace collapsed at t = " + std::to_string((j + 1) * dt) +
                            "; reduce dt",
                        (j + 1) * dt);
    }
    track_positivity(tr.positivity, rho, (j + 1) * dt);
    record(j + 1);
  }
  return tr;
}

Trajectory simulate_zakai_reference(const SystemModel<double>& mdl,
                                    const TransferCoeffs<double>& t, const MatrixXc& rho0,
                                    double duration, double dt,
                                    const std::vector<Observable>& observables,
                                    const TrajectoryOptions& opts) {
  check_inputs(mdl, rho0, observables);
  const long steps = step_count(duration, dt);
  const FilterKernel<double> kernel(mdl, t);
  auto rng = trajectory_rng(opts.seed, opts.index);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(t.var_z * dt);

  Trajectory tr = make_trajectory(dt, steps, opts, FilterMode::zakai, observables.size());
  MatrixXc s = rho0;
  auto record = [&](long j) {
    const double nrm = std::real(s.trace());
    tr.norm[j] = nrm;
    for (std::size_t k = 0; k < observables.size(); ++k) {
      const double v = expectation(s, observables[k].matrix);
      tr.estimates[k][j] = v;
      tr.normalized[k][j] = v / nrm;
    }
    if (opts.snapshot_stride > 0 && j % opts.snapshot_stride == 0) tr.snapshots.push_back(s);
  };
  record(0);
  for (long j = 0; j < steps; ++j) {
    const double dy = sd * normal(rng);
    if (opts.keep_record) tr.dY.push_back(dy);
    kernel.zakai_update(s, dy, dt);
    if (!(std::real(s.trace()) > 0)) {
      throw StepFailure("trajectory " + std::to_string(opts.index) +
                            ": unnormalized trace collapsed at t = " +
                            std::to_string((j + 1) * dt) + "; reduce dt",
                        (j + 1) * dt);
    }
    track_positivity(tr.positivity, s / std::real(s.trace()), (j + 1) * dt);
    record(j + 1);
  }
  return tr;
}

std::vector<double> zakai_ratio_along(const SystemModel<double>& mdl,
                                      const TransferCoeffs<double>& t, const MatrixXc& rho0,
                                      const std::vector<double>& dY, double dt,
                                      const MatrixXc& X) {
  const FilterKernel<double> kernel(mdl, t);
  MatrixXc s = rho0;
  std::vector<double> out;
  out.reserve(dY.size() + 1);
  out.push_back(expectation(s, X) / std::real(s.trace()));
  for (double dy : dY) {
    kernel.zakai_update(s, dy, dt);
    out.push_back(expectation(s, X) / std::real(s.trace()));
  }
  return out;
}

std::vector<std::vector<double>> master_equation_series(const SystemModel<double>& mdl,
                                                        const MatrixXc& rho0, double duration,
                                                        double dt, long stride,
                                                        const std::vector<Observable>& observables) {
  const long steps = step_count(duration, dt);
  const Generator<double> gen(mdl);
  std::vector<std::vector<double>> out(observables.size());
  MatrixXc rho = rho0;
  for (long j = 0; j <= steps; ++j) {
    if (j % stride == 0) {
      for (std::size_t k = 0; k < observables.size(); ++k) {
        out[k].push_back(expectation(rho, observables[k].matrix));
      }
    }
    if (j == steps) break;
    const MatrixXc k1 = gen(rho);
    const MatrixXc k2 = gen(rho + (dt / 2) * k1);
    const MatrixXc k3 = gen(rho + (dt / 2) * k2);
    const MatrixXc k4 = gen(rho + dt * k3);
    rho += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return out;
}

namespace {

struct Moments {
  std::vector<double> sum, sum_sq;
  void resize(std::size_t n) {
    sum.assign(n, 0.0);
    sum_sq.assign(n, 0.0);
  }
  void add(const Moments& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += o.sum[i];
      sum_sq[i] += o.sum_sq[i];
    }
  }
};

struct BlockResult {
  std::vector<Moments> obs;
  std::vector<Moments> normalized;
  InnovationStats innovations;
  PositivityStats positivity;
  std::vector<Trajectory> kept;

  void add(BlockResult&& o) {
    for (std::size_t k = 0; k < obs.size(); ++k) obs[k].add(o.obs[k]);
    for (std::size_t k = 0; k < normalized.size(); ++k) normalized[k].add(o.normalized[k]);
    innovations.merge(o.innovations);
    merge_positivity(positivity, o.positivity);
    for (auto& t : o.kept) kept.push_back(std::move(t));
  }
};

// Pairwise reduction in index order: deterministic for a fixed block count.
BlockResult reduce_blocks(std::vector<BlockResult>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  const std::size_t mid = lo + (hi - lo) / 2;
  BlockResult left = reduce_blocks(blocks, lo, mid);
  left.add(reduce_blocks(blocks, mid, hi));
  return left;
}

}  // namespace

EnsembleSummary run_ensemble(const SystemModel<double>& mdl, const TransferCoeffs<double>& t,
                             const MatrixXc& rho0, double duration, double dt,
                             const std::vector<Observable>& observables,
                             const EnsembleOptions& opts) {
  check_inputs(mdl, rho0, observables);
  if (opts.trajectories < 1) throw ValidationError("ensemble: need at least one trajectory");
  if (opts.record_stride < 1) throw ValidationError("ensemble: record stride must be >= 1");
  const long steps = step_count(duration, dt);
  const long stride = opts.record_stride;
  const std::size_t n_grid = std::size_t(steps / stride + 1);
  const std::size_t n_obs = observables.size();
  const bool zakai = opts.mode == FilterMode::zakai;

  const long n_blocks = (opts.trajectories + kBlockSize - 1) / kBlockSize;
  std::vector<BlockResult> blocks(static_cast<std::size_t>(n_blocks));

  auto run_block = [&](long b) {
    BlockResult res;
    res.obs.resize(n_obs);
    for (auto& m : res.obs) m.resize(n_grid);
    if (zakai) {
      res.normalized.resize(n_obs);
      for (auto& m : res.normalized) m.resize(n_grid);
    }
    const long first = b * kBlockSize;
    const long last = std::min(opts.trajectories, first + kBlockSize);
    for (long i = first; i < last; ++i) {
      TrajectoryOptions topts;
      topts.seed = opts.seed;
      topts.index = std::uint64_t(i);
      topts.snapshot_stride = opts.snapshot_stride;
      topts.keep_record = i < opts.keep_trajectories;
      Trajectory tr = zakai ? simulate_zakai_reference(mdl, t, rho0, duration, dt, observables, topts)
                            : simulate_trajectory(mdl, t, rho0, duration, dt, observables, topts);
      for (std::size_t k = 0; k < n_obs; ++k) {
        for (std::size_t g = 0; g < n_grid; ++g) {
          const double v = tr.estimates[k][g * stride];
          res.obs[k].sum[g] += v;
          res.obs[k].sum_sq[g] += v * v;
          if (zakai) {
            const double r = tr.normalized[k][g * stride];
            res.normalized[k].sum[g] += r;
            res.normalized[k].sum_sq[g] += r * r;
          }
        }
      }
      res.innovations.merge(tr.innovations);
      merge_positivity(res.positivity, tr.positivity);
      if (i < opts.keep_trajectories) res.kept.push_back(std::move(tr));
    }
    blocks[std::size_t(b)] = std::move(res);
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<long>(threads, n_blocks));
  if (threads <= 1) {
    for (long b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (long b = next++; b < n_blocks; b = next++) {
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n_blocks;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  BlockResult total = reduce_blocks(blocks, 0, blocks.size());

  EnsembleSummary out;
  out.mode = opts.mode;
  out.trajectories = opts.trajectories;
  out.dt = dt;
  out.record_stride = stride;
  for (std::size_t g = 0; g < n_grid; ++g) out.times.push_back(double(g) * double(stride) * dt);
  const auto reference = master_equation_series(mdl, rho0, duration, dt, stride, observables);
  const double M = double(opts.trajectories);
  auto finish = [&](const Moments& m, std::vector<double>& mean, std::vector<double>& se) {
    mean.resize(n_grid);
    se.resize(n_grid);
    for (std::size_t g = 0; g < n_grid; ++g) {
      mean[g] = m.sum[g] / M;
      const double var = M > 1 ? std::max(0.0, (m.sum_sq[g] - M * mean[g] * mean[g]) / (M - 1)) : 0.0;
      se[g] = std::sqrt(var / M);
    }
  };
  for (std::size_t k = 0; k < n_obs; ++k) {
    ObservableSummary s;
    s.name = observables[k].name;
    finish(total.obs[k], s.mean, s.stderr_);
    if (zakai) finish(total.normalized[k], s.normalized_mean, s.normalized_stderr);
    s.reference = reference[k];
    out.observables.push_back(std::move(s));
  }
  out.innovations = total.innovations;
  out.positivity = total.positivity;
  out.kept = std::move(total.kept);
  return out;
}

}  // namespace sqf
