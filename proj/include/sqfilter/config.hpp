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

// Run configuration: a single JSON document with "bath", "system", "run",
// "output" and (optionally) "lambda_curve" sections. Complex numbers are
// [re, im] pairs; matrices are row-major nested arrays of such pairs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqfilter/simulation.hpp"

namespace sqf {

/// Malformed or inconsistent configuration. `field` is a dotted path such as
/// "run.dt" (empty for syntax errors, whose message carries line and column).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class BathKind { nm, bv, hkkr };
enum class RunMode { kushner, zakai, both };

const char* to_string(BathKind kind);
const char* to_string(RunMode mode);

struct BathConfig {
  BathKind kind = BathKind::nm;
  double n = 0;     // nm, hkkr
  cdouble m{0, 0};  // nm, hkkr
  double r = 0, rho = 0, theta = 0;  // bv
};

struct ObservableSpec {
  std::string name;
  bool named = true;  // built-in shorthand (sx, sy, sz, sm, sp); otherwise `matrix`
  MatrixXc matrix;
};

struct RunSection {
  double duration = 1.0;
  double dt = 1e-3;
  long trajectories = 10000;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::kushner;
  std::vector<ObservableSpec> observables;
  long record_stride = 1;
  long snapshot_stride = 0;
  unsigned threads = 0;
  std::string initial_state = "ground";  // "ground", "excited", "mixed" or "matrix"
  MatrixXc initial_matrix;               // when initial_state == "matrix"
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  long trajectory_csv_limit = 10;  // per-trajectory CSV files written by simulate
};

struct LambdaSection {
  std::vector<double> taus{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int theta_points = 360;
  double r = 1.0;
};

struct RunConfig {
  BathConfig bath;
  long d = 2;
  MatrixXc H, L;
  RunSection run;
  OutputSection output;
  LambdaSection lambda;
};

/// Squeezed qubit L = sigma_-, H = sigma_z / 2, n = 1, m = 0.8 e^{i pi/4}.
RunConfig default_config();

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& cfg);

/// Field-by-field equality, exact on all numbers.
bool same_config(const RunConfig& a, const RunConfig& b);

SqueezingParams<double> bath_params(const RunConfig& cfg);
BalancedCoeffs<double> balanced_representation(const RunConfig& cfg);
SystemModel<double> system_model(const RunConfig& cfg);
MatrixXc initial_state(const RunConfig& cfg);

/// Named shorthands for d = 2 with basis (|0> ground, |1> excited):
/// sz = diag(-1, 1), sm = |0><1|, sp = |1><0|.
MatrixXc named_observable(const std::string& name);

/// Observables to evaluate. A non-Hermitian X contributes two real columns,
/// "<name>.re" = (X + X*)/2 and "<name>.im" = (X - X*)/(2i).
std::vector<Observable> observables(const RunConfig& cfg);

}  // namespace sqf
