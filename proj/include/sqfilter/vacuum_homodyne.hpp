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

// Stand-alone homodyne filter for a vacuum input field. It is deliberately
// written without the library's generator, transfer or filter code so that it
// can serve as an independent reference.

#include <vector>

#include <Eigen/Dense>

namespace sqf::vacuum {

/// drho = (-i[H,rho] + L rho L* - 1/2{L*L, rho}) dt
///        + (L rho + rho L* - tr((L + L*) rho) rho) dI
///
/// The deterministic part of each step is integrated by RK4 and followed by the
/// innovation kick evaluated at the propagated state.
class HomodyneFilter {
 public:
  HomodyneFilter(Eigen::MatrixXcd H, Eigen::MatrixXcd L);

  /// Advances `rho` by one step of length dt with innovation increment dI.
  void step(Eigen::MatrixXcd& rho, double dI, double dt) const;

  /// Runs along the whole path; returns the state after every step
  /// (element 0 is rho0).
  std::vector<Eigen::MatrixXcd> run(const Eigen::MatrixXcd& rho0, const std::vector<double>& dI,
                                    double dt) const;

 private:
  Eigen::MatrixXcd lindblad(const Eigen::MatrixXcd& rho) const;

  Eigen::MatrixXcd H_, L_, Ld_, LdL_;
};

}  // namespace sqf::vacuum
