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

#include "sqfilter/vacuum_homodyne.hpp"

#include <complex>
#include <utility>

namespace sqf::vacuum {

HomodyneFilter::HomodyneFilter(Eigen::MatrixXcd H, Eigen::MatrixXcd L)
    : H_(std::move(H)), L_(std::move(L)) {
  Ld_ = L_.adjoint();
  LdL_ = Ld_ * L_;
}

Eigen::MatrixXcd HomodyneFilter::lindblad(const Eigen::MatrixXcd& rho) const {
  const std::complex<double> i(0.0, 1.0);
  return -i * (H_ * rho - rho * H_) + L_ * rho * Ld_ - 0.5 * (LdL_ * rho + rho * LdL_);
}

void HomodyneFilter::step(Eigen::MatrixXcd& rho, double dI, double dt) const {
  const Eigen::MatrixXcd k1 = lindblad(rho);
  const Eigen::MatrixXcd k2 = lindblad(rho + 0.5 * dt * k1);
  const Eigen::MatrixXcd k3 = lindblad(rho + 0.5 * dt * k2);
  const Eigen::MatrixXcd k4 = lindblad(rho + dt * k3);
  Eigen::MatrixXcd next = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  const Eigen::MatrixXcd Lr = L_ * next;
  const Eigen::MatrixXcd rLd = next * Ld_;
  const double mean = (Lr + rLd).trace().real();
  next += (Lr + rLd - mean * next) * dI;

  next = 0.5 * (next + next.adjoint()).eval();
  rho = next / next.trace().real();
}

std::vector<Eigen::MatrixXcd> HomodyneFilter::run(const Eigen::MatrixXcd& rho0,
                                                  const std::vector<double>& dI,
                                                  double dt) const {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(dI.size() + 1);
  Eigen::MatrixXcd rho = rho0;
  out.push_back(rho);
  for (double d : dI) {
    step(rho, d, dt);
    out.push_back(rho);
  }
  return out;
}

}  // namespace sqf::vacuum
