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

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "sqfilter/system_model.hpp"
#include "test_support.hpp"

using namespace sqf;
using sqf::testing::cd;
using Eigen::MatrixXcd;

namespace {

MatrixXcd sigma_minus() {
  MatrixXcd s = MatrixXcd::Zero(2, 2);
  s(0, 1) = 1;  // |0><1| with |0> ground
  return s;
}
MatrixXcd sigma_z() {
  MatrixXcd s = MatrixXcd::Zero(2, 2);
  s(0, 0) = -1;
  s(1, 1) = 1;
  return s;
}
MatrixXcd projector(int d, int k) {
  MatrixXcd p = MatrixXcd::Zero(d, d);
  p(k, k) = 1;
  return p;
}

SystemModel<double> random_model(testing::Sampler& s, int d) {
  const double n = s.uniform(0, 3);
  const double a = s.uniform(0, std::sqrt(n * (n + 1)));
  return {s.hermitian(d), s.matrix(d), {n, std::polar(a, s.angle())}};
}

}  // namespace

TEST_CASE("Ito drift K examples") {
  SystemModel<double> zero{MatrixXcd::Zero(2, 2), MatrixXcd::Zero(2, 2), {0, 0}};
  CHECK(ito_drift_K(zero).norm() == 0.0);

  SystemModel<double> decay{MatrixXcd::Zero(2, 2), sigma_minus(), {0, 0}};
  CHECK((ito_drift_K(decay) + 0.5 * projector(2, 1)).norm() < 1e-15);

  testing::Sampler s(41);
  for (int d : {2, 3, 4}) {
    for (int i = 0; i < 20; ++i) {
      const auto mdl = random_model(s, d);
      CHECK(isometry_defect(mdl).cwiseAbs().maxCoeff() <= 1e-12 * (1 + mdl.L.squaredNorm() * 8));
    }
  }
}

TEST_CASE("Heisenberg generator examples") {
  testing::Sampler s(42);
  const auto mdl = random_model(s, 3);
  CHECK(lindblad_heisenberg(mdl, MatrixXcd(MatrixXcd::Identity(3, 3))).norm() < 1e-12);

  // Vacuum, H = 0: L(X) = L*XL - 1/2{L*L, X}.
  SystemModel<double> vac{MatrixXcd::Zero(3, 3), s.matrix(3), {0, 0}};
  const MatrixXcd X = s.hermitian(3);
  const MatrixXcd& L = vac.L;
  const MatrixXcd expect = L.adjoint() * X * L - 0.5 * (L.adjoint() * L * X + X * L.adjoint() * L);
  CHECK((lindblad_heisenberg(vac, X) - expect).norm() < 1e-12);
}

TEST_CASE("Schrodinger generator is the adjoint of the Heisenberg generator") {
  testing::Sampler s(43);
  for (int d : {2, 3}) {
    for (int i = 0; i < 50; ++i) {
      const auto mdl = random_model(s, d);
      const MatrixXcd X = s.matrix(d);
      const MatrixXcd rho = s.density(d);
      const cd lhs = (lindblad_heisenberg(mdl, X) * rho).trace();
      const cd rhs = (X * lindblad_schrodinger(mdl, rho)).trace();
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(lhs)));

      const MatrixXcd out = lindblad_schrodinger(mdl, rho);
      CHECK(std::abs(out.trace()) <= 1e-10 * (1 + out.norm()));
      CHECK(hermitian_residual(out) <= 1e-10 * (1 + out.norm()));
    }
  }
}

TEST_CASE("Schrodinger generator examples") {
  // Normal L with the maximally mixed state is stationary for thermal noise.
  MatrixXcd L = MatrixXcd::Zero(3, 3);
  L.diagonal() << cd(1, 0), cd(0, 2), cd(-0.5, 0.3);
  SystemModel<double> normal{MatrixXcd::Zero(3, 3), L, {0.7, 0}};
  CHECK(lindblad_schrodinger(normal, MatrixXcd(MatrixXcd::Identity(3, 3) / 3.0)).norm() < 1e-14);

  SystemModel<double> decay{MatrixXcd::Zero(2, 2), sigma_minus(), {0, 0}};
  const MatrixXcd out = lindblad_schrodinger(decay, projector(2, 1));
  CHECK((out - (projector(2, 0) - projector(2, 1))).norm() < 1e-15);
}

TEST_CASE("superoperator reproduces the generator") {
  testing::Sampler s(44);
  const auto mdl = random_model(s, 3);
  const auto S = superoperator(mdl);
  const MatrixXcd rho = s.density(3);
  const Eigen::VectorXcd v = S * rho.reshaped();
  CHECK((v.reshaped(3, 3) - lindblad_schrodinger(mdl, rho)).norm() < 1e-12);
}

TEST_CASE("master equation matches the exact exponential") {
  testing::Sampler s(45);
  // L = 0: pure unitary evolution.
  const MatrixXcd H = s.hermitian(3);
  SystemModel<double> unitary{H, MatrixXcd::Zero(3, 3), {0, 0}};
  const MatrixXcd rho0 = s.density(3);
  const MatrixXcd U = (cd(0, -1) * H).exp();
  const MatrixXcd exact = U * rho0 * U.adjoint();
  CHECK((master_equation_evolve(unitary, rho0, 1.0, 1e-3) - exact).cwiseAbs().maxCoeff() < 1e-10);

  // Spontaneous emission: excited population e^{-T}.
  SystemModel<double> decay{MatrixXcd::Zero(2, 2), sigma_minus(), {0, 0}};
  const MatrixXcd rho = master_equation_evolve(decay, projector(2, 1), 1.0, 1e-3);
  CHECK(std::abs(rho(1, 1).real() - std::exp(-1.0)) < 1e-10);

  // Generic model against the superoperator exponential.
  const auto mdl = random_model(s, 2);
  const auto S = superoperator(mdl);
  const Eigen::VectorXcd v = (S * 0.5).exp() * rho0.topLeftCorner(2, 2).reshaped() /
                             rho0.topLeftCorner(2, 2).trace();
  const MatrixXcd start = rho0.topLeftCorner(2, 2) / rho0.topLeftCorner(2, 2).trace();
  const auto checked = master_equation_evolve_checked(mdl, start, 0.5, 1e-3);
  CHECK((checked.rho - v.reshaped(2, 2)).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(checked.step_halving_error < 1e-9);
}

TEST_CASE("squeezed qubit relaxes to the stationary state") {
  SystemModel<double> mdl{0.5 * sigma_z(), sigma_minus(), {1.0, 0.8}};
  const MatrixXcd rho_ss = stationary_state(mdl);
  CHECK_NOTHROW(validate_state(rho_ss, 2));
  CHECK(lindblad_schrodinger(mdl, rho_ss).norm() < 1e-12);
  const MatrixXcd rho = master_equation_evolve(mdl, projector(2, 0), 50.0, 1e-2);
  CHECK((rho - rho_ss).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("damped oscillator reaches the bath moments") {
  // Truncated oscillator with L = a: stationary <a*a> = n and <aa> = m, so
  // the system inherits the bath correlations dB*dB = n dt, dB dB = m dt.
  // Truncation error is negligible at these occupations.
  const int levels = 18;
  MatrixXcd a = MatrixXcd::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(double(k));
  const cd m = std::polar(0.3, 0.9);
  SystemModel<double> mdl{MatrixXcd::Zero(levels, levels), a, {0.2, m}};
  const MatrixXcd rho = stationary_state(mdl);
  CHECK(std::abs((a.adjoint() * a * rho).trace() - 0.2) < 1e-6);
  CHECK(std::abs((a * a * rho).trace() - m) < 1e-6);
}

TEST_CASE("shape, parameter and state errors") {
  SystemModel<double> bad{MatrixXcd::Zero(2, 2), MatrixXcd::Zero(3, 3), {0, 0}};
  CHECK_THROWS_AS(validate(bad), ShapeError);
  SystemModel<double> nonherm{sigma_minus(), sigma_minus(), {0, 0}};
  CHECK_THROWS_AS(validate(nonherm), ValidationError);
  SystemModel<double> badbath{sigma_z(), sigma_minus(), {1, 2}};
  CHECK_THROWS_AS(validate(badbath), ValidationError);

  SystemModel<double> ok{sigma_z(), sigma_minus(), {0, 0}};
  CHECK_THROWS_AS(master_equation_evolve(ok, MatrixXcd(MatrixXcd::Identity(2, 2)), 1.0, 1e-3),
                  ValidationError);
  CHECK_THROWS_AS(master_equation_evolve(ok, projector(3, 0), 1.0, 1e-3), ShapeError);
  CHECK_THROWS_AS(step_count(1.0, 0.3), ValidationError);
  CHECK(step_count(1.0, 1e-3) == 1000);
}
