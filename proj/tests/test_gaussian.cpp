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

#include "sqfilter/gaussian.hpp"
#include "test_support.hpp"

using namespace sqf;
using sqf::testing::cd;
using sqf::testing::kPi;

TEST_CASE("covariance matrix examples") {
  const auto vac = covariance_matrix(SqueezingParams<double>{0, 0});
  CHECK(vac(0, 0) == cd(1));
  CHECK(vac(1, 1) == cd(0));
  CHECK(vac(0, 1) == cd(0));

  const auto th = covariance_matrix(SqueezingParams<double>{1, 0});
  CHECK(th(0, 0) == cd(2));
  CHECK(th(1, 1) == cd(1));

  const auto mx = covariance_matrix(SqueezingParams<double>{1, std::polar(std::sqrt(2.0), kPi / 3)});
  CHECK(hermitian_residual(mx) == 0.0);
  CHECK(std::abs(mx.determinant()) < 1e-12);
}

TEST_CASE("invalid parameters name the violated inequality") {
  CHECK_THROWS_WITH_AS(covariance_matrix(SqueezingParams<double>{-0.5, 0}),
                       doctest::Contains("n >= 0"), ValidationError);
  CHECK_THROWS_WITH_AS(covariance_matrix(SqueezingParams<double>{1, 2}),
                       doctest::Contains("n(n+1) - |m|^2 >= 0"), ValidationError);
}

TEST_CASE("covariance eigenvalues") {
  auto [a, b] = covariance_eigenvalues(SqueezingParams<double>{0, 0});
  CHECK(a == doctest::Approx(1.0));
  CHECK(b == doctest::Approx(0.0));
  std::tie(a, b) = covariance_eigenvalues(SqueezingParams<double>{1, 0});
  CHECK(a == doctest::Approx(2.0));
  CHECK(b == doctest::Approx(1.0));

  // Independent Hermitian eigensolver.
  const SqueezingParams<double> p{2, cd(1, 1)};
  Eigen::SelfAdjointEigenSolver<Matrix2c> es(covariance_matrix(p));
  std::tie(a, b) = covariance_eigenvalues(p);
  CHECK(std::abs(a - es.eigenvalues()(1)) < 1e-12);
  CHECK(std::abs(b - es.eigenvalues()(0)) < 1e-12);
}

TEST_CASE("covariance properties over random valid parameters") {
  testing::Sampler s(11);
  for (int i = 0; i < 500; ++i) {
    const auto p = s.sub_maximal();
    const auto c = covariance_matrix(p);
    CHECK(hermitian_residual(c) == 0.0);
    CHECK(std::abs(c.trace() - cd(2 * p.n + 1)) < 1e-12);
    CHECK(std::abs(c.determinant() - cd(p.deficit())) < 1e-10 * (1 + p.n * p.n));
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(c);
    const auto [hi, lo] = covariance_eigenvalues(p);
    CHECK(std::abs(hi - es.eigenvalues()(1)) < 1e-12 * (1 + p.n));
    CHECK(std::abs(lo - es.eigenvalues()(0)) < 1e-12 * (1 + p.n));
    CHECK(std::abs(hi + lo - (2 * p.n + 1)) < 1e-12 * (1 + p.n));
  }
}

TEST_CASE("classification") {
  CHECK(classify(SqueezingParams<double>{3, 0}) == SqueezingClass::thermal);
  CHECK(classify(SqueezingParams<double>{1, std::sqrt(2.0)}) == SqueezingClass::maximal);
  CHECK(classify(SqueezingParams<double>{1, 1}) == SqueezingClass::sub_maximal);
  CHECK(classify(SqueezingParams<double>{1, 1.5}) == SqueezingClass::invalid);
  CHECK(classify(SqueezingParams<double>{-1, 0}) == SqueezingClass::invalid);

  testing::Sampler s(5);
  for (int i = 0; i < 200; ++i) {
    const double n = s.uniform(0.01, 5);
    const SqueezingParams<double> p{n, std::polar(std::sqrt(n * (n + 1)), s.angle())};
    REQUIRE(classify(p) == SqueezingClass::maximal);
    CHECK(std::abs(covariance_matrix(p).determinant()) < 1e-10 * (1 + n * n));
  }
}

TEST_CASE("characteristic function") {
  CHECK(characteristic_value(SqueezingParams<double>{2, cd(0.3, -1)}, cd(0)) == 1.0);
  CHECK(characteristic_value(SqueezingParams<double>{0, 0}, cd(1)) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(characteristic_value(SqueezingParams<double>{1, cd(0, 1)}, cd(1)) ==
        doctest::Approx(std::exp(-1.5)).epsilon(1e-15));
}

TEST_CASE("characteristic function matches a truncated Fock-space expectation") {
  // Maximally squeezed b = e^{i t/2}(sqrt(n+1) a + sqrt(n) a*) on the vacuum.
  const int levels = 90;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(double(k));
  for (auto [n, theta, u] : {std::tuple{0.3, 0.7, cd(0.4, 0.2)}, std::tuple{0.8, 2.5, cd(-0.3, 0.5)}}) {
    const cd ph = std::polar(1.0, theta / 2);
    const Eigen::MatrixXcd b = ph * std::sqrt(n + 1) * a + ph * std::sqrt(n) * a.adjoint();
    const Eigen::MatrixXcd gen = cd(0, 1) * (std::conj(u) * b + u * Eigen::MatrixXcd(b.adjoint()));
    const Eigen::MatrixXcd e = gen.exp();
    const SqueezingParams<double> p{n, std::polar(std::sqrt(n * (n + 1)), theta)};
    CHECK(std::abs(e(0, 0) - characteristic_value(p, u)) < 1e-9);
  }
}

TEST_CASE("quadrature variance") {
  CHECK(quadrature_variance(SqueezingParams<double>{0, 0}, 1.234) == doctest::Approx(1.0));
  CHECK(quadrature_variance(SqueezingParams<double>{1, 0}, kPi / 2) == doctest::Approx(3.0));

  // Gaussian-moment oracle: <(e^{il} b + e^{-il} b*)^2> on a truncated Fock pair.
  testing::Sampler s(21);
  testing::FockPair fock;
  for (int i = 0; i < 50; ++i) {
    const auto bv = s.bv();
    const auto c = lift_balanced(balanced_from_bv(bv.r, bv.rho, bv.theta));
    const auto p = marginals(c).first;
    const double lam = s.angle();
    const Eigen::MatrixXcd b = fock.mode(c[0]);
    const Eigen::MatrixXcd q = std::polar(1.0, lam) * b + std::polar(1.0, -lam) * Eigen::MatrixXcd(b.adjoint());
    const double oracle = fock.vac(q, q).real();
    CHECK(std::abs(quadrature_variance(p, lam) - oracle) < 1e-9 * (1 + oracle));
  }
}

TEST_CASE("quadrature variance is periodic and minimized at 2l = pi - arg m") {
  testing::Sampler s(3);
  for (int i = 0; i < 200; ++i) {
    const auto p = s.sub_maximal();
    const double lam = s.angle();
    CHECK(std::abs(quadrature_variance(p, lam) - quadrature_variance(p, lam + kPi)) < 1e-12 * (1 + p.n));
    if (std::abs(p.m) < 1e-6) continue;
    const double best = (kPi - std::arg(p.m)) / 2;
    const double vmin = quadrature_variance(p, best);
    CHECK(std::abs(vmin - (2 * p.n + 1 - 2 * std::abs(p.m))) < 1e-10 * (1 + p.n));
    CHECK(vmin > 0);
    for (int k = 0; k < 16; ++k) CHECK(quadrature_variance(p, s.angle()) >= vmin - 1e-12);
  }
}
