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

#include "sqfilter/quadrature.hpp"
#include "test_support.hpp"

using namespace sqf;
using sqf::testing::cd;
using sqf::testing::kPi;

namespace {

// Oracle: express dB|0> and dB*|0> in terms of dZ|0>, dZ'|0> by least squares
// on explicit Fock-space vectors.
struct FockTransfer {
  cd alpha, beta, gamma, delta;
  double var_z, var_zp, cross;
};

FockTransfer fock_transfer(const BalancedCoeffs<double>& b, double phase) {
  testing::FockPair f;
  const auto c = lift_balanced(b);
  const Eigen::MatrixXcd B = f.mode(c[0]), Bp = f.mode(c[1]);
  const Eigen::MatrixXcd Bd = B.adjoint(), Bpd = Bp.adjoint();
  const Eigen::MatrixXcd Z = B + Bd;
  const Eigen::MatrixXcd Zp = std::polar(1.0, phase) * Bp + std::polar(1.0, -phase) * Bpd;
  const Eigen::VectorXcd vac = Eigen::VectorXcd::Unit(B.rows(), 0);
  Eigen::MatrixXcd basis(B.rows(), 2);
  basis.col(0) = Z * vac;
  basis.col(1) = Zp * vac;
  const auto qr = basis.colPivHouseholderQr();
  const Eigen::VectorXcd ab = qr.solve(Eigen::VectorXcd(B * vac));
  const Eigen::VectorXcd gd = qr.solve(Eigen::VectorXcd(Bd * vac));
  return {ab(0), ab(1), gd(0), gd(1), f.vac(Z, Z).real(), f.vac(Zp, Zp).real(), f.vac(Z, Zp).real()};
}

}  // namespace

TEST_CASE("independent phase examples") {
  for (double n : {0.5, 1.0, 4.0}) {
    CHECK(independent_phase(cd(std::sqrt(n * (n + 1))), 0.0) == doctest::Approx(kPi / 2));
  }
  CHECK(independent_phase(cd(0, 0.7), 0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(independent_phase(cd(0), 0.0), DegeneratePhaseError);
  const auto b = balanced_from_bv(1.0, 0.8, 1.2);
  const double lam = independent_phase(b);
  CHECK(std::abs(cross_variation(b, lam)) <= 1e-12);
  CHECK(lam > -kPi / 2);
  CHECK(lam <= kPi / 2);
}

TEST_CASE("cross variation examples and Fock oracle") {
  const BalancedCoeffs<double> vac{1, 0, 0, 0};
  for (double lam : {0.0, 0.4, 2.0}) CHECK(cross_variation(vac, lam) == 0.0);
  CHECK(std::abs(cross_variation(balanced_from_hkkr(2.0, cd(0)), kPi / 2)) < 1e-12);
  CHECK(cross_variation(balanced_from_hkkr(1.0, cd(0)), 0.0) == doctest::Approx(2 * std::sqrt(2.0)));

  testing::Sampler s(31);
  for (int i = 0; i < 40; ++i) {
    const auto [r, rho, theta] = s.bv();
    const auto b = balanced_from_bv(r, rho, theta);
    const double lam = s.angle();
    const auto ft = fock_transfer(b, lam);
    CHECK(std::abs(cross_variation(b, lam) - ft.cross) < 1e-9 * std::cosh(r) * std::cosh(rho));
  }
}

TEST_CASE("independent phase decorrelates over random representations") {
  testing::Sampler s(32);
  for (int i = 0; i < 1000; ++i) {
    const auto [r, rho, theta] = s.bv();
    const auto b = balanced_from_bv(r, rho, theta);
    const double lam = independent_phase(b);
    const double scale = std::cosh(r) * std::cosh(rho);
    CHECK(std::abs(cross_variation(b, lam)) <= 1e-12 * scale);
  }
}

TEST_CASE("transfer matrix examples") {
  for (double lam : {0.0, 0.3, -1.2}) {
    const auto t = transfer_matrix(BalancedCoeffs<double>{1, 0, 0, 0}, lam);
    CHECK(std::abs(t.alpha) < 1e-15);
    CHECK(std::abs(t.beta) < 1e-15);
    CHECK(std::abs(t.gamma - 1.0) < 1e-15);
    CHECK(std::abs(t.delta) < 1e-15);
  }
  for (double n : {0.0, 1.0, 5.0}) {
    const auto t = transfer_matrix(balanced_from_hkkr(n, cd(0)), kPi / 2);
    CHECK(std::abs(t.alpha - n / (2 * n + 1)) < 1e-12);
    CHECK(std::abs(t.gamma - (n + 1) / (2 * n + 1)) < 1e-12);
  }
}

TEST_CASE("transfer identities hold for every phase") {
  testing::Sampler s(33);
  for (int i = 0; i < 500; ++i) {
    const auto [r, rho, theta] = s.bv();
    const auto b = balanced_from_bv(r, rho, theta);
    const double lam = s.angle();
    TransferCoeffs<double> t;
    try {
      t = transfer_matrix(b, lam);
    } catch (const SingularTransferError&) {
      continue;
    }
    CHECK(std::abs(t.alpha + t.gamma - 1.0) <= 1e-12);
    CHECK(std::abs(t.beta + t.delta) <= 1e-12);
    const cd xc = std::conj(b.x), zc = std::conj(b.z);
    // (w x* - y z*)/D is beta; delta is its negative.
    CHECK(std::abs(t.beta - (b.w * xc - b.y * zc) / t.determinant) <= 1e-12);
    CHECK(std::abs(t.delta + (b.w * xc - b.y * zc) / t.determinant) <= 1e-12);
    const cd e = std::polar(1.0, lam);
    const cd det = e * (b.y * b.y + b.y * xc - b.w * b.w - b.w * zc) + (xc * xc + b.y * xc - b.w * zc - zc * zc) / e;
    CHECK(std::abs(det - t.determinant) <= 1e-10 * std::abs(det) + 1e-12);
  }
}

TEST_CASE("transfer matrix agrees with the Fock-space oracle") {
  testing::Sampler s(34);
  for (int i = 0; i < 40; ++i) {
    const auto [r, rho, theta] = s.bv();
    const auto b = balanced_from_bv(r, rho, theta);
    const double lam = i % 2 ? independent_phase(b) : s.angle();
    const auto t = transfer_matrix(b, lam);
    const auto ft = fock_transfer(b, lam);
    const double tol = 1e-8 * std::cosh(r) * std::cosh(rho);
    CHECK(std::abs(t.alpha - ft.alpha) < tol);
    CHECK(std::abs(t.beta - ft.beta) < tol);
    CHECK(std::abs(t.gamma - ft.gamma) < tol);
    CHECK(std::abs(t.delta - ft.delta) < tol);
    CHECK(std::abs(t.var_z - ft.var_z) < tol);
    CHECK(std::abs(t.var_z_prime - ft.var_zp) < tol);
  }
}

TEST_CASE("moment identities at the independent phase") {
  const auto vac = transfer_matrix(BalancedCoeffs<double>{1, 0, 0, 0}, 0.0);
  CHECK(verify_transfer_identities(vac, SqueezingParams<double>{0, 0}).max() < 1e-15);

  for (double n : {0.5, 1.0, 3.0}) {
    const auto t = transfer_matrix(balanced_from_hkkr(n, cd(0)), kPi / 2);
    const auto rep = verify_transfer_identities(t, SqueezingParams<double>{n, 0});
    CHECK(rep.max() < 1e-12);
    // n^2/(2n+1) + |beta|^2 (2n+1) = n
    CHECK(std::abs(n * n / (2 * n + 1) + std::norm(t.beta) * (2 * n + 1) - n) < 1e-12);
  }

  const auto b = balanced_from_bv(1.0, 0.8, 1.2);
  const auto t = transfer_matrix(b, independent_phase(b));
  CHECK(verify_transfer_identities(t, balanced_marginal(b)).max() <= 1e-10);

  testing::Sampler s(35);
  for (int i = 0; i < 1000; ++i) {
    const auto q = s.sub_maximal();
    const auto bh = balanced_from_hkkr(q.n, q.m);
    const auto th = transfer_at_independent_phase(bh);
    const auto m = reconstruct_moments(th);
    const double scale = 1 + q.n;
    CHECK(std::abs(m.anti_normal - (q.n + 1)) <= 1e-10 * scale);
    CHECK(std::abs(m.normal - q.n) <= 1e-10 * scale);
    CHECK(std::abs(m.squeeze - q.m) <= 1e-10 * scale);
  }
}

TEST_CASE("the printed identity weights fail where Re m != 0") {
  const auto b = balanced_from_bv(1.0, 0.8, 0.3);
  const auto p = balanced_marginal(b);
  REQUIRE(std::abs(p.m.real()) > 0.1);
  const auto t = transfer_at_independent_phase(b);
  CHECK(verify_transfer_identities(t, p).max() < 1e-10);
  CHECK(verify_transfer_identities_printed_weights(t, p).max() > 1e-3);
}

TEST_CASE("closed-form alpha, gamma") {
  for (double n : {0.0, 1.0, 2.0}) {
    const auto cf = closed_form_alpha_gamma(SqueezingParams<double>{n, 0});
    CHECK(std::abs(cf.alpha_printed - n / (2 * n + 1)) < 1e-15);
    CHECK(cf.printed_consistent);
    CHECK(cf.moment_consistent);
  }
  const auto vac = closed_form_alpha_gamma(SqueezingParams<double>{0, 0});
  CHECK(std::abs(vac.alpha_printed) < 1e-15);
  CHECK(std::abs(vac.gamma_printed - 1.0) < 1e-15);

  // Real squeezing separates the two candidate closed forms.
  const auto cf = closed_form_alpha_gamma(SqueezingParams<double>{1, 0.5});
  CHECK_FALSE(cf.printed_consistent);
  CHECK(cf.moment_consistent);
  CHECK(std::abs(cf.alpha_moment - 0.375) < 1e-12);
  CHECK(std::abs(cf.alpha_printed - 1.25 / 3.5) < 1e-12);

  // Purely imaginary squeezing: both forms agree.
  const auto ci = closed_form_alpha_gamma(SqueezingParams<double>{1, cd(0, 0.7)});
  CHECK(ci.printed_consistent);
  CHECK(ci.moment_consistent);
}

TEST_CASE("transfer coefficients are independent of the representation") {
  testing::Sampler s(36);
  for (int i = 0; i < 200; ++i) {
    const auto q = s.sub_maximal();
    const auto bv = bv_params_for(q);
    const auto t1 = transfer_at_independent_phase(balanced_from_bv(bv.r, bv.rho, bv.theta));
    const auto t2 = transfer_at_independent_phase(balanced_from_hkkr(q.n, q.m));
    CHECK(std::abs(t1.alpha - t2.alpha) < 1e-9 * (1 + q.n));
    CHECK(std::abs(t1.alpha - (q.n + q.m) / (2 * q.n + 1 + 2 * q.m.real())) < 1e-9 * (1 + q.n));
  }
}

TEST_CASE("singular transfer is reported with its determinant") {
  // x* + y = 0 and z* + w = 0 make the first row of M vanish.
  const BalancedCoeffs<double> b{cd(1), cd(-1), cd(0), cd(0)};
  try {
    transfer_matrix(b, 0.3);
    FAIL("expected SingularTransferError");
  } catch (const SingularTransferError& e) {
    CHECK(std::abs(e.determinant) < 1e-15);
  }
  CHECK(singular_transfer_threshold(BalancedCoeffs<double>{1, 0, 0, 0}) == doctest::Approx(4e-12));
}
