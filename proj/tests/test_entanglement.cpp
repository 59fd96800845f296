// Copyright 2026 The qnd-becs Authors
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

#include "qnd/entanglement.hpp"
#include "qnd/error.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <numbers>
#include <random>

using namespace qnd;
using cplx = std::complex<double>;

namespace {

SystemParams params(int n, double tau, int nc, int nd, double chi) {
  SystemParams p;
  p.n_atoms = n;
  p.tau = tau;
  p.n_c = nc;
  p.n_d = nd;
  p.chi_bar = chi;
  return p;
}

AtomDensityMatrix fock_pair(int n, int k) {
  const int d = n + 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d * d, d * d);
  m(k * d + k, k * d + k) = 1.0;
  return AtomDensityMatrix(n, m);
}

}  // namespace

TEST_CASE("partial transpose is an involution that preserves trace") {
  std::mt19937 rng(5);
  const Eigen::MatrixXcd r = testing::random_density(25, rng);
  const AtomDensityMatrix rho(4, r);
  const AtomDensityMatrix pt = partial_transpose(rho);
  CHECK(std::abs(pt.trace() - rho.trace()) < 1e-14);
  CHECK(pt(1, 3, 2, 0) == rho(1, 0, 2, 3));
  CHECK(testing::max_abs_diff(partial_transpose(pt).matrix(), r) == 0.0);
}

TEST_CASE("product states have zero log-negativity") {
  std::mt19937 rng(17);
  for (int n = 1; n <= 8; ++n) {
    const AtomDensityMatrix rho =
        testing::product_state(testing::random_density(n + 1, rng), testing::random_density(n + 1, rng));
    CAPTURE(n);
    CHECK(log_negativity(rho).value < 1e-10);
  }
}

TEST_CASE("EPR state reaches the maximum") {
  for (int n : {1, 4, 9}) {
    const AtomDensityMatrix rho = AtomDensityMatrix::from_pure(epr_state(n));
    const AtomDensityMatrix pt = partial_transpose(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt.matrix(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-1.0 / (n + 1)).epsilon(1e-12));
    const LogNegativity e = log_negativity(rho);
    CHECK(e.value == doctest::Approx(std::log2(n + 1.0)).epsilon(1e-12));
    CHECK(e.normalized == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(epr_fidelity(rho) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pure-state log-negativity agrees with the Schmidt coefficients") {
  for (double tau : {0.02, 0.05, 0.1, 0.3, 0.7}) {
    for (auto [nc, nd] : {std::pair{50, 50}, {40, 60}, {30, 70}}) {
      const SystemParams p = params(12, tau, nc, nd, 0.0);
      const StateAmplitudes psi = build_state(p);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi.amplitudes);
      const double s = svd.singularValues().sum();
      const LogNegativity e = log_negativity(apply_photon_loss(p));
      CAPTURE(tau);
      CAPTURE(nc);
      CHECK(e.value == doctest::Approx(2.0 * std::log2(s)).epsilon(1e-9));
      CHECK(e.value <= std::log2(13.0) + 1e-12);
    }
  }
}

TEST_CASE("unentangled reference values") {
  const AtomDensityMatrix rho = apply_photon_loss(params(20, 0.0, 50, 50, 0.0));
  CHECK(log_negativity(rho).value < 1e-10);
  CHECK(epr_fidelity(rho) == doctest::Approx(1.0 / 21.0).epsilon(1e-12));
  CHECK(criterion_ht(rho) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(criterion_dgcz(rho).has_value());
  CHECK(*criterion_dgcz(rho) == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(criterion_steering(rho).has_value());
  CHECK(*criterion_steering(rho) == doctest::Approx(4.0).epsilon(1e-12));
  REQUIRE(criterion_wineland(rho).has_value());
  CHECK(*criterion_wineland(rho) == doctest::Approx(2.0).epsilon(1e-12));

  const CriterionReport r = evaluate_criteria(rho, params(20, 0.0, 50, 50, 0.0));
  CHECK(r.c_ent == doctest::Approx(1.0));
  CHECK(*r.xi_squared_half == doctest::Approx(1.0));
  CHECK(*r.mean_theta == doctest::Approx(std::numbers::pi / 2));
  CHECK(*r.mean_phi == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimal squeezing angle matches a dense scan") {
  for (double chi : {0.0, 0.2}) {
    for (auto [nc, nd] : {std::pair{50, 50}, {45, 55}}) {
      const int n = 6;
      const AtomDensityMatrix rho = apply_photon_loss(params(n, 0.07, nc, nd, chi));
      const int d = n + 1;
      const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);
      Eigen::MatrixXcd s[3];
      const SpinAxis axes[3] = {SpinAxis::X, SpinAxis::Y, SpinAxis::Z};
      Eigen::Vector3d mean;
      for (int a = 0; a < 3; ++a) {
        const Eigen::MatrixXcd one = spin_matrix(axes[a], n);
        s[a] = Eigen::kroneckerProduct(one, id).eval() + Eigen::kroneckerProduct(id, one).eval();
        mean(a) = (s[a] * rho.matrix()).trace().real();
      }
      const double theta = std::acos(mean(2) / mean.norm());
      const double phi = std::atan2(mean(1), mean(0));
      const Eigen::Vector3d n1(-std::sin(phi), std::cos(phi), 0.0);
      const Eigen::Vector3d n2(-std::cos(theta) * std::cos(phi), -std::cos(theta) * std::sin(phi),
                               std::sin(theta));
      double scan_min = 1e300;
      for (int i = 0; i < 720; ++i) {
        const double zeta = std::numbers::pi * i / 720.0;
        const Eigen::Vector3d u = std::cos(zeta) * n1 + std::sin(zeta) * n2;
        const Eigen::MatrixXcd op = u(0) * s[0] + u(1) * s[1] + u(2) * s[2];
        const double m = (op * rho.matrix()).trace().real();
        const double v = (op * op * rho.matrix()).trace().real() - m * m;
        scan_min = std::min(scan_min, v);
      }
      const auto pv = min_perpendicular_variance(rho);
      REQUIRE(pv.has_value());
      CAPTURE(chi);
      CAPTURE(nc);
      CHECK(pv->var_min <= scan_min + 1e-9);
      CHECK(pv->var_min >= scan_min - 1e-4 * std::max(1.0, scan_min));
      CHECK(pv->var_min <= pv->var_y + 1e-9);
      CHECK(pv->var_min <= pv->var_n2 + 1e-9);
      CHECK(pv->mean_length == doctest::Approx(mean.norm()).epsilon(1e-10));
      CHECK(*criterion_wineland(rho) == doctest::Approx(2.0 * pv->var_min / mean.norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("witnesses are sound") {
  for (double chi : {0.0, 0.03, 0.3}) {
    for (auto [nc, nd] : {std::pair{50, 50}, {40, 60}}) {
      for (int i = 0; i <= 40; ++i) {
        const double tau = 0.5 * std::numbers::pi * i / 40.0;
        const AtomDensityMatrix rho = apply_photon_loss(params(8, tau, nc, nd, chi));
        const double e = log_negativity(rho).value;
        CAPTURE(tau);
        CAPTURE(chi);
        if (criterion_ht(rho) < 1.0 - 1e-6) CHECK(e > 0.0);
        const auto dgcz = criterion_dgcz(rho);
        if (dgcz && *dgcz < 1.0 - 1e-6) CHECK(e > 0.0);
        const auto steer = criterion_steering(rho);
        if (steer && *steer < 1.0 - 1e-6) CHECK(e > 0.0);
        CHECK(e <= std::log2(9.0) + 1e-12);
        const double f = epr_fidelity(rho);
        CHECK(f >= -1e-12);
        CHECK(f <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("undefined criteria are reported as empty") {
  const AtomDensityMatrix rho = fock_pair(6, 3);
  CHECK_FALSE(criterion_dgcz(rho).has_value());
  CHECK_FALSE(criterion_steering(rho).has_value());
  CHECK_FALSE(criterion_wineland(rho).has_value());
  CHECK_FALSE(min_perpendicular_variance(rho).has_value());
  const CriterionReport r = evaluate_criteria(rho, params(6, 0.0, 50, 50, 0.0));
  CHECK_FALSE(r.xi_squared.has_value());
  CHECK_FALSE(r.zeta_opt.has_value());
  // |k>|k> with k = N/2 is a product state.
  CHECK(r.log_negativity < 1e-12);
}

TEST_CASE("non-Hermitian input is rejected") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(9, 9) / 9.0;
  m(0, 4) = 0.3;
  const AtomDensityMatrix rho(2, m);
  CHECK_THROWS_AS(criterion_ht(rho), Error);
  CHECK_THROWS_AS(log_negativity(rho), Error);
}
