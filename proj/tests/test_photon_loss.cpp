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

#include "qnd/error.hpp"
#include "qnd/photon_loss.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace qnd;

namespace {

SystemParams params(int n, double alpha, double tau, int nc, int nd, double chi, double gamma = 0.0) {
  SystemParams p;
  p.n_atoms = n;
  p.alpha = alpha;
  p.tau = tau;
  p.n_c = nc;
  p.n_d = nd;
  p.chi_bar = chi;
  p.gamma_bar = gamma;
  return p;
}

double min_eigenvalue(const AtomDensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("decoherence factor") {
  const SystemParams p = params(20, 10, 0.4, 50, 50, 0.3);
  CHECK(decoherence_ratio(0.0, p) == 1.0);
  for (double u : {0.1, 0.8, 2.0, 3.1}) {
    CHECK(decoherence_ratio(u, p) == doctest::Approx(decoherence_ratio(-u, p)));
    CHECK(decoherence_ratio(u, p) < 1.0);
    CHECK(decoherence_factor(u, p) / decoherence_factor(0.0, p) == doctest::Approx(decoherence_ratio(u, p)));
  }
  CHECK(decoherence_ratio(1.0, params(20, 10, 0.4, 50, 50, 0.0)) == 1.0);
  const double direct = std::exp(-2 * 0.3 * 0.4 * 100) * std::exp((1 - std::exp(-2 * 0.3 * 0.4)) * 100 * std::cos(0.7));
  CHECK(decoherence_factor(0.7, p) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("photons remaining after attenuation") {
  CHECK(photons_remaining(0.0, 1.0, 10.0) == doctest::Approx(100.0));
  CHECK(photons_remaining(0.3, 1.0, 10.0) == doctest::Approx(100.0 * std::exp(-0.6)));
  CHECK(photons_remaining(0.3, 1.0, 10.0) == doctest::Approx(54.88).epsilon(1e-4));
  CHECK(photons_remaining(5.0, 100.0, 10.0) < 1e-300);
}

TEST_CASE("loss-free channel reproduces the pure state") {
  const SystemParams p = params(6, 10, 0.3, 48, 52, 0.0);
  const AtomDensityMatrix rho = apply_photon_loss(p);
  const AtomDensityMatrix pure = AtomDensityMatrix::from_pure(build_state(p));
  CHECK(testing::max_abs_diff(rho.matrix(), pure.matrix()) < 1e-15);
}

TEST_CASE("density matrices are Hermitian, unit trace and positive over a sweep") {
  for (double chi : {0.0, 0.03, 0.3, 0.7}) {
    for (double tau : {0.0, 0.05, 0.2, std::numbers::pi / 8, 1.3}) {
      for (auto [nc, nd] : {std::pair{50, 50}, {40, 60}, {30, 70}}) {
        const SystemParams p = params(8, 10, tau, nc, nd, chi);
        const AtomDensityMatrix rho = apply_photon_loss(p);
        REQUIRE(rho.hermiticity_defect() < 1e-14);
        REQUIRE(std::abs(rho.trace() - 1.0) < 1e-12);
        REQUIRE(min_eigenvalue(rho) > -1e-9);
        // Populations are untouched by the channel.
        const StateAmplitudes psi = build_state(p);
        for (int k1 = 0; k1 <= 8; ++k1)
          for (int k2 = 0; k2 <= 8; ++k2)
            REQUIRE(rho(k1, k2, k1, k2).real() == doctest::Approx(psi.amplitudes(k1, k2) * psi.amplitudes(k1, k2)).epsilon(1e-13).scale(1e-300));
      }
    }
  }
}

TEST_CASE("purity does not increase with attenuation") {
  for (double tau : {0.1, 0.4}) {
    double previous = 2.0;
    for (double chi : {0.0, 0.01, 0.03, 0.1, 0.3, 0.7, 1.5}) {
      const AtomDensityMatrix rho = apply_photon_loss(params(10, 10, tau, 50, 50, chi));
      const double purity = (rho.matrix() * rho.matrix()).trace().real();
      REQUIRE(purity <= previous + 1e-12);
      previous = purity;
    }
  }
}

TEST_CASE("closed form agrees with the Kraus oracle") {
  for (auto [nc, nd] : {std::pair{1, 1}, {2, 0}, {0, 3}, {2, 1}}) {
    for (double chi : {0.1, 0.3}) {
      const SystemParams p = params(2, 1.0, 0.4, nc, nd, chi);
      const AtomDensityMatrix fast = apply_photon_loss(p);
      const AtomDensityMatrix slow = kraus_oracle(p, 40);
      CAPTURE(nc);
      CAPTURE(nd);
      CAPTURE(chi);
      CHECK(testing::max_abs_diff(fast.matrix(), slow.matrix()) < 1e-6);
      // The oracle's unnormalized trace is the joint outcome probability.
      CHECK(slow.trace_weight() == doctest::Approx(fast.trace_weight()).epsilon(1e-6));
    }
  }
  // A three-atom instance at a different time.
  const SystemParams p = params(3, 1.2, 0.9, 1, 2, 0.2);
  CHECK(testing::max_abs_diff(apply_photon_loss(p).matrix(), kraus_oracle(p, 40).matrix()) < 1e-6);
}

TEST_CASE("phase damping does not change the projected state") {
  SystemParams p = params(2, 1.0, 0.4, 1, 1, 0.0, 0.0);
  const AtomDensityMatrix reference = kraus_oracle(p, 40);
  p.gamma_bar = 0.5;
  CHECK(testing::max_abs_diff(kraus_oracle(p, 40).matrix(), reference.matrix()) < 1e-8);
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(apply_photon_loss(params(4, 10, -0.1, 50, 50, 0.3)), Error);
  CHECK_NOTHROW(apply_photon_loss(params(4, 10, -0.1, 50, 50, 0.0)));
  try {
    kraus_oracle(params(2, 3.0, 0.4, 1, 1, 0.1), 10);
    FAIL("expected a configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(9, 9) / 9.0;
  m(0, 1) = 0.2;
  const AtomDensityMatrix bad(2, m);
  CHECK_THROWS_AS(bad.require_hermitian(), Error);
  CHECK_THROWS_AS(AtomDensityMatrix(2, Eigen::MatrixXcd::Identity(4, 4)), Error);
}
