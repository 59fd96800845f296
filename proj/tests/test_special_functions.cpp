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
#include "qnd/special_functions.hpp"

#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

using namespace qnd;
using namespace qnd::special;
using cplx = std::complex<double>;

namespace {

double exact_ln_factorial(int n) {
  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_int;
  cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return static_cast<double>(log(cpp_bin_float_50(f)));
}

// Coupled states |J M> of two spins built by lowering from the stretched
// state and Gram-Schmidt, in the uncoupled basis |m1, m2>. Indices store
// twice the quantum numbers.
class CoupledBasis {
 public:
  CoupledBasis(int tj1, int tj2) : tj1_(tj1), tj2_(tj2) {
    const int dim = (tj1 + 1) * (tj2 + 1);
    for (int tJ = tj1 + tj2; tJ >= std::abs(tj1 - tj2); tJ -= 2) {
      Eigen::VectorXd top = Eigen::VectorXd::Zero(dim);
      if (tJ == tj1 + tj2) {
        top(index(tj1, tj2)) = 1.0;
      } else {
        // Orthogonalize the M = J sector against the larger J already built.
        for (int tm1 = tj1; tm1 >= -tj1; tm1 -= 2) {
          const int tm2 = tJ - tm1;
          if (std::abs(tm2) > tj2) continue;
          Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
          v(index(tm1, tm2)) = 1.0;
          for (const auto& [key, w] : states_) {
            if (std::get<1>(key) == tJ) v -= w.dot(v) * w;
          }
          if (v.norm() > 1e-8) {
            top = v.normalized();
            break;
          }
        }
        // Condon-Shortley: <j1 j1; j2 J-j1 | J J> > 0.
        if (top(index(tj1, tJ - tj1)) < 0) top = -top;
      }
      Eigen::VectorXd cur = top;
      for (int tM = tJ; tM >= -tJ; tM -= 2) {
        states_[{tJ, tM}] = cur;
        if (tM > -tJ) {
          cur = lower(cur);
          cur.normalize();
        }
      }
    }
  }

  double cg(int tm1, int tm2, int tJ, int tM) const {
    const auto it = states_.find({tJ, tM});
    if (it == states_.end() || std::abs(tm1) > tj1_ || std::abs(tm2) > tj2_) return 0.0;
    return it->second(index(tm1, tm2));
  }

 private:
  int index(int tm1, int tm2) const { return ((tj1_ - tm1) / 2) * (tj2_ + 1) + (tj2_ - tm2) / 2; }

  Eigen::VectorXd lower(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
    for (int tm1 = tj1_; tm1 >= -tj1_; tm1 -= 2) {
      for (int tm2 = tj2_; tm2 >= -tj2_; tm2 -= 2) {
        const double c = v(index(tm1, tm2));
        if (c == 0.0) continue;
        if (tm1 > -tj1_) out(index(tm1 - 2, tm2)) += c * std::sqrt((tj1_ + tm1) * (tj1_ - tm1 + 2) / 4.0);
        if (tm2 > -tj2_) out(index(tm1, tm2 - 2)) += c * std::sqrt((tj2_ + tm2) * (tj2_ - tm2 + 2) / 4.0);
      }
    }
    return out;
  }

  int tj1_;
  int tj2_;
  std::map<std::tuple<int, int>, Eigen::VectorXd> states_;
};

double cg_twice(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  return clebsch_gordan(HalfInteger::from_twice(tj1), HalfInteger::from_twice(tm1), HalfInteger::from_twice(tj2),
                        HalfInteger::from_twice(tm2), HalfInteger::from_twice(tJ), HalfInteger::from_twice(tM));
}

Eigen::MatrixXcd explicit_sy(int n) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    const double r = std::sqrt((k + 1.0) * (n - k));
    s(k + 1, k) = cplx(0, -r);
    s(k, k + 1) = cplx(0, r);
  }
  return s;
}

Eigen::MatrixXcd explicit_sx(int n) {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  for (int k = 0; k < n; ++k) {
    const double r = std::sqrt((k + 1.0) * (n - k));
    s(k + 1, k) = r;
    s(k, k + 1) = r;
  }
  return s;
}

double max_abs_diff_identity(const Eigen::MatrixXcd& m) {
  return (m - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("ln_factorial matches exact integer factorials") {
  CHECK(ln_factorial(0) == 0.0);
  CHECK(ln_factorial(1) == 0.0);
  for (int n : {2, 5, 20, 100, 170, 171, 500, 1000, 3000, 9999, 10000, 10001, 12000}) {
    const double exact = exact_ln_factorial(n);
    CHECK(std::abs(ln_factorial(n) - exact) <= 1e-12 * exact);
  }
  CHECK_THROWS_AS(ln_factorial(-1), Error);
}

TEST_CASE("ln_binomial") {
  CHECK(ln_binomial(20, 10) == doctest::Approx(std::log(184756.0)).epsilon(1e-14));
  CHECK(ln_binomial(20, 0) == 0.0);
  CHECK(ln_binomial(5, 7) == kNegInf);
  CHECK(ln_binomial(5, -1) == kNegInf);
  for (int n = 0; n <= 200; ++n) {
    for (int k = 0; k <= n; ++k) REQUIRE(ln_binomial(n, k) == ln_binomial(n, n - k));
  }
}

TEST_CASE("SignedLogSum handles alternating sums and flags cancellation") {
  SignedLogSum s;
  s.add(std::log(3.0), +1);
  s.add(std::log(1.0), -1);
  CHECK(s.value() == doctest::Approx(2.0));
  CHECK(s.cancellation() == doctest::Approx(2.0));

  SignedLogSum big;
  big.add(700.0, +1);  // e^700 squared would overflow a double
  big.add(700.0 + std::log(0.5), -1);
  CHECK(std::log(big.value()) == doctest::Approx(700.0 + std::log(0.5)));

  SignedLogSum empty;
  CHECK(empty.value() == 0.0);
}

TEST_CASE("Clebsch-Gordan closed form against brute-force coupling") {
  CHECK(cg_twice(1, 1, 1, -1, 0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cg_twice(1, -1, 1, 1, 0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(cg_twice(19, 17, 19, -17, 0, 0) == doctest::Approx(-1.0 / std::sqrt(20.0)).epsilon(1e-12));
  CHECK(cg_twice(2, 2, 2, 0, 2, 0) == 0.0);  // M != m1 + m2

  // <j m; j -m | 0 0> = (-1)^{j - m} / sqrt(2j + 1), positive at m = j.
  CHECK(cg_twice(20, 20, 20, -20, 0, 0) == doctest::Approx(1.0 / std::sqrt(21.0)).epsilon(1e-12));
  CHECK(cg_twice(19, 19, 19, -19, 0, 0) == doctest::Approx(1.0 / std::sqrt(20.0)).epsilon(1e-12));

  for (int tj1 = 0; tj1 <= 6; ++tj1) {
    for (int tj2 = 0; tj2 <= 6; ++tj2) {
      const CoupledBasis basis(tj1, tj2);
      for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2) {
        for (int tM = -tJ; tM <= tJ; tM += 2) {
          for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
            const int tm2 = tM - tm1;
            if (std::abs(tm2) > tj2) continue;
            REQUIRE(cg_twice(tj1, tm1, tj2, tm2, tJ, tM) ==
                    doctest::Approx(basis.cg(tm1, tm2, tJ, tM)).epsilon(1e-11).scale(1.0));
          }
        }
      }
    }
  }
}

TEST_CASE("Clebsch-Gordan orthogonality up to j = 10") {
  for (int tj1 : {1, 4, 7, 20}) {
    for (int tj2 : {2, 5, 20}) {
      for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
        for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2) {
          for (int tm1p = -tj1; tm1p <= tj1; tm1p += 2) {
            const int tm2p = tm1 + tm2 - tm1p;  // other pairs vanish by selection
            if (std::abs(tm2p) > tj2) continue;
            double sum = 0.0;
            for (int tJ = std::abs(tj1 - tj2); tJ <= tj1 + tj2; tJ += 2) {
              const int tM = tm1 + tm2;
              if (std::abs(tM) > tJ) continue;
              sum += cg_twice(tj1, tm1, tj2, tm2, tJ, tM) * cg_twice(tj1, tm1p, tj2, tm2p, tJ, tM);
            }
            const double expected = (tm1 == tm1p) ? 1.0 : 0.0;
            REQUIRE(std::abs(sum - expected) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("spherical harmonics") {
  for (double th : {0.0, 0.4, 1.3, std::numbers::pi}) {
    CHECK(std::abs(spherical_harmonic(0, 0, th, 2.1) - cplx(0.5 / std::sqrt(std::numbers::pi))) < 1e-15);
  }
  CHECK(std::abs(spherical_harmonic(1, 0, std::numbers::pi / 2, 0.0)) < 1e-15);
  CHECK_THROWS_AS(spherical_harmonic(2, 3, 0.1, 0.1), Error);

  // Independent reference: the C++17 special math sph_legendre.
  for (int l = 0; l <= 24; ++l) {
    for (int m = 0; m <= l; ++m) {
      for (double th : {0.05, 0.7, 1.9, 3.0}) {
        const cplx ref = std::sph_legendre(l, m, th) * std::polar(1.0, m * 0.3);
        REQUIRE(std::abs(spherical_harmonic(l, m, th, 0.3) - ref) < 1e-12);
        const cplx neg = (m % 2 ? -1.0 : 1.0) * std::conj(ref);
        REQUIRE(std::abs(spherical_harmonic(l, -m, th, 0.3) - neg) < 1e-12);
      }
    }
  }
}

TEST_CASE("spherical harmonics are orthonormal under quadrature") {
  constexpr int kLmax = 24;
  constexpr int kNodes = 30;
  constexpr int kPhi = 2 * kLmax + 2;
  using Quad = boost::math::quadrature::gauss<double, kNodes>;
  // Nodes in x = cos theta over [-1, 1]; boost stores the non-negative half.
  std::vector<double> xs;
  std::vector<double> ws;
  for (std::size_t i = 0; i < Quad::abscissa().size(); ++i) {
    const double x = Quad::abscissa()[i];
    const double w = Quad::weights()[i];
    xs.push_back(x);
    ws.push_back(w);
    if (x != 0.0) {
      xs.push_back(-x);
      ws.push_back(w);
    }
  }
  const int dim = (kLmax + 1) * (kLmax + 1);
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd y(dim);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double th = std::acos(xs[i]);
    for (int p = 0; p < kPhi; ++p) {
      const double ph = 2.0 * std::numbers::pi * p / kPhi;
      int idx = 0;
      for (int l = 0; l <= kLmax; ++l)
        for (int m = -l; m <= l; ++m) y(idx++) = spherical_harmonic(l, m, th, ph);
      gram += (ws[i] * 2.0 * std::numbers::pi / kPhi) * (y.conjugate() * y.transpose());
    }
  }
  CHECK(max_abs_diff_identity(gram) < 1e-9);
}

TEST_CASE("Legendre table agrees with spherical_harmonic") {
  const auto table = normalized_legendre_table(30, 1.1);
  for (int l = 0; l <= 30; ++l)
    for (int m = 0; m <= l; ++m)
      REQUIRE(table[static_cast<std::size_t>(legendre_index(l, m))] ==
              doctest::Approx(spherical_harmonic(l, m, 1.1, 0.0).real()).epsilon(1e-12).scale(1e-300));
}

TEST_CASE("S^y rotation against the dense matrix exponential") {
  CHECK((sy_rotation_matrix(6, 0.0) - Eigen::MatrixXd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-15);

  // N = 1: a spin-1/2 rotation by theta/2 about y, with S^y twice the Pauli matrix.
  const double th = 0.83;
  const Eigen::MatrixXd r1 = sy_rotation_matrix(1, th);
  Eigen::Matrix2d expect;
  expect << std::cos(th / 2), std::sin(th / 2), -std::sin(th / 2), std::cos(th / 2);
  CHECK((r1 - expect).cwiseAbs().maxCoeff() < 1e-15);

  for (int n : {1, 4, 7, 20}) {
    for (double t : {std::numbers::pi / 2, 0.37, 2.9}) {
      const Eigen::MatrixXcd gen = cplx(0, -t / 2) * explicit_sy(n);
      const Eigen::MatrixXcd ref = gen.exp();
      REQUIRE((sy_rotation_matrix(n, t).cast<cplx>() - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("S^x rotation against the dense matrix exponential") {
  for (int n : {1, 4, 9}) {
    for (double t : {std::numbers::pi / 2, 1.2}) {
      const Eigen::MatrixXcd gen = cplx(0, -t / 2) * explicit_sx(n);
      const Eigen::MatrixXcd ref = gen.exp();
      REQUIRE((sx_rotation_matrix(n, t) - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  const Eigen::MatrixXcd r = sx_rotation_matrix(8, 0.9);
  for (int k = 0; k <= 8; ++k)
    for (int kp = 0; kp <= 8; ++kp)
      if ((kp - k) % 4 == 0) CHECK(r(k, kp).imag() == 0.0);
}

TEST_CASE("rotation unitarity for N <= 24 on a 32-point angle grid") {
  for (int n = 1; n <= 24; ++n) {
    for (int i = 0; i < 32; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 32;
      const Eigen::MatrixXd ry = sy_rotation_matrix(n, t);
      const Eigen::MatrixXcd rx = sx_rotation_matrix(n, t);
      REQUIRE((ry.transpose() * ry - Eigen::MatrixXd::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-10);
      REQUIRE((rx.adjoint() * rx - Eigen::MatrixXcd::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}
