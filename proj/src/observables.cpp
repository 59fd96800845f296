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

#include "qnd/observables.hpp"

#include "qnd/error.hpp"
#include "qnd/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace qnd {

using cplx = std::complex<double>;

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kImagTol = 1e-10;

double real_checked(cplx v, const char* what) {
  if (std::abs(v.imag()) > kImagTol) {
    throw Error(ErrorKind::Integrity, std::string(what) + ": expectation has imaginary part " +
                                          std::to_string(v.imag()));
  }
  return v.real();
}

}  // namespace

std::string_view to_string(SpinAxis axis) {
  switch (axis) {
    case SpinAxis::X: return "x";
    case SpinAxis::Y: return "y";
    case SpinAxis::Z: return "z";
  }
  return "?";
}

Eigen::MatrixXcd spin_matrix(SpinAxis axis, int n_atoms) {
  if (n_atoms < 1) throw Error(ErrorKind::Domain, "spin_matrix: n_atoms must be >= 1");
  const int d = n_atoms + 1;
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    if (axis == SpinAxis::Z) {
      s(k, k) = 2.0 * k - n_atoms;
      continue;
    }
    if (k + 1 >= d) continue;
    const double r = std::sqrt(static_cast<double>(k + 1) * (n_atoms - k));
    if (axis == SpinAxis::X) {
      s(k + 1, k) = r;
      s(k, k + 1) = r;
    } else {
      s(k + 1, k) = cplx(0.0, -r);
      s(k, k + 1) = cplx(0.0, r);
    }
  }
  return s;
}

Eigen::MatrixXcd rotated_basis(SpinAxis axis, int n_atoms) {
  if (n_atoms < 1) throw Error(ErrorKind::Domain, "rotated_basis: n_atoms must be >= 1");
  const int d = n_atoms + 1;
  if (axis == SpinAxis::Z) return Eigen::MatrixXcd::Identity(d, d);
  // exp(-i S^y pi/4) is a quarter turn about y because S^y = 2 J^y.
  Eigen::MatrixXcd u = special::sy_rotation_matrix(n_atoms, std::numbers::pi / 2.0).cast<cplx>();
  if (axis == SpinAxis::Y) {
    for (int k = 0; k < d; ++k) {
      u.row(k) *= std::polar(1.0, -(2.0 * k - n_atoms) * std::numbers::pi / 4.0);
    }
  }
  return u;
}

Eigen::MatrixXcd partial_trace(const AtomDensityMatrix& rho, Bec keep) {
  const int d = rho.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) {
    for (int ap = 0; ap < d; ++ap) {
      cplx sum = 0.0;
      for (int b = 0; b < d; ++b) {
        sum += keep == Bec::First ? rho(a, b, ap, b) : rho(b, a, b, ap);
      }
      out(a, ap) = sum;
    }
  }
  return out;
}

std::complex<double> expectation_product(const AtomDensityMatrix& rho, const Eigen::MatrixXcd& a,
                                         const Eigen::MatrixXcd& b) {
  const int d = rho.dim();
  if (a.rows() != d || a.cols() != d || b.rows() != d || b.cols() != d) {
    throw Error(ErrorKind::Domain, "expectation_product: operator dimension mismatch");
  }
  // Tr[(A x B) rho] = sum A(k1,k1') B(k2,k2') rho(k1',k2',k1,k2); spin
  // matrices are tridiagonal, so skip zero entries of A.
  cplx total = 0.0;
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k1p = 0; k1p < d; ++k1p) {
      const cplx av = a(k1, k1p);
      if (av == cplx(0.0)) continue;
      cplx inner = 0.0;
      for (int k2 = 0; k2 < d; ++k2) {
        for (int k2p = 0; k2p < d; ++k2p) {
          const cplx bv = b(k2, k2p);
          if (bv == cplx(0.0)) continue;
          inner += bv * rho(k1p, k2p, k1, k2);
        }
      }
      total += av * inner;
    }
  }
  return total;
}

double expectation(const AtomDensityMatrix& rho, Bec which, SpinAxis axis) {
  rho.require_hermitian(kHermitianTol);
  const Eigen::MatrixXcd reduced = partial_trace(rho, which);
  const Eigen::MatrixXcd s = spin_matrix(axis, rho.n_atoms());
  return real_checked((s * reduced).trace(), "expectation");
}

double joint_variance(const AtomDensityMatrix& rho, JointOperator op) {
  rho.require_hermitian(kHermitianTol);
  const SpinAxis axis = op == JointOperator::XMinusX   ? SpinAxis::X
                        : op == JointOperator::YMinusY ? SpinAxis::Y
                                                       : SpinAxis::Z;
  const double sign = op == JointOperator::ZPlusZ ? 1.0 : -1.0;
  const int n = rho.n_atoms();
  const Eigen::MatrixXcd s = spin_matrix(axis, n);
  const Eigen::MatrixXcd s2 = s * s;
  const Eigen::MatrixXcd r1 = partial_trace(rho, Bec::First);
  const Eigen::MatrixXcd r2 = partial_trace(rho, Bec::Second);
  const double m1 = real_checked((s * r1).trace(), "joint_variance");
  const double m2 = real_checked((s * r2).trace(), "joint_variance");
  const double sq1 = real_checked((s2 * r1).trace(), "joint_variance");
  const double sq2 = real_checked((s2 * r2).trace(), "joint_variance");
  const double cross = real_checked(expectation_product(rho, s, s), "joint_variance");
  const double mean = m1 + sign * m2;
  return sq1 + sq2 + 2.0 * sign * cross - mean * mean;
}

Eigen::MatrixXd basis_probability_grid(const AtomDensityMatrix& rho, SpinAxis basis1,
                                       SpinAxis basis2) {
  rho.require_hermitian(kHermitianTol);
  const int d = rho.dim();
  const Eigen::MatrixXcd u1 = rotated_basis(basis1, rho.n_atoms());
  const Eigen::MatrixXcd u2 = rotated_basis(basis2, rho.n_atoms());
  const Eigen::MatrixXcd& r = rho.matrix();

  // Right factor first: t(row, (k1,k2)) = sum_{c,e} r(row, (c,e)) u1(c,k1) u2(e,k2).
  Eigen::MatrixXcd t(d * d, d * d);
  Eigen::MatrixXcd block(d, d);
  for (int row = 0; row < d * d; ++row) {
    for (int c = 0; c < d; ++c) {
      for (int e = 0; e < d; ++e) block(c, e) = r(row, c * d + e);
    }
    const Eigen::MatrixXcd rotated = u1.transpose() * block * u2;
    for (int k1 = 0; k1 < d; ++k1) {
      for (int k2 = 0; k2 < d; ++k2) t(row, k1 * d + k2) = rotated(k1, k2);
    }
  }
  Eigen::MatrixXd p(d, d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      cplx sum = 0.0;
      for (int a = 0; a < d; ++a) {
        const cplx left = std::conj(u1(a, k1));
        for (int b = 0; b < d; ++b) sum += left * std::conj(u2(b, k2)) * t(a * d + b, k1 * d + k2);
      }
      p(k1, k2) = real_checked(sum, "basis_probability_grid");
    }
  }
  return p;
}

Eigen::Matrix3d SpinMoments::collective_covariance() const {
  const Eigen::Vector3d m = collective_mean();
  Eigen::Matrix3d g;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      g(a, b) = corr(a, b) + corr(a + 3, b + 3) + corr(a, b + 3) + corr(a + 3, b) - m(a) * m(b);
    }
  }
  return g;
}

Eigen::Matrix3d SpinMoments::single_covariance(Bec which) const {
  const int off = which == Bec::First ? 0 : 3;
  const Eigen::Vector3d& m = which == Bec::First ? mean1 : mean2;
  Eigen::Matrix3d g;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) g(a, b) = corr(a + off, b + off) - m(a) * m(b);
  }
  return g;
}

SpinMoments spin_moments(const AtomDensityMatrix& rho) {
  rho.require_hermitian(kHermitianTol);
  const int n = rho.n_atoms();
  const std::array<Eigen::MatrixXcd, 3> s{spin_matrix(SpinAxis::X, n), spin_matrix(SpinAxis::Y, n),
                                          spin_matrix(SpinAxis::Z, n)};
  const Eigen::MatrixXcd r1 = partial_trace(rho, Bec::First);
  const Eigen::MatrixXcd r2 = partial_trace(rho, Bec::Second);

  SpinMoments out;
  for (int a = 0; a < 3; ++a) {
    out.mean1(a) = real_checked((s[a] * r1).trace(), "spin_moments");
    out.mean2(a) = real_checked((s[a] * r2).trace(), "spin_moments");
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      const Eigen::MatrixXcd anti = 0.5 * (s[a] * s[b] + s[b] * s[a]);
      out.corr(a, b) = out.corr(b, a) = real_checked((anti * r1).trace(), "spin_moments");
      out.corr(a + 3, b + 3) = out.corr(b + 3, a + 3) = real_checked((anti * r2).trace(), "spin_moments");
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double v = real_checked(expectation_product(rho, s[a], s[b]), "spin_moments");
      out.corr(a, b + 3) = v;
      out.corr(b + 3, a) = v;
    }
  }
  return out;
}

}  // namespace qnd
