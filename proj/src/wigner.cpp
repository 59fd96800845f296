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

#include "qnd/wigner.hpp"

#include "qnd/error.hpp"
#include "qnd/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qnd {

using cplx = std::complex<double>;
using special::HalfInteger;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

void require_hermitian(const Eigen::MatrixXcd& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw Error(ErrorKind::Domain, std::string(what) + ": expected a square matrix of size >= 2");
  }
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    throw Error(ErrorKind::Integrity,
                std::string(what) + ": input is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

}  // namespace

std::vector<double> SphereGrid::theta() const {
  if (n_theta < 2) throw Error(ErrorKind::Domain, "SphereGrid: n_theta must be >= 2");
  return linspace(0.0, std::numbers::pi, n_theta);
}

std::vector<double> SphereGrid::phi() const {
  if (n_phi < 2) throw Error(ErrorKind::Domain, "SphereGrid: n_phi must be >= 2");
  return linspace(-std::numbers::pi, std::numbers::pi, n_phi);
}

std::pair<int, int> WignerField::argmax() const {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  values.maxCoeff(&i, &j);
  return {static_cast<int>(i), static_cast<int>(j)};
}

MultipoleCoefficients::MultipoleCoefficients(int n_atoms)
    : n_atoms_(n_atoms), data_(static_cast<std::size_t>((n_atoms + 1) * (n_atoms + 1))) {}

MultipoleCoefficients rho_lq_coefficients(const Eigen::MatrixXcd& rho_single) {
  require_hermitian(rho_single, "rho_lq_coefficients");
  const int n = static_cast<int>(rho_single.rows()) - 1;
  const HalfInteger j = HalfInteger::from_twice(n);
  MultipoleCoefficients out(n);
  for (int l = 0; l <= n; ++l) {
    for (int q = -l; q <= l; ++q) {
      cplx sum = 0.0;
      // Only m1 - m2 = q survives, i.e. k1 = k2 + q.
      for (int k2 = std::max(0, -q); k2 <= std::min(n, n - q); ++k2) {
        const int k1 = k2 + q;
        const HalfInteger m1 = HalfInteger::from_twice(2 * k1 - n);
        const HalfInteger m2 = HalfInteger::from_twice(2 * k2 - n);
        const double cg = special::clebsch_gordan(j, m1, j, -m2, HalfInteger::whole(l), HalfInteger::whole(q));
        if (cg == 0.0) continue;
        const int phase_exponent = (n - k1) - q;  // j - m1 = N - k1
        const double sign = (phase_exponent % 2 == 0) ? 1.0 : -1.0;
        sum += sign * cg * rho_single(k1, k2);
      }
      out(l, q) = sum;
    }
  }
  return out;
}

WignerField synthesize(const MultipoleCoefficients& c, const SphereGrid& grid) {
  const int n = c.n_atoms();
  WignerField field;
  field.theta = grid.theta();
  field.phi = grid.phi();
  const int nt = static_cast<int>(field.theta.size());
  const int np = static_cast<int>(field.phi.size());
  field.values.resize(nt, np);

  // e^{i q phi} for q = 0..N, reused for every theta row.
  Eigen::MatrixXcd phase(n + 1, np);
  for (int q = 0; q <= n; ++q) {
    for (int p = 0; p < np; ++p) phase(q, p) = std::polar(1.0, q * field.phi[static_cast<std::size_t>(p)]);
  }

  double max_abs = 0.0;
  double max_imag = 0.0;
  std::vector<cplx> a_pos(static_cast<std::size_t>(n + 1));
  std::vector<cplx> a_neg(static_cast<std::size_t>(n + 1));
  for (int t = 0; t < nt; ++t) {
    const std::vector<double> pbar = special::normalized_legendre_table(n, field.theta[static_cast<std::size_t>(t)]);
    // Y_{l,-m} = (-1)^m Pbar_l^m e^{-i m phi}.
    for (int m = 0; m <= n; ++m) {
      cplx pos = 0.0;
      cplx neg = 0.0;
      for (int l = m; l <= n; ++l) {
        const double p = pbar[static_cast<std::size_t>(special::legendre_index(l, m))];
        pos += c(l, m) * p;
        if (m > 0) neg += c(l, -m) * p;
      }
      a_pos[static_cast<std::size_t>(m)] = pos;
      a_neg[static_cast<std::size_t>(m)] = (m % 2 == 0 ? 1.0 : -1.0) * neg;
    }
    for (int p = 0; p < np; ++p) {
      cplx w = a_pos[0];
      for (int m = 1; m <= n; ++m) {
        w += a_pos[static_cast<std::size_t>(m)] * phase(m, p) +
             a_neg[static_cast<std::size_t>(m)] * std::conj(phase(m, p));
      }
      field.values(t, p) = w.real();
      max_abs = std::max(max_abs, std::abs(w.real()));
      max_imag = std::max(max_imag, std::abs(w.imag()));
    }
  }
  if (max_imag > 1e-9 * std::max(1.0, max_abs)) {
    throw Error(ErrorKind::Numerical,
                "synthesize: Wigner field has imaginary residue " + std::to_string(max_imag));
  }
  return field;
}

double wigner_value(const MultipoleCoefficients& c, double theta, double phi) {
  cplx w = 0.0;
  for (int l = 0; l <= c.n_atoms(); ++l) {
    for (int q = -l; q <= l; ++q) w += c(l, q) * special::spherical_harmonic(l, q, theta, phi);
  }
  return w.real();
}

WignerField wigner_function(const Eigen::MatrixXcd& rho_single, const SphereGrid& grid) {
  return synthesize(rho_lq_coefficients(rho_single), grid);
}

Eigen::MatrixXcd conditional_block(const AtomDensityMatrix& rho, int k_project) {
  const int d = rho.dim();
  if (k_project < 0 || k_project >= d) {
    throw Error(ErrorKind::Domain, "conditional_block: k_project must lie in [0, N]");
  }
  Eigen::MatrixXcd block(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) block(a, b) = rho(a, k_project, b, k_project);
  }
  return block;
}

WignerField conditional_wigner(const AtomDensityMatrix& rho, int k_project, const SphereGrid& grid) {
  const Eigen::MatrixXcd block = conditional_block(rho, k_project);
  if (block.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorKind::EmptyConditional,
                "conditional_wigner: projection on k = " + std::to_string(k_project) + " has zero weight");
  }
  return wigner_function(block, grid);
}

WignerField marginal_wigner(const AtomDensityMatrix& rho, Bec which, const SphereGrid& grid) {
  return wigner_function(partial_trace(rho, which), grid);
}

}  // namespace qnd
