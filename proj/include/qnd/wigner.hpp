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

#pragma once

#include "qnd/observables.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace qnd {

/// Sampling of the sphere: theta uniformly on [0, pi], phi uniformly on
/// [-pi, pi], endpoints included. The default is a 1 degree lattice.
struct SphereGrid {
  int n_theta = 181;
  int n_phi = 361;

  std::vector<double> theta() const;
  std::vector<double> phi() const;
};

/// W sampled on a SphereGrid; values(i, j) belongs to (theta[i], phi[j]).
struct WignerField {
  std::vector<double> theta;
  std::vector<double> phi;
  Eigen::MatrixXd values;

  /// Grid indices of the largest sample.
  std::pair<int, int> argmax() const;
};

/// Multipole expansion rho_lq, 0 <= l <= N, |q| <= l.
class MultipoleCoefficients {
 public:
  explicit MultipoleCoefficients(int n_atoms);

  int n_atoms() const { return n_atoms_; }
  std::complex<double> operator()(int l, int q) const { return data_[index(l, q)]; }
  std::complex<double>& operator()(int l, int q) { return data_[index(l, q)]; }

 private:
  int index(int l, int q) const { return l * l + l + q; }

  int n_atoms_;
  std::vector<std::complex<double>> data_;
};

/// rho_lq = sum (-1)^{j - m1 - q} <j m1; j -m2 | l q> <j m1|rho|j m2> with
/// j = N/2 and |j m> = |k = j + m>. Throws Error(Integrity) for non-Hermitian
/// input.
MultipoleCoefficients rho_lq_coefficients(const Eigen::MatrixXcd& rho_single);

/// W(theta, phi) = sum_{l,q} rho_lq Y_lq(theta, phi). Throws Error(Numerical)
/// if the imaginary part of any sample exceeds 1e-9 relative to max |W|.
WignerField synthesize(const MultipoleCoefficients& coefficients, const SphereGrid& grid = {});

/// W at a single point, summing spherical harmonics directly.
double wigner_value(const MultipoleCoefficients& coefficients, double theta, double phi);

/// Spherical Wigner function of a single-condensate density matrix.
WignerField wigner_function(const Eigen::MatrixXcd& rho_single, const SphereGrid& grid = {});

/// Unnormalized block rho(k1, k, k1', k) of condensate 1 after projecting
/// condensate 2 on |k>.
Eigen::MatrixXcd conditional_block(const AtomDensityMatrix& rho, int k_project);

/// Throws Error(Domain) for k_project outside [0, N] and
/// Error(EmptyConditional) when the projected block vanishes.
WignerField conditional_wigner(const AtomDensityMatrix& rho, int k_project, const SphereGrid& grid = {});

WignerField marginal_wigner(const AtomDensityMatrix& rho, Bec which, const SphereGrid& grid = {});

}  // namespace qnd
