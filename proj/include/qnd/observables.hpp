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

#include "qnd/photon_loss.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string_view>

namespace qnd {

enum class SpinAxis { X, Y, Z };

/// Which condensate an operator acts on.
enum class Bec { First = 1, Second = 2 };

/// The joint operators whose variances enter the entanglement criteria.
enum class JointOperator { XMinusX, YMinusY, ZPlusZ };

std::string_view to_string(SpinAxis axis);

/// Schwinger-boson spin matrix on the Fock basis |k>, k = 0..N, with
/// S^z = diag(2k - N), <k+1|S^x|k> = sqrt((k+1)(N-k)) and
/// <k+1|S^y|k> = -i sqrt((k+1)(N-k)), so that [S^x, S^y] = 2i S^z.
Eigen::MatrixXcd spin_matrix(SpinAxis axis, int n_atoms);

/// Columns are the eigenvectors |k>^(axis) of S^axis with eigenvalue 2k - N:
/// |k>^(x) = exp(-i S^y pi/4)|k>, |k>^(y) = exp(-i S^z pi/4) exp(-i S^y pi/4)|k>.
Eigen::MatrixXcd rotated_basis(SpinAxis axis, int n_atoms);

/// Reduced state of one condensate.
Eigen::MatrixXcd partial_trace(const AtomDensityMatrix& rho, Bec keep);

/// Tr[(A (x) B) rho] for single-condensate operators A, B.
std::complex<double> expectation_product(const AtomDensityMatrix& rho, const Eigen::MatrixXcd& a,
                                         const Eigen::MatrixXcd& b);

/// <S^axis> on one condensate. Throws Error(Integrity) for non-Hermitian rho.
double expectation(const AtomDensityMatrix& rho, Bec which, SpinAxis axis);

/// Var of S1^x - S2^x, S1^y - S2^y or S1^z + S2^z.
double joint_variance(const AtomDensityMatrix& rho, JointOperator op);

/// p(k1, k2) = <k1|^(basis1) <k2|^(basis2) rho |k1>^(basis1) |k2>^(basis2).
Eigen::MatrixXd basis_probability_grid(const AtomDensityMatrix& rho, SpinAxis basis1, SpinAxis basis2);

/// First and second moments of both condensates' spins.
///
/// mean1/mean2 hold <S_i^a>; corr(a, b) for a, b in 0..5 is the symmetrized
/// second moment <{O_a, O_b}>/2 over O = (S1x, S1y, S1z, S2x, S2y, S2z).
struct SpinMoments {
  Eigen::Vector3d mean1;
  Eigen::Vector3d mean2;
  Eigen::Matrix<double, 6, 6> corr;

  /// Covariance of n . S for the collective spin S1 + S2 (or S1 alone).
  Eigen::Matrix3d collective_covariance() const;
  Eigen::Matrix3d single_covariance(Bec which) const;
  Eigen::Vector3d collective_mean() const { return mean1 + mean2; }
};

SpinMoments spin_moments(const AtomDensityMatrix& rho);

}  // namespace qnd
