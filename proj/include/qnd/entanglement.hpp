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

#include <optional>

namespace qnd {

/// rho(k1, k2, k1', k2') -> rho(k1, k2', k1', k2). Applying it twice is the identity.
AtomDensityMatrix partial_transpose(const AtomDensityMatrix& rho);

struct LogNegativity {
  double value = 0.0;       // log2 of the trace norm of the partial transpose
  double normalized = 0.0;  // value / log2(N + 1)
};

/// Eigenvalues below 1e-12 in magnitude are dropped. Throws Error(Integrity)
/// for non-Hermitian rho and Error(Numerical) if the eigensolver does not converge.
LogNegativity log_negativity(const AtomDensityMatrix& rho);

/// <EPR|rho|EPR> with |EPR> = (N+1)^{-1/2} sum_k |k>|k>.
double epr_fidelity(const AtomDensityMatrix& rho);

/// [Var(S1x - S2x) + Var(S1y - S2y) + Var(S1z + S2z)] / 4N. Below 1 means entangled.
double criterion_ht(const AtomDensityMatrix& rho);

/// [Var(S1y - S2y) + Var(S1z + S2z)] / 2(|<S1x>| + |<S2x>|); empty when the
/// denominator is below 1e-9.
std::optional<double> criterion_dgcz(const AtomDensityMatrix& rho);

/// Var(S1y - S2y) Var(S1z + S2z) / <S1x>^2; empty when <S1x>^2 < 1e-12.
std::optional<double> criterion_steering(const AtomDensityMatrix& rho);

/// Spin whose squeezing is examined.
enum class SqueezingScope { Collective, FirstBec };

struct PerpendicularVariance {
  double var_min = 0.0;
  double zeta_opt = 0.0;
  double theta = 0.0;  // polar angle of the mean spin
  double phi = 0.0;    // azimuth of the mean spin
  double mean_length = 0.0;
  double var_y = 0.0;   // Var along the first perpendicular axis
  double var_n2 = 0.0;  // Var along the second perpendicular axis
};

/// Smallest variance of the spin component perpendicular to its mean.
///
/// With mean direction (theta, phi) the perpendicular plane is spanned by
/// n1 = (-sin phi, cos phi, 0) and n2 = (-cos theta cos phi, -cos theta sin phi, sin theta).
/// The optimum is S_zeta = cos zeta S_n1 + sin zeta S_n2 at
/// zeta = [pi + atan2(<{S_n1, S_n2}>, <S_n1^2 - S_n2^2>)] / 2 using centred
/// moments, and is checked against a 720-point scan of zeta. Empty when the
/// mean spin is shorter than 1e-9.
std::optional<PerpendicularVariance> min_perpendicular_variance(
    const SpinMoments& moments, SqueezingScope scope = SqueezingScope::Collective);
std::optional<PerpendicularVariance> min_perpendicular_variance(
    const AtomDensityMatrix& rho, SqueezingScope scope = SqueezingScope::Collective);

/// xi^2 = 2 var_min / |<S>|. A coherent state gives 2 with these operators.
std::optional<double> criterion_wineland(const AtomDensityMatrix& rho,
                                         SqueezingScope scope = SqueezingScope::Collective);

/// Every entanglement quantity at one parameter point.
struct CriterionReport {
  double tau = 0.0;
  double chi_bar = 0.0;
  double log_negativity = 0.0;
  double log_negativity_normalized = 0.0;
  double epr_fidelity = 0.0;
  double c_ent = 0.0;
  std::optional<double> c_dgcz;
  std::optional<double> xi_squared;
  std::optional<double> xi_squared_half;  // xi^2 / 2, equal to 1 for a coherent state
  std::optional<double> c_steer_1to2;
  std::optional<double> zeta_opt;
  std::optional<double> mean_theta;
  std::optional<double> mean_phi;
};

/// Computes the full report for rho; tau and chi_bar are copied from params.
CriterionReport evaluate_criteria(const AtomDensityMatrix& rho, const SystemParams& params,
                                  SqueezingScope scope = SqueezingScope::Collective);

}  // namespace qnd
