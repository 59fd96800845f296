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

#include <Eigen/Dense>

namespace qnd {

/// Dimensionless configuration of one measurement run. Both condensates hold
/// n_atoms atoms; time is tau = q t / hbar and the loss rates are in units of
/// q / hbar.
struct SystemParams {
  int n_atoms = 20;
  double alpha = 10.0;     // real coherent amplitude of the probe
  double tau = 0.0;
  int n_c = 50;            // photons counted in mode c
  int n_d = 50;            // photons counted in mode d
  double chi_bar = 0.0;    // amplitude attenuation
  double gamma_bar = 0.0;  // phase damping (only the Kraus oracle uses it)

  /// Throws Error(Domain) when an invariant is violated.
  void validate() const;
};

/// Real amplitude grid psi(k1, k2) of the conditional two-condensate state,
/// indexed by the Fock numbers k1, k2 in [0, N].
struct StateAmplitudes {
  Eigen::MatrixXd amplitudes;
  double norm_weight = 1.0;  // outcome probability; 1 for model states

  int n_atoms() const { return static_cast<int>(amplitudes.rows()) - 1; }
};

/// Post-measurement pure state for the photon outcome (n_c, n_d). The
/// amplitudes are L2-normalized; norm_weight is the probability of the
/// outcome. Throws Error(OutcomeImpossible) when that probability is below
/// 1e-300.
StateAmplitudes build_state(const SystemParams& params);

/// Probability of counting (n_c, n_d) photons after the interaction. Never
/// throws for valid inputs; returns 0 on underflow.
double outcome_probability(int n_atoms, double alpha, double tau, int n_c, int n_d);

/// Natural log of outcome_probability; -inf when the outcome cannot occur.
double ln_outcome_probability(int n_atoms, double alpha, double tau, int n_c, int n_d);

/// Outcome probabilities on 0 <= n_c, n_d <= n_max; entry (n_c, n_d).
/// Requires n_max >= alpha^2 + 6 alpha so the truncated mass is below 1e-8.
Eigen::MatrixXd photon_distribution_grid(int n_atoms, double alpha, double tau, int n_max);

/// Gaussian short-time approximation of build_state (|tau| below ~1/sqrt(N)):
/// exp(-[(2k1 - N)^2 + (2k2 - N)^2] / 4N - 4 N_p tau^2 (k1 + k2 - N)^2).
StateAmplitudes hp_approx_state(const SystemParams& params);

/// Long-time limit of hp_approx_state, proportional to
/// exp(-2 (k - N/2)^2 / N) |k>|k>. The Gaussian state itself concentrates on
/// k1 + k2 = N, i.e. this grid with condensate 2 relabelled k -> N - k.
StateAmplitudes epr_limit_state(int n_atoms);

/// Maximally entangled (N+1)^{-1/2} sum_k |k>|k>.
StateAmplitudes epr_state(int n_atoms);

/// |<a|b>|^2 for two real amplitude grids of equal shape.
double overlap_fidelity(const StateAmplitudes& a, const StateAmplitudes& b);

}  // namespace qnd
