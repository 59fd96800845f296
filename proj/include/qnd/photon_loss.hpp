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

#include "qnd/state.hpp"

#include <Eigen/Dense>

#include <complex>

namespace qnd {

/// Density matrix of the two condensates, rho(k1, k2, k1', k2').
///
/// Stored as a (N+1)^2 x (N+1)^2 matrix with row index k1 (N+1) + k2 and
/// column index k1' (N+1) + k2'.
class AtomDensityMatrix {
 public:
  AtomDensityMatrix() = default;

  /// Wraps raw entries without validation. trace_weight is the trace before
  /// normalization (the joint probability of the conditioning events).
  AtomDensityMatrix(int n_atoms, Eigen::MatrixXcd entries, double trace_weight = 1.0);

  /// |psi><psi| with trace_weight = psi.norm_weight.
  static AtomDensityMatrix from_pure(const StateAmplitudes& psi);

  int n_atoms() const { return n_atoms_; }
  int dim() const { return n_atoms_ + 1; }
  double trace_weight() const { return trace_weight_; }

  const Eigen::MatrixXcd& matrix() const { return entries_; }
  Eigen::MatrixXcd& matrix() { return entries_; }

  std::complex<double> operator()(int k1, int k2, int k1p, int k2p) const {
    return entries_(k1 * dim() + k2, k1p * dim() + k2p);
  }
  std::complex<double>& operator()(int k1, int k2, int k1p, int k2p) {
    return entries_(k1 * dim() + k2, k1p * dim() + k2p);
  }

  std::complex<double> trace() const { return entries_.trace(); }

  /// Largest |rho - rho^dagger| entry.
  double hermiticity_defect() const;

  /// Throws Error(Integrity) if hermiticity_defect() exceeds tol.
  void require_hermitian(double tol = 1e-10) const;

  /// Rescales to unit trace; trace_weight is left unchanged.
  void normalize();

 private:
  int n_atoms_ = 0;
  Eigen::MatrixXcd entries_;
  double trace_weight_ = 1.0;
};

/// Closed-form photon-loss factor
///   L(u) = exp[-2 chi tau (n_c + n_d)] exp[(1 - e^{-2 chi tau}) alpha^2 cos u].
double decoherence_factor(double upsilon, const SystemParams& params);

/// L(u) / L(0) = exp[(1 - e^{-2 chi tau}) alpha^2 (cos u - 1)].
double decoherence_ratio(double upsilon, const SystemParams& params);

/// Conditional two-condensate state after the photon-loss channel, using the
/// closed-form factor. Normalized to unit trace; trace_weight is the joint
/// probability of the photon outcome with loss, P(n_c, n_d) L(0).
AtomDensityMatrix apply_photon_loss(const SystemParams& params);

/// Same, reusing an already built pure state for params.
AtomDensityMatrix apply_photon_loss(const StateAmplitudes& psi, const SystemParams& params);

/// Brute-force reference for apply_photon_loss.
///
/// Builds the full atom-light state on a truncated two-mode Fock space
/// (0..photon_cutoff photons per mode), applies the Kraus operators for
/// amplitude attenuation and phase damping to modes c and d, projects on
/// |n_c, n_d> and normalizes. Only practical for small N and alpha.
/// Throws Error(Configuration) when the cutoff leaves more than 1e-8
/// coherent-state mass outside the truncated space.
AtomDensityMatrix kraus_oracle(const SystemParams& params, int photon_cutoff);

/// Mean photon number left after attenuation: e^{-2 chi tau} alpha^2.
double photons_remaining(double chi_bar, double tau, double alpha);

}  // namespace qnd
