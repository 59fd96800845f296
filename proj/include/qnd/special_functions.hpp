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

#include <complex>
#include <compare>
#include <cstdint>
#include <limits>
#include <vector>

namespace qnd::special {

/// Angular-momentum quantum number stored as twice its value, so j = 1/2
/// and m = -3/2 are exact.
struct HalfInteger {
  int twice = 0;

  static constexpr HalfInteger from_twice(int t) { return HalfInteger{t}; }
  static constexpr HalfInteger whole(int v) { return HalfInteger{2 * v}; }

  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }

  friend constexpr auto operator<=>(HalfInteger, HalfInteger) = default;
  friend constexpr HalfInteger operator+(HalfInteger a, HalfInteger b) { return {a.twice + b.twice}; }
  friend constexpr HalfInteger operator-(HalfInteger a, HalfInteger b) { return {a.twice - b.twice}; }
  friend constexpr HalfInteger operator-(HalfInteger a) { return {-a.twice}; }
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// ln(n!). Tabulated with compensated summation up to 10^4, lgamma beyond.
double ln_factorial(int n);

/// ln C(n, k); kNegInf when k < 0 or k > n. Symmetric in k <-> n-k bit for bit.
double ln_binomial(int n, int k);

/// Accumulates an alternating sum of terms given as (ln|t|, sign).
///
/// Terms are rescaled against the largest log-magnitude seen and summed with
/// Neumaier compensation. cancellation() reports sum|t| / |sum t|, which is
/// the factor by which rounding errors are amplified.
class SignedLogSum {
 public:
  void add(double log_magnitude, int sign);

  double value() const;
  double cancellation() const;
  bool empty() const { return terms_.empty(); }

 private:
  struct Term {
    double log_magnitude;
    int sign;
  };
  std::vector<Term> terms_;
  double max_log_ = kNegInf;
};

/// Cancellation ratio above which an alternating sum raises the warning flag.
inline constexpr double kCancellationWarning = 1e6;

/// Number of alternating sums (Racah, d-matrix) whose cancellation exceeded
/// kCancellationWarning since process start or the last reset.
std::uint64_t cancellation_warnings();
void reset_cancellation_warnings();

/// <j1 m1; j2 m2 | J M> from the Racah closed form, evaluated in the log
/// domain. Zero when selection rules or the triangle condition fail.
/// Memoized; safe to call concurrently.
double clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2,
                      HalfInteger J, HalfInteger M);

/// Orthonormal spherical harmonic with the Condon-Shortley phase.
/// Throws Error(Domain) when |q| > l or l < 0.
std::complex<double> spherical_harmonic(int l, int q, double theta, double phi);

/// Fully normalized associated Legendre values Pbar_l^m(cos theta) for
/// 0 <= m <= l <= l_max, laid out so that Y_l^m(theta, phi) = Pbar * e^{i m phi}.
/// Index with legendre_index(l, m).
std::vector<double> normalized_legendre_table(int l_max, double theta);
constexpr int legendre_index(int l, int m) { return l * (l + 1) / 2 + m; }

/// <k| exp(-i S^y theta / 2) |k'> on the Fock basis of N atoms, where S^y is
/// the Schwinger-boson operator (eigenvalues 2k - N).
double sy_rotation_element(int n_atoms, int k, int k_prime, double theta);

/// <k| exp(-i S^x theta / 2) |k'> = i^{k - k'} <k| exp(-i S^y theta / 2) |k'>.
std::complex<double> sx_rotation_element(int n_atoms, int k, int k_prime, double theta);

Eigen::MatrixXd sy_rotation_matrix(int n_atoms, double theta);
Eigen::MatrixXcd sx_rotation_matrix(int n_atoms, double theta);

}  // namespace qnd::special
