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

#include "qnd/photon_loss.hpp"

#include "qnd/error.hpp"
#include "qnd/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace qnd {

using cplx = std::complex<double>;
using special::kNegInf;
using special::ln_binomial;
using special::ln_factorial;

AtomDensityMatrix::AtomDensityMatrix(int n_atoms, Eigen::MatrixXcd entries, double trace_weight)
    : n_atoms_(n_atoms), entries_(std::move(entries)), trace_weight_(trace_weight) {
  const Eigen::Index d2 = static_cast<Eigen::Index>(n_atoms + 1) * (n_atoms + 1);
  if (n_atoms < 1 || entries_.rows() != d2 || entries_.cols() != d2) {
    throw Error(ErrorKind::Domain, "AtomDensityMatrix: entries must be (N+1)^2 x (N+1)^2");
  }
}

AtomDensityMatrix AtomDensityMatrix::from_pure(const StateAmplitudes& psi) {
  const int n = psi.n_atoms();
  const int d = n + 1;
  Eigen::VectorXd v(d * d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) v(k1 * d + k2) = psi.amplitudes(k1, k2);
  }
  return AtomDensityMatrix(n, (v * v.transpose()).cast<cplx>(), psi.norm_weight);
}

double AtomDensityMatrix::hermiticity_defect() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

void AtomDensityMatrix::require_hermitian(double tol) const {
  const double defect = hermiticity_defect();
  if (!(defect <= tol)) {
    throw Error(ErrorKind::Integrity,
                "density matrix is not Hermitian (max defect " + std::to_string(defect) + ")");
  }
}

void AtomDensityMatrix::normalize() {
  const double t = entries_.trace().real();
  if (!(t > 0.0)) throw Error(ErrorKind::Numerical, "density matrix has non-positive trace");
  entries_ /= t;
}

double photons_remaining(double chi_bar, double tau, double alpha) {
  return std::exp(-2.0 * chi_bar * tau) * alpha * alpha;
}

double decoherence_factor(double upsilon, const SystemParams& params) {
  const double attenuation = params.chi_bar * params.tau;
  const double lost_fraction = -std::expm1(-2.0 * attenuation);
  return std::exp(-2.0 * attenuation * (params.n_c + params.n_d) +
                  lost_fraction * params.alpha * params.alpha * std::cos(upsilon));
}

double decoherence_ratio(double upsilon, const SystemParams& params) {
  const double lost_fraction = -std::expm1(-2.0 * params.chi_bar * params.tau);
  return std::exp(lost_fraction * params.alpha * params.alpha * (std::cos(upsilon) - 1.0));
}

AtomDensityMatrix apply_photon_loss(const SystemParams& params) {
  return apply_photon_loss(build_state(params), params);
}

AtomDensityMatrix apply_photon_loss(const StateAmplitudes& psi, const SystemParams& params) {
  params.validate();
  if (params.chi_bar > 0.0 && params.tau < 0.0) {
    throw Error(ErrorKind::Domain, "apply_photon_loss: loss requires tau >= 0");
  }
  const int n = psi.n_atoms();
  if (n != params.n_atoms) throw Error(ErrorKind::Domain, "apply_photon_loss: N mismatch");
  const int d = n + 1;

  // The factor depends on the indices only through s - s', s = k1 + k2.
  std::vector<double> ratio(static_cast<std::size_t>(4 * n + 1));
  for (int diff = -2 * n; diff <= 2 * n; ++diff) {
    ratio[static_cast<std::size_t>(diff + 2 * n)] = decoherence_ratio(2.0 * diff * params.tau, params);
  }

  Eigen::MatrixXcd rho(d * d, d * d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      const double a = psi.amplitudes(k1, k2);
      const int row = k1 * d + k2;
      for (int k1p = 0; k1p < d; ++k1p) {
        for (int k2p = 0; k2p < d; ++k2p) {
          const int diff = k1 + k2 - k1p - k2p;
          rho(row, k1p * d + k2p) =
              a * psi.amplitudes(k1p, k2p) * ratio[static_cast<std::size_t>(diff + 2 * n)];
        }
      }
    }
  }
  const double joint_probability = psi.norm_weight * decoherence_factor(0.0, params);
  AtomDensityMatrix out(n, std::move(rho), joint_probability);
  out.normalize();
  return out;
}

namespace {

constexpr double kKrausTermThreshold = 1e-14;
constexpr double kTailThreshold = 1e-8;
constexpr int kMaxDampingTerms = 200000;

// Poisson(mean) mass above cutoff.
double poisson_tail(double mean, int cutoff) {
  if (mean == 0.0) return 0.0;
  double cdf = 0.0;
  for (int n = 0; n <= cutoff; ++n) cdf += std::exp(n * std::log(mean) - mean - ln_factorial(n));
  return std::max(0.0, 1.0 - cdf);
}

Eigen::VectorXcd coherent_amplitudes(cplx beta, int dim) {
  Eigen::VectorXcd c(dim);
  c(0) = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * beta / std::sqrt(static_cast<double>(n));
  return c;
}

// One mode's Kraus operators M_{l,m} = D_{l,m}(a^dagger a) a^l with
//   D_{l,m}(n) = sqrt((1-eta)^l / l! (2 g)^m / m!) n^m e^{-g n^2 - x n},
// g = gamma_bar tau, x = chi_bar tau, eta = e^{-2x}.
class ModeKraus {
 public:
  ModeKraus(double chi_tau, double gamma_tau, int dim)
      : chi_tau_(chi_tau), gamma_tau_(gamma_tau), dim_(dim) {
    lost_fraction_ = -std::expm1(-2.0 * chi_tau);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    lowering_powers_.push_back(Eigen::MatrixXd::Identity(dim, dim));
    for (int l = 1; l < dim; ++l) lowering_powers_.push_back(lowering_powers_.back() * a);
  }

  // ln|D_{l,m}(n)|; kNegInf when the factor vanishes.
  double log_diagonal(int l, int m, int n) const {
    double v = 0.0;
    if (l > 0) {
      if (lost_fraction_ == 0.0) return kNegInf;
      v += 0.5 * (l * std::log(lost_fraction_) - ln_factorial(l));
    }
    if (m > 0) {
      if (gamma_tau_ == 0.0 || n == 0) return kNegInf;
      v += 0.5 * (m * std::log(2.0 * gamma_tau_) - ln_factorial(m)) + m * std::log(static_cast<double>(n));
    }
    return v - gamma_tau_ * n * n - chi_tau_ * n;
  }

  // Peak of the m-series for output occupation n.
  double damping_mode(int n) const { return 2.0 * gamma_tau_ * n * n; }

  Eigen::MatrixXd kraus_operator(int l, int m) const {
    Eigen::VectorXd diag(dim_);
    for (int n = 0; n < dim_; ++n) {
      const double lg = log_diagonal(l, m, n);
      diag(n) = lg == kNegInf ? 0.0 : std::exp(lg);
    }
    return diag.asDiagonal() * lowering_powers_[static_cast<std::size_t>(l)];
  }

  // Row `n` of every Kraus operator whose row norm exceeds the threshold.
  std::vector<Eigen::VectorXd> projected_rows(int n) const {
    std::vector<Eigen::VectorXd> rows;
    for (int l = 0; n + l < dim_; ++l) {
      for (int m = 0; m < kMaxDampingTerms; ++m) {
        const double lg = log_diagonal(l, m, n);
        if (lg == kNegInf) break;
        const double row_log_norm = lg + 0.5 * (ln_factorial(n + l) - ln_factorial(n));
        if (row_log_norm < std::log(kKrausTermThreshold)) {
          if (m > damping_mode(n)) break;
          continue;
        }
        rows.push_back(kraus_operator(l, m).row(n).transpose());
      }
    }
    return rows;
  }

  // max_n |sum_{l,m} (M^dagger M)(n, n) - 1| over the truncated space.
  double completeness_defect() const {
    double worst = 0.0;
    for (int n = 0; n < dim_; ++n) {
      double total = 0.0;
      for (int l = 0; l <= n; ++l) {
        const int out = n - l;
        const double log_lower = ln_factorial(n) - ln_factorial(out);
        for (int m = 0; m < kMaxDampingTerms; ++m) {
          const double lg = log_diagonal(l, m, out);
          if (lg == kNegInf) break;
          const double term = std::exp(2.0 * lg + log_lower);
          total += term;
          if (m > damping_mode(out) && term < kKrausTermThreshold * kKrausTermThreshold) break;
        }
      }
      worst = std::max(worst, std::abs(total - 1.0));
    }
    return worst;
  }

 private:
  double chi_tau_;
  double gamma_tau_;
  int dim_;
  double lost_fraction_ = 0.0;
  std::vector<Eigen::MatrixXd> lowering_powers_;
};

}  // namespace

AtomDensityMatrix kraus_oracle(const SystemParams& params, int photon_cutoff) {
  params.validate();
  if (params.tau < 0.0) throw Error(ErrorKind::Domain, "kraus_oracle: requires tau >= 0");
  const double mean = params.alpha * params.alpha;
  if (photon_cutoff < std::max(params.n_c, params.n_d) ||
      static_cast<double>(photon_cutoff) < mean + 6.0 * params.alpha) {
    throw Error(ErrorKind::Configuration,
                "kraus_oracle: photon cutoff must be >= alpha^2 + 6 alpha and >= n_c, n_d");
  }
  if (poisson_tail(mean, photon_cutoff) > kTailThreshold) {
    throw Error(ErrorKind::Configuration, "kraus_oracle: photon cutoff leaves Poisson tail > 1e-8");
  }

  const int n = params.n_atoms;
  const int d = n + 1;
  const int atoms = d * d;
  const int p = photon_cutoff + 1;

  // Atom-light state after the interaction and the beam splitter: every
  // atomic component |k1, k2> carries coherent light in modes c and d.
  // Inverting c = (a1 + i a2)/sqrt2, d = -(i a1 + a2)/sqrt2 gives
  //   a1^dag = (c^dag + i d^dag)/sqrt2,  a2^dag = (-i c^dag - d^dag)/sqrt2.
  std::vector<Eigen::MatrixXcd> light(static_cast<std::size_t>(atoms));
  const cplx i(0.0, 1.0);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      const double phase = (2.0 * k1 + 2.0 * k2 - 2.0 * n) * params.tau;
      const cplx a1 = params.alpha / std::numbers::sqrt2 * std::exp(-i * phase);
      const cplx a2 = params.alpha / std::numbers::sqrt2 * std::exp(i * phase);
      const cplx beta_c = (a1 - i * a2) / std::numbers::sqrt2;
      const cplx beta_d = (i * a1 - a2) / std::numbers::sqrt2;
      const double weight =
          std::exp(0.5 * (ln_binomial(n, k1) + ln_binomial(n, k2)) - n * std::numbers::ln2);
      light[static_cast<std::size_t>(k1 * d + k2)] =
          weight * coherent_amplitudes(beta_c, p) * coherent_amplitudes(beta_d, p).transpose();
    }
  }

  const ModeKraus kraus(params.chi_bar * params.tau, params.gamma_bar * params.tau, p);
  const double defect = kraus.completeness_defect();
  if (defect > 1e-10) {
    throw Error(ErrorKind::Numerical,
                "kraus_oracle: truncated Kraus set is incomplete (defect " + std::to_string(defect) + ")");
  }

  const std::vector<Eigen::VectorXd> rows_c = kraus.projected_rows(params.n_c);
  const std::vector<Eigen::VectorXd> rows_d = kraus.projected_rows(params.n_d);

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(atoms, atoms);
  Eigen::MatrixXcd contracted(p, atoms);
  Eigen::VectorXcd amplitude(atoms);
  for (const Eigen::VectorXd& rd : rows_d) {
    for (int a = 0; a < atoms; ++a) contracted.col(a) = light[static_cast<std::size_t>(a)] * rd;
    for (const Eigen::VectorXd& rc : rows_c) {
      amplitude = contracted.transpose() * rc;
      rho.noalias() += amplitude * amplitude.adjoint();
    }
  }
  const double trace = rho.trace().real();
  if (!(trace > 0.0)) {
    throw Error(ErrorKind::OutcomeImpossible, "kraus_oracle: projected state has zero weight");
  }
  AtomDensityMatrix out(n, std::move(rho), trace);
  out.normalize();
  return out;
}

}  // namespace qnd
