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

#include "qnd/state.hpp"

#include "qnd/error.hpp"
#include "qnd/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace qnd {

namespace {

using special::kNegInf;
using special::ln_binomial;
using special::ln_factorial;

constexpr double kImpossibleThreshold = 1e-300;

struct LogAmplitude {
  double log_magnitude;
  int sign;
};

// ln|sqrt(C_N^k1 C_N^k2) sin(M + pi/4)^n_c cos(M + pi/4)^n_d| and its sign,
// with M = (2 k1 + 2 k2 - 2N) tau.
LogAmplitude log_amplitude(int n_atoms, int k1, int k2, double tau, int n_c, int n_d) {
  const double m = (2.0 * k1 + 2.0 * k2 - 2.0 * n_atoms) * tau;
  const double s = std::sin(m + std::numbers::pi / 4.0);
  const double c = std::cos(m + std::numbers::pi / 4.0);
  double log_mag = 0.5 * (ln_binomial(n_atoms, k1) + ln_binomial(n_atoms, k2));
  int sign = 1;
  if (n_c > 0) {
    if (s == 0.0) return {kNegInf, 1};
    log_mag += n_c * std::log(std::abs(s));
    if (s < 0.0 && n_c % 2 != 0) sign = -sign;
  }
  if (n_d > 0) {
    if (c == 0.0) return {kNegInf, 1};
    log_mag += n_d * std::log(std::abs(c));
    if (c < 0.0 && n_d % 2 != 0) sign = -sign;
  }
  return {log_mag, sign};
}

// ln of the Poissonian photon prefactor e^{-alpha^2} alpha^{2(n_c+n_d)} / (n_c! n_d!) 2^{-2N}.
double log_outcome_prefactor(int n_atoms, double alpha, int n_c, int n_d) {
  const int n_photons = n_c + n_d;
  double log_alpha_power = 0.0;
  if (n_photons > 0) {
    if (alpha == 0.0) return kNegInf;
    log_alpha_power = 2.0 * n_photons * std::log(alpha);
  }
  return -alpha * alpha + log_alpha_power - ln_factorial(n_c) - ln_factorial(n_d) -
         2.0 * n_atoms * std::numbers::ln2;
}

double log_sum_exp(const Eigen::MatrixXd& logs) {
  const double top = logs.maxCoeff();
  if (top == kNegInf) return kNegInf;
  return top + std::log((logs.array() - top).exp().sum());
}

std::string describe(const SystemParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "N=" << p.n_atoms << " alpha=" << p.alpha << " tau=" << p.tau << " n_c=" << p.n_c
     << " n_d=" << p.n_d << " chi_bar=" << p.chi_bar;
  return os.str();
}

void normalize(Eigen::MatrixXd& grid) {
  const double norm = grid.norm();
  if (norm > 0.0) grid /= norm;
}

double log_poisson(int n, double mean) {
  if (mean == 0.0) return n == 0 ? 0.0 : kNegInf;
  return n * std::log(mean) - mean - ln_factorial(n);
}

}  // namespace

void SystemParams::validate() const {
  if (n_atoms < 1) throw Error(ErrorKind::Domain, "n_atoms must be >= 1");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::Domain, "alpha must be >= 0");
  if (!std::isfinite(tau)) throw Error(ErrorKind::Domain, "tau must be finite");
  if (n_c < 0 || n_d < 0) throw Error(ErrorKind::Domain, "photon counts must be >= 0");
  if (!(chi_bar >= 0.0) || !std::isfinite(chi_bar)) throw Error(ErrorKind::Domain, "chi_bar must be >= 0");
  if (!(gamma_bar >= 0.0) || !std::isfinite(gamma_bar)) {
    throw Error(ErrorKind::Domain, "gamma_bar must be >= 0");
  }
}

StateAmplitudes build_state(const SystemParams& params) {
  params.validate();
  const int n = params.n_atoms;
  const int d = n + 1;
  Eigen::MatrixXd logs(d, d);
  Eigen::MatrixXi signs(d, d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      const LogAmplitude a = log_amplitude(n, k1, k2, params.tau, params.n_c, params.n_d);
      logs(k1, k2) = a.log_magnitude;
      signs(k1, k2) = a.sign;
    }
  }
  const double log_sum = log_sum_exp(2.0 * logs);
  const double log_weight =
      log_outcome_prefactor(n, params.alpha, params.n_c, params.n_d) + log_sum;
  if (log_sum == kNegInf || !(log_weight >= std::log(kImpossibleThreshold))) {
    throw Error(ErrorKind::OutcomeImpossible,
                "photon outcome has probability below 1e-300 (" + describe(params) + ")");
  }

  StateAmplitudes state;
  state.amplitudes.resize(d, d);
  // Scale by the largest term before exponentiating so nothing underflows.
  const double top = logs.maxCoeff();
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      state.amplitudes(k1, k2) = signs(k1, k2) * std::exp(logs(k1, k2) - top);
    }
  }
  normalize(state.amplitudes);
  state.norm_weight = std::exp(log_weight);
  return state;
}

double ln_outcome_probability(int n_atoms, double alpha, double tau, int n_c, int n_d) {
  SystemParams p;
  p.n_atoms = n_atoms;
  p.alpha = alpha;
  p.tau = tau;
  p.n_c = n_c;
  p.n_d = n_d;
  p.validate();
  const int d = n_atoms + 1;
  Eigen::MatrixXd logs(d, d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) logs(k1, k2) = 2.0 * log_amplitude(n_atoms, k1, k2, tau, n_c, n_d).log_magnitude;
  }
  const double prefactor = log_outcome_prefactor(n_atoms, alpha, n_c, n_d);
  if (prefactor == kNegInf) return kNegInf;
  return prefactor + log_sum_exp(logs);
}

double outcome_probability(int n_atoms, double alpha, double tau, int n_c, int n_d) {
  return std::exp(ln_outcome_probability(n_atoms, alpha, tau, n_c, n_d));
}

Eigen::MatrixXd photon_distribution_grid(int n_atoms, double alpha, double tau, int n_max) {
  SystemParams p;
  p.n_atoms = n_atoms;
  p.alpha = alpha;
  p.tau = tau;
  p.validate();
  if (n_max < 0 || static_cast<double>(n_max) < alpha * alpha + 6.0 * alpha) {
    throw Error(ErrorKind::Domain, "photon_distribution_grid: n_max must be >= alpha^2 + 6 alpha");
  }
  // The amplitude depends on (k1, k2) only through s = k1 + k2, and
  // sum_{k1+k2=s} C_N^k1 C_N^k2 = C_{2N}^s.
  const int two_n = 2 * n_atoms;
  Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
  Eigen::VectorXd log_pc(n_max + 1);
  Eigen::VectorXd log_pd(n_max + 1);
  const double mean_total = alpha * alpha;
  for (int s = 0; s <= two_n; ++s) {
    const double log_w = ln_binomial(two_n, s) - two_n * std::numbers::ln2;
    const double m = (2.0 * s - two_n) * tau;
    const double sin2 = std::pow(std::sin(m + std::numbers::pi / 4.0), 2);
    const double cos2 = std::pow(std::cos(m + std::numbers::pi / 4.0), 2);
    for (int n = 0; n <= n_max; ++n) {
      log_pc(n) = log_poisson(n, mean_total * sin2);
      log_pd(n) = log_poisson(n, mean_total * cos2);
    }
    for (int nc = 0; nc <= n_max; ++nc) {
      if (log_pc(nc) == kNegInf) continue;
      for (int nd = 0; nd <= n_max; ++nd) {
        grid(nc, nd) += std::exp(log_w + log_pc(nc) + log_pd(nd));
      }
    }
  }
  return grid;
}

StateAmplitudes hp_approx_state(const SystemParams& params) {
  params.validate();
  const int n = params.n_atoms;
  const int d = n + 1;
  const double n_photons = params.n_c + params.n_d;
  StateAmplitudes state;
  state.amplitudes.resize(d, d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      const double a = 2.0 * k1 - n;
      const double b = 2.0 * k2 - n;
      const double s = k1 + k2 - n;
      // (cos 2M / 2)^{N_p/2} ~ exp(-4 N_p tau^2 s^2) for the amplitude.
      state.amplitudes(k1, k2) = std::exp(-(a * a + b * b) / (4.0 * n) -
                                          4.0 * n_photons * params.tau * params.tau * s * s);
    }
  }
  normalize(state.amplitudes);
  return state;
}

StateAmplitudes epr_limit_state(int n_atoms) {
  if (n_atoms < 1) throw Error(ErrorKind::Domain, "n_atoms must be >= 1");
  const int d = n_atoms + 1;
  StateAmplitudes state;
  state.amplitudes = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double x = k - 0.5 * n_atoms;
    state.amplitudes(k, k) = std::exp(-2.0 * x * x / n_atoms);
  }
  normalize(state.amplitudes);
  return state;
}

StateAmplitudes epr_state(int n_atoms) {
  if (n_atoms < 1) throw Error(ErrorKind::Domain, "n_atoms must be >= 1");
  const int d = n_atoms + 1;
  StateAmplitudes state;
  state.amplitudes = Eigen::MatrixXd::Identity(d, d) / std::sqrt(static_cast<double>(d));
  return state;
}

double overlap_fidelity(const StateAmplitudes& a, const StateAmplitudes& b) {
  if (a.amplitudes.rows() != b.amplitudes.rows() || a.amplitudes.cols() != b.amplitudes.cols()) {
    throw Error(ErrorKind::Domain, "overlap_fidelity: shape mismatch");
  }
  const double o = (a.amplitudes.array() * b.amplitudes.array()).sum();
  return o * o;
}

}  // namespace qnd
