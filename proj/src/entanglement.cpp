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

#include "qnd/entanglement.hpp"

#include "qnd/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace qnd {

namespace {

constexpr double kEigenClamp = 1e-12;
constexpr double kDgczFloor = 1e-9;
constexpr double kSteerFloor = 1e-12;
constexpr double kMeanSpinFloor = 1e-9;
constexpr int kZetaScan = 720;

template <typename Solver>
double trace_norm(const Solver& solver) {
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "log_negativity: eigensolver did not converge");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double ev = solver.eigenvalues()(i);
    if (std::abs(ev) >= kEigenClamp) sum += std::abs(ev);
  }
  return sum;
}

}  // namespace

AtomDensityMatrix partial_transpose(const AtomDensityMatrix& rho) {
  const int d = rho.dim();
  Eigen::MatrixXcd out(d * d, d * d);
  for (int k1 = 0; k1 < d; ++k1) {
    for (int k2 = 0; k2 < d; ++k2) {
      for (int k1p = 0; k1p < d; ++k1p) {
        for (int k2p = 0; k2p < d; ++k2p) out(k1 * d + k2, k1p * d + k2p) = rho(k1, k2p, k1p, k2);
      }
    }
  }
  return AtomDensityMatrix(rho.n_atoms(), std::move(out), rho.trace_weight());
}

LogNegativity log_negativity(const AtomDensityMatrix& rho) {
  rho.require_hermitian(1e-10);
  const AtomDensityMatrix pt = partial_transpose(rho);
  const Eigen::MatrixXcd& m = pt.matrix();
  double norm = 0.0;
  try {
    if (m.imag().cwiseAbs().maxCoeff() == 0.0) {
      const Eigen::MatrixXd re = m.real();
      norm = trace_norm(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(re, Eigen::EigenvaluesOnly));
    } else {
      norm = trace_norm(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly));
    }
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << e.what() << " (N = " << rho.n_atoms() << ", trace weight " << rho.trace_weight() << ")";
    throw Error(ErrorKind::Numerical, msg.str());
  }
  LogNegativity out;
  out.value = std::max(0.0, std::log2(norm));
  out.normalized = out.value / std::log2(static_cast<double>(rho.dim()));
  return out;
}

double epr_fidelity(const AtomDensityMatrix& rho) {
  const int d = rho.dim();
  std::complex<double> sum = 0.0;
  for (int k = 0; k < d; ++k) {
    for (int kp = 0; kp < d; ++kp) sum += rho(k, k, kp, kp);
  }
  return sum.real() / d;
}

double criterion_ht(const AtomDensityMatrix& rho) {
  const double total = joint_variance(rho, JointOperator::XMinusX) +
                       joint_variance(rho, JointOperator::YMinusY) +
                       joint_variance(rho, JointOperator::ZPlusZ);
  return total / (4.0 * rho.n_atoms());
}

std::optional<double> criterion_dgcz(const AtomDensityMatrix& rho) {
  const double denom = 2.0 * (std::abs(expectation(rho, Bec::First, SpinAxis::X)) +
                              std::abs(expectation(rho, Bec::Second, SpinAxis::X)));
  if (denom < kDgczFloor) return std::nullopt;
  return (joint_variance(rho, JointOperator::YMinusY) + joint_variance(rho, JointOperator::ZPlusZ)) / denom;
}

std::optional<double> criterion_steering(const AtomDensityMatrix& rho) {
  const double sx = expectation(rho, Bec::First, SpinAxis::X);
  if (sx * sx < kSteerFloor) return std::nullopt;
  return joint_variance(rho, JointOperator::YMinusY) * joint_variance(rho, JointOperator::ZPlusZ) / (sx * sx);
}

std::optional<PerpendicularVariance> min_perpendicular_variance(const SpinMoments& moments,
                                                                SqueezingScope scope) {
  const bool collective = scope == SqueezingScope::Collective;
  const Eigen::Vector3d mean = collective ? moments.collective_mean() : moments.mean1;
  const Eigen::Matrix3d cov = collective ? moments.collective_covariance() : moments.single_covariance(Bec::First);
  const double length = mean.norm();
  if (length < kMeanSpinFloor) return std::nullopt;

  PerpendicularVariance out;
  out.mean_length = length;
  out.theta = std::acos(std::clamp(mean.z() / length, -1.0, 1.0));
  out.phi = std::atan2(mean.y(), mean.x());
  const double ct = std::cos(out.theta);
  const double st = std::sin(out.theta);
  const double cp = std::cos(out.phi);
  const double sp = std::sin(out.phi);
  const Eigen::Vector3d n1(-sp, cp, 0.0);
  const Eigen::Vector3d n2(-ct * cp, -ct * sp, st);

  const double a = n1.dot(cov * n1);
  const double b = n2.dot(cov * n2);
  const double c = 2.0 * n1.dot(cov * n2);
  out.var_y = a;
  out.var_n2 = b;
  out.zeta_opt = 0.5 * (std::numbers::pi + std::atan2(c, a - b));
  auto var_at = [&](double zeta) {
    const double cz = std::cos(zeta);
    const double sz = std::sin(zeta);
    return a * cz * cz + b * sz * sz + c * sz * cz;
  };
  out.var_min = var_at(out.zeta_opt);

  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  for (int i = 0; i < kZetaScan; ++i) {
    const double zeta = std::numbers::pi * i / kZetaScan;
    if (var_at(zeta) < out.var_min - 1e-9 * scale) {
      throw Error(ErrorKind::Numerical, "min_perpendicular_variance: optimal angle is not a minimum");
    }
  }
  return out;
}

std::optional<PerpendicularVariance> min_perpendicular_variance(const AtomDensityMatrix& rho,
                                                                SqueezingScope scope) {
  return min_perpendicular_variance(spin_moments(rho), scope);
}

std::optional<double> criterion_wineland(const AtomDensityMatrix& rho, SqueezingScope scope) {
  const auto pv = min_perpendicular_variance(rho, scope);
  if (!pv) return std::nullopt;
  return 2.0 * pv->var_min / pv->mean_length;
}

CriterionReport evaluate_criteria(const AtomDensityMatrix& rho, const SystemParams& params,
                                  SqueezingScope scope) {
  CriterionReport r;
  r.tau = params.tau;
  r.chi_bar = params.chi_bar;
  const LogNegativity ln = log_negativity(rho);
  r.log_negativity = ln.value;
  r.log_negativity_normalized = ln.normalized;
  r.epr_fidelity = epr_fidelity(rho);
  r.c_ent = criterion_ht(rho);
  r.c_dgcz = criterion_dgcz(rho);
  r.c_steer_1to2 = criterion_steering(rho);
  if (const auto pv = min_perpendicular_variance(rho, scope)) {
    r.xi_squared = 2.0 * pv->var_min / pv->mean_length;
    r.xi_squared_half = pv->var_min / pv->mean_length;
    r.zeta_opt = pv->zeta_opt;
    r.mean_theta = pv->theta;
    r.mean_phi = pv->phi;
  }
  return r;
}

}  // namespace qnd
