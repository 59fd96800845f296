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

#include "qnd/special_functions.hpp"

#include "qnd/error.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <unordered_map>

namespace qnd::special {

namespace {

constexpr int kFactorialTableSize = 10001;

const std::vector<double>& factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kFactorialTableSize);
    double sum = 0.0;
    double comp = 0.0;
    t[0] = 0.0;
    for (int i = 1; i < kFactorialTableSize; ++i) {
      // Kahan summation of ln(i).
      const double y = std::log(static_cast<double>(i)) - comp;
      const double s = sum + y;
      comp = (s - sum) - y;
      sum = s;
      t[i] = sum;
    }
    return t;
  }();
  return table;
}

std::atomic<std::uint64_t> g_cancellation_warnings{0};

void note_cancellation(const SignedLogSum& sum) {
  if (!sum.empty() && sum.cancellation() > kCancellationWarning) {
    g_cancellation_warnings.fetch_add(1, std::memory_order_relaxed);
  }
}

// ln|x| and sign(x) raised to an integer power; exponent 0 yields ln 1 = 0.
struct PowerTerm {
  double log_magnitude;
  int sign;
};

PowerTerm signed_power(double x, int exponent) {
  if (exponent == 0) return {0.0, 1};
  if (x == 0.0) return {kNegInf, 1};
  const int sign = (x < 0.0 && exponent % 2 != 0) ? -1 : 1;
  return {exponent * std::log(std::abs(x)), sign};
}

struct CgKey {
  std::array<int, 6> twice;
  bool operator==(const CgKey&) const = default;
};

struct CgKeyHash {
  std::size_t operator()(const CgKey& key) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : key.twice) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

class CgMemo {
 public:
  bool find(const CgKey& key, double& out) const {
    std::shared_lock lock(mutex_);
    auto it = table_.find(key);
    if (it == table_.end()) return false;
    out = it->second;
    return true;
  }
  void insert(const CgKey& key, double value) {
    std::unique_lock lock(mutex_);
    table_.emplace(key, value);
  }

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<CgKey, double, CgKeyHash> table_;
};

CgMemo& cg_memo() {
  static CgMemo memo;
  return memo;
}

double racah_clebsch_gordan(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tj1 < 0 || tj2 < 0 || tJ < 0) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
  if (tm1 + tm2 != tM) return 0.0;
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tJ + tM) % 2 != 0) return 0.0;
  if ((tj1 + tj2 + tJ) % 2 != 0) return 0.0;
  if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2) return 0.0;

  const int j1_plus_j2_minus_J = (tj1 + tj2 - tJ) / 2;
  const int J_plus_j1_minus_j2 = (tJ + tj1 - tj2) / 2;
  const int J_minus_j1_plus_j2 = (tJ - tj1 + tj2) / 2;
  const int j1_plus_j2_plus_J = (tj1 + tj2 + tJ) / 2;
  const int j1_minus_m1 = (tj1 - tm1) / 2;
  const int j1_plus_m1 = (tj1 + tm1) / 2;
  const int j2_minus_m2 = (tj2 - tm2) / 2;
  const int j2_plus_m2 = (tj2 + tm2) / 2;
  const int J_minus_m = (tJ - tM) / 2;
  const int J_plus_m = (tJ + tM) / 2;
  const int J_minus_j2_plus_m1 = (tJ - tj2 + tm1) / 2;
  const int J_minus_j1_minus_m2 = (tJ - tj1 - tm2) / 2;

  const double log_prefactor =
      0.5 * (std::log(tJ + 1.0) + ln_factorial(J_plus_j1_minus_j2) +
             ln_factorial(J_minus_j1_plus_j2) + ln_factorial(j1_plus_j2_minus_J) -
             ln_factorial(j1_plus_j2_plus_J + 1) + ln_factorial(J_plus_m) +
             ln_factorial(J_minus_m) + ln_factorial(j1_minus_m1) + ln_factorial(j1_plus_m1) +
             ln_factorial(j2_minus_m2) + ln_factorial(j2_plus_m2));

  const int k_min = std::max({0, -J_minus_j2_plus_m1, -J_minus_j1_minus_m2});
  const int k_max = std::min({j1_plus_j2_minus_J, j1_minus_m1, j2_plus_m2});

  SignedLogSum sum;
  for (int k = k_min; k <= k_max; ++k) {
    const double log_denominator =
        ln_factorial(k) + ln_factorial(j1_plus_j2_minus_J - k) + ln_factorial(j1_minus_m1 - k) +
        ln_factorial(j2_plus_m2 - k) + ln_factorial(J_minus_j2_plus_m1 + k) +
        ln_factorial(J_minus_j1_minus_m2 + k);
    sum.add(log_prefactor - log_denominator, (k % 2 == 0) ? 1 : -1);
  }
  note_cancellation(sum);
  return sum.value();
}

}  // namespace

double ln_factorial(int n) {
  if (n < 0) throw Error(ErrorKind::Domain, "ln_factorial: negative argument " + std::to_string(n));
  if (n < kFactorialTableSize) return factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double ln_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return kNegInf;
  const int lo = std::min(k, n - k);
  const int hi = std::max(k, n - k);
  return ln_factorial(n) - (ln_factorial(lo) + ln_factorial(hi));
}

void SignedLogSum::add(double log_magnitude, int sign) {
  if (log_magnitude == kNegInf || sign == 0) return;
  terms_.push_back({log_magnitude, sign > 0 ? 1 : -1});
  max_log_ = std::max(max_log_, log_magnitude);
}

double SignedLogSum::value() const {
  if (terms_.empty()) return 0.0;
  double sum = 0.0;
  double comp = 0.0;
  for (const Term& t : terms_) {
    const double x = t.sign * std::exp(t.log_magnitude - max_log_);
    const double s = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - s) + x;
    } else {
      comp += (x - s) + sum;
    }
    sum = s;
  }
  return (sum + comp) * std::exp(max_log_);
}

double SignedLogSum::cancellation() const {
  if (terms_.empty()) return 1.0;
  double total = 0.0;
  for (const Term& t : terms_) total += std::exp(t.log_magnitude - max_log_);
  const double v = std::abs(value()) * std::exp(-max_log_);
  if (v == 0.0) return std::numeric_limits<double>::infinity();
  return total / v;
}

std::uint64_t cancellation_warnings() {
  return g_cancellation_warnings.load(std::memory_order_relaxed);
}

void reset_cancellation_warnings() { g_cancellation_warnings.store(0, std::memory_order_relaxed); }

double clebsch_gordan(HalfInteger j1, HalfInteger m1, HalfInteger j2, HalfInteger m2,
                      HalfInteger J, HalfInteger M) {
  if (m1.twice + m2.twice != M.twice) return 0.0;
  const CgKey key{{j1.twice, m1.twice, j2.twice, m2.twice, J.twice, M.twice}};
  double value = 0.0;
  if (cg_memo().find(key, value)) return value;
  value = racah_clebsch_gordan(j1.twice, m1.twice, j2.twice, m2.twice, J.twice, M.twice);
  cg_memo().insert(key, value);
  return value;
}

std::vector<double> normalized_legendre_table(int l_max, double theta) {
  if (l_max < 0) throw Error(ErrorKind::Domain, "normalized_legendre_table: negative l_max");
  std::vector<double> table(static_cast<std::size_t>(legendre_index(l_max, l_max) + 1), 0.0);
  const double x = std::cos(theta);
  const double sin_theta = std::abs(std::sin(theta));
  const double log_sin = sin_theta > 0.0 ? std::log(sin_theta) : kNegInf;
  const double log_4pi = std::log(4.0 * std::numbers::pi);

  for (int m = 0; m <= l_max; ++m) {
    // Pbar_m^m = (-1)^m sqrt((2m+1)/(4 pi) (2m)! / (4^m (m!)^2)) sin^m(theta)
    double start = 0.0;
    if (m == 0 || log_sin != kNegInf) {
      const double log_norm = 0.5 * (std::log(2.0 * m + 1.0) - log_4pi + ln_factorial(2 * m) -
                                     2.0 * m * std::numbers::ln2 - 2.0 * ln_factorial(m));
      const double log_value = log_norm + (m == 0 ? 0.0 : m * log_sin);
      start = ((m % 2 == 0) ? 1.0 : -1.0) * std::exp(log_value);
    }
    table[static_cast<std::size_t>(legendre_index(m, m))] = start;
    if (m == l_max) break;

    double prev2 = start;
    double prev1 = std::sqrt(2.0 * m + 3.0) * x * start;
    table[static_cast<std::size_t>(legendre_index(m + 1, m))] = prev1;
    for (int l = m + 2; l <= l_max; ++l) {
      const double l2 = static_cast<double>(l) * l;
      const double lm1_2 = static_cast<double>(l - 1) * (l - 1);
      const double m2 = static_cast<double>(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double b = std::sqrt((lm1_2 - m2) / (4.0 * lm1_2 - 1.0));
      const double cur = a * (x * prev1 - b * prev2);
      table[static_cast<std::size_t>(legendre_index(l, m))] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
  return table;
}

std::complex<double> spherical_harmonic(int l, int q, double theta, double phi) {
  if (l < 0 || std::abs(q) > l) {
    throw Error(ErrorKind::Domain, "spherical_harmonic: require |q| <= l, got l=" +
                                       std::to_string(l) + " q=" + std::to_string(q));
  }
  const int m = std::abs(q);
  const double p = normalized_legendre_table(l, theta)[static_cast<std::size_t>(legendre_index(l, m))];
  const std::complex<double> y = p * std::polar(1.0, m * phi);
  if (q >= 0) return y;
  return ((m % 2 == 0) ? 1.0 : -1.0) * std::conj(y);
}

double sy_rotation_element(int n_atoms, int k, int k_prime, double theta) {
  if (n_atoms < 0 || k < 0 || k > n_atoms || k_prime < 0 || k_prime > n_atoms) {
    throw Error(ErrorKind::Domain, "sy_rotation_element: Fock index out of range");
  }
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double log_prefactor = 0.5 * (ln_factorial(k_prime) + ln_factorial(n_atoms - k_prime) +
                                      ln_factorial(k) + ln_factorial(n_atoms - k));
  // All four factorial arguments must be non-negative.
  const int n_min = std::max(0, k - k_prime);
  const int n_max = std::min(k, n_atoms - k_prime);

  SignedLogSum sum;
  for (int n = n_min; n <= n_max; ++n) {
    const PowerTerm cos_part = signed_power(c, k - k_prime + n_atoms - 2 * n);
    const PowerTerm sin_part = signed_power(s, 2 * n + k_prime - k);
    if (cos_part.log_magnitude == kNegInf || sin_part.log_magnitude == kNegInf) continue;
    const double log_denominator = ln_factorial(k - n) + ln_factorial(n_atoms - k_prime - n) +
                                   ln_factorial(n) + ln_factorial(k_prime - k + n);
    const int sign = ((n % 2 == 0) ? 1 : -1) * cos_part.sign * sin_part.sign;
    sum.add(log_prefactor - log_denominator + cos_part.log_magnitude + sin_part.log_magnitude, sign);
  }
  note_cancellation(sum);
  return sum.value();
}

std::complex<double> sx_rotation_element(int n_atoms, int k, int k_prime, double theta) {
  static constexpr std::array<std::complex<double>, 4> kPowersOfI{
      std::complex<double>{1.0, 0.0}, std::complex<double>{0.0, 1.0},
      std::complex<double>{-1.0, 0.0}, std::complex<double>{0.0, -1.0}};
  const int power = ((k - k_prime) % 4 + 4) % 4;
  return kPowersOfI[static_cast<std::size_t>(power)] *
         sy_rotation_element(n_atoms, k, k_prime, theta);
}

Eigen::MatrixXd sy_rotation_matrix(int n_atoms, double theta) {
  const int d = n_atoms + 1;
  Eigen::MatrixXd r(d, d);
  for (int k = 0; k < d; ++k) {
    for (int kp = 0; kp < d; ++kp) r(k, kp) = sy_rotation_element(n_atoms, k, kp, theta);
  }
  return r;
}

Eigen::MatrixXcd sx_rotation_matrix(int n_atoms, double theta) {
  const int d = n_atoms + 1;
  Eigen::MatrixXcd r(d, d);
  for (int k = 0; k < d; ++k) {
    for (int kp = 0; kp < d; ++kp) r(k, kp) = sx_rotation_element(n_atoms, k, kp, theta);
  }
  return r;
}

}  // namespace qnd::special
