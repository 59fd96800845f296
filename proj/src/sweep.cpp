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

#include "qnd/sweep.hpp"

#include "qnd/error.hpp"
#include "qnd/photon_loss.hpp"
#include "qnd/presets_data.hpp"
#include "qnd/wigner.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

namespace qnd {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::pair<Task, std::string_view> kTaskNames[] = {
    {Task::PhotonDist, "photon-dist"},
    {Task::WignerConditional, "wigner-conditional"},
    {Task::WignerMarginal, "wigner-marginal"},
    {Task::Entanglement, "entanglement"},
    {Task::Fidelity, "fidelity"},
    {Task::Expectations, "expectations"},
    {Task::Variances, "variances"},
    {Task::Criteria, "criteria"},
    {Task::BasisProbabilities, "basis-probabilities"},
};

constexpr int kMaxAtoms = 400;

char axis_char(SpinAxis a) { return to_string(a)[0]; }

std::optional<SpinAxis> axis_from_char(char c) {
  switch (c) {
    case 'x': return SpinAxis::X;
    case 'y': return SpinAxis::Y;
    case 'z': return SpinAxis::Z;
    default: return std::nullopt;
  }
}

int photon_cutoff_floor(double alpha) { return static_cast<int>(std::ceil(alpha * alpha + 6.0 * alpha)); }

// ---------------------------------------------------------------------------
// Config reading

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void error(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }

  // Reports keys of obj that are not in allowed.
  void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        error(join(path, key), "unknown field");
      }
    }
  }

  const json* object(const json& parent, const std::string& path, const std::string& key, bool required) {
    const auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) error(join(path, key), "missing required field");
      return nullptr;
    }
    if (!it->is_object()) {
      error(join(path, key), "expected an object");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& parent, const std::string& path, const std::string& key) {
    const auto it = parent.find(key);
    if (it == parent.end()) return std::nullopt;
    if (!it->is_number()) {
      error(join(path, key), "expected a number");
      return std::nullopt;
    }
    return it->get<double>();
  }

  std::optional<long long> integer(const json& parent, const std::string& path, const std::string& key,
                                   bool required = false) {
    const auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) error(join(path, key), "missing required field");
      return std::nullopt;
    }
    return as_integer(*it, join(path, key));
  }

  std::optional<long long> as_integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 1e15) return static_cast<long long>(d);
    }
    error(path, "expected an integer");
    return std::nullopt;
  }

  std::optional<std::string> string(const json& parent, const std::string& path, const std::string& key) {
    const auto it = parent.find(key);
    if (it == parent.end()) return std::nullopt;
    if (!it->is_string()) {
      error(join(path, key), "expected a string");
      return std::nullopt;
    }
    return it->get<std::string>();
  }

  std::optional<bool> boolean(const json& parent, const std::string& path, const std::string& key) {
    const auto it = parent.find(key);
    if (it == parent.end()) return std::nullopt;
    if (!it->is_boolean()) {
      error(join(path, key), "expected true or false");
      return std::nullopt;
    }
    return it->get<bool>();
  }

  const json* array(const json& parent, const std::string& path, const std::string& key) {
    const auto it = parent.find(key);
    if (it == parent.end()) return nullptr;
    if (!it->is_array()) {
      error(join(path, key), "expected a list");
      return nullptr;
    }
    if (it->empty()) {
      error(join(path, key), "must not be empty");
      return nullptr;
    }
    return &*it;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

 private:
  std::vector<std::string>& errors_;
};

void read_config(const json& root, SweepConfig& cfg, ordered_json& echo, Reader& r) {
  if (!root.is_object()) {
    r.error("(root)", "expected an object");
    return;
  }
  r.check_keys(root, "", {"base", "tau_grid", "tau_values", "chi_bar_list", "outcome_list", "tasks", "wigner",
                          "basis_pairs", "photon_dist", "squeezing_scope", "output"});

  // base
  bool have_atoms = false;
  if (const json* base = r.object(root, "", "base", true)) {
    r.check_keys(*base, "base", {"n_atoms", "alpha", "gamma_bar"});
    if (const auto n = r.integer(*base, "base", "n_atoms", true)) {
      if (*n < 1 || *n > kMaxAtoms) {
        r.error("base.n_atoms", "must lie in [1, " + std::to_string(kMaxAtoms) + "]");
      } else {
        cfg.base.n_atoms = static_cast<int>(*n);
        have_atoms = true;
      }
    }
    if (const auto a = r.number(*base, "base", "alpha")) {
      if (!(std::isfinite(*a) && *a > 0.0)) r.error("base.alpha", "must be a positive number");
      else cfg.base.alpha = *a;
    }
    if (const auto g = r.number(*base, "base", "gamma_bar")) {
      if (!(std::isfinite(*g) && *g >= 0.0)) r.error("base.gamma_bar", "must be >= 0");
      else cfg.base.gamma_bar = *g;
    }
  }
  echo["base"] = {{"n_atoms", cfg.base.n_atoms}, {"alpha", cfg.base.alpha}, {"gamma_bar", cfg.base.gamma_bar}};

  // tau
  const bool has_grid = root.contains("tau_grid");
  const bool has_values = root.contains("tau_values");
  if (has_grid && has_values) {
    r.error("tau_values", "conflicts with tau_grid; give only one");
  } else if (has_values) {
    if (const json* list = r.array(root, "", "tau_values")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& v = (*list)[i];
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
          r.error(Reader::index("tau_values", i), "expected a finite number");
        } else {
          cfg.tau_values.push_back(v.get<double>());
        }
      }
    }
    echo["tau_values"] = cfg.tau_values;
  } else {
    double start = 0.0;
    double stop = std::numbers::pi / 2.0;
    long long count = 201;
    if (has_grid) {
      if (const json* grid = r.object(root, "", "tau_grid", false)) {
        r.check_keys(*grid, "tau_grid", {"start", "stop", "count"});
        if (const auto v = r.number(*grid, "tau_grid", "start")) start = *v;
        if (const auto v = r.number(*grid, "tau_grid", "stop")) stop = *v;
        if (const auto v = r.integer(*grid, "tau_grid", "count")) count = *v;
      }
    }
    if (!std::isfinite(start)) r.error("tau_grid.start", "must be finite");
    if (!std::isfinite(stop)) r.error("tau_grid.stop", "must be finite");
    if (count < 1) {
      r.error("tau_grid.count", "must be >= 1");
    } else if (count > 1000000) {
      r.error("tau_grid.count", "must be <= 1000000");
    } else {
      for (long long i = 0; i < count; ++i) {
        cfg.tau_values.push_back(count == 1 ? start : start + (stop - start) * static_cast<double>(i) / (count - 1));
      }
    }
    echo["tau_grid"] = {{"start", start}, {"stop", stop}, {"count", count}};
  }

  // chi_bar
  if (root.contains("chi_bar_list")) {
    cfg.chi_bar_list.clear();
    if (const json* list = r.array(root, "", "chi_bar_list")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& v = (*list)[i];
        if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0.0) {
          r.error(Reader::index("chi_bar_list", i), "must be a number >= 0");
        } else {
          cfg.chi_bar_list.push_back(v.get<double>());
        }
      }
    }
  }
  echo["chi_bar_list"] = cfg.chi_bar_list;
  const bool any_loss = std::any_of(cfg.chi_bar_list.begin(), cfg.chi_bar_list.end(), [](double c) { return c > 0; });
  const bool any_negative_tau = std::any_of(cfg.tau_values.begin(), cfg.tau_values.end(), [](double t) { return t < 0; });
  if (any_loss && any_negative_tau) {
    r.error(has_values ? "tau_values" : "tau_grid", "negative tau is only allowed when every chi_bar is 0");
  }

  // outcomes
  if (root.contains("outcome_list")) {
    cfg.outcome_list.clear();
    if (const json* list = r.array(root, "", "outcome_list")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& v = (*list)[i];
        const std::string path = Reader::index("outcome_list", i);
        if (!v.is_array() || v.size() != 2) {
          r.error(path, "expected a pair [n_c, n_d]");
          continue;
        }
        const auto nc = r.as_integer(v[0], path + "[0]");
        const auto nd = r.as_integer(v[1], path + "[1]");
        if (!nc || !nd) continue;
        if (*nc < 0 || *nd < 0 || *nc > 100000 || *nd > 100000) {
          r.error(path, "photon counts must lie in [0, 100000]");
          continue;
        }
        cfg.outcome_list.emplace_back(static_cast<int>(*nc), static_cast<int>(*nd));
      }
    }
  }
  {
    ordered_json list = ordered_json::array();
    for (const auto& [nc, nd] : cfg.outcome_list) list.push_back({nc, nd});
    echo["outcome_list"] = list;
  }

  // tasks
  if (root.contains("tasks")) {
    if (const json* list = r.array(root, "", "tasks")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& v = (*list)[i];
        const std::string path = Reader::index("tasks", i);
        const auto task = v.is_string() ? task_from_string(v.get<std::string>()) : std::nullopt;
        if (!task) {
          r.error(path, "unknown task");
        } else if (std::find(cfg.tasks.begin(), cfg.tasks.end(), *task) != cfg.tasks.end()) {
          r.error(path, "duplicate task");
        } else {
          cfg.tasks.push_back(*task);
        }
      }
    }
  } else {
    cfg.tasks = {Task::Entanglement, Task::Fidelity, Task::Criteria};
  }
  {
    ordered_json list = ordered_json::array();
    for (Task t : cfg.tasks) list.push_back(std::string(to_string(t)));
    echo["tasks"] = list;
  }

  // wigner
  cfg.wigner.k_project = cfg.base.n_atoms / 2;
  if (const json* w = r.object(root, "", "wigner", false)) {
    r.check_keys(*w, "wigner", {"k_project", "n_theta", "n_phi", "per_panel_scale", "marginal_bec"});
    if (const auto k = r.integer(*w, "wigner", "k_project")) {
      if (*k < 0 || (have_atoms && *k > cfg.base.n_atoms)) r.error("wigner.k_project", "must lie in [0, n_atoms]");
      else cfg.wigner.k_project = static_cast<int>(*k);
    }
    if (const auto v = r.integer(*w, "wigner", "n_theta")) {
      if (*v < 2 || *v > 10001) r.error("wigner.n_theta", "must lie in [2, 10001]");
      else cfg.wigner.n_theta = static_cast<int>(*v);
    }
    if (const auto v = r.integer(*w, "wigner", "n_phi")) {
      if (*v < 2 || *v > 10001) r.error("wigner.n_phi", "must lie in [2, 10001]");
      else cfg.wigner.n_phi = static_cast<int>(*v);
    }
    if (const auto v = r.boolean(*w, "wigner", "per_panel_scale")) cfg.wigner.per_panel_scale = *v;
    if (const auto v = r.integer(*w, "wigner", "marginal_bec")) {
      if (*v != 1 && *v != 2) r.error("wigner.marginal_bec", "must be 1 or 2");
      else cfg.wigner.marginal_bec = *v == 1 ? Bec::First : Bec::Second;
    }
  }
  echo["wigner"] = {{"k_project", cfg.wigner.k_project},
                    {"n_theta", cfg.wigner.n_theta},
                    {"n_phi", cfg.wigner.n_phi},
                    {"per_panel_scale", cfg.wigner.per_panel_scale},
                    {"marginal_bec", cfg.wigner.marginal_bec == Bec::First ? 1 : 2}};

  // basis pairs
  if (root.contains("basis_pairs")) {
    cfg.basis_pairs.clear();
    if (const json* list = r.array(root, "", "basis_pairs")) {
      for (std::size_t i = 0; i < list->size(); ++i) {
        const json& v = (*list)[i];
        const std::string s = v.is_string() ? v.get<std::string>() : std::string();
        const auto a = s.size() == 2 ? axis_from_char(s[0]) : std::nullopt;
        const auto b = s.size() == 2 ? axis_from_char(s[1]) : std::nullopt;
        if (!a || !b) r.error(Reader::index("basis_pairs", i), "expected two letters from x, y, z such as \"xx\"");
        else cfg.basis_pairs.emplace_back(*a, *b);
      }
    }
  }
  {
    ordered_json list = ordered_json::array();
    for (const auto& [a, b] : cfg.basis_pairs) list.push_back(std::string{axis_char(a), axis_char(b)});
    echo["basis_pairs"] = list;
  }

  // photon distribution
  cfg.photon_n_max = photon_cutoff_floor(cfg.base.alpha);
  if (const json* p = r.object(root, "", "photon_dist", false)) {
    r.check_keys(*p, "photon_dist", {"n_max"});
    if (const auto v = r.integer(*p, "photon_dist", "n_max")) {
      if (*v < cfg.photon_n_max || *v > 20000) {
        r.error("photon_dist.n_max", "must lie in [" + std::to_string(cfg.photon_n_max) +
                                         ", 20000] (alpha^2 + 6 alpha keeps the truncated mass below 1e-8)");
      } else {
        cfg.photon_n_max = static_cast<int>(*v);
      }
    }
  }
  echo["photon_dist"] = {{"n_max", cfg.photon_n_max}};

  if (const auto s = r.string(root, "", "squeezing_scope")) {
    if (*s == "collective") cfg.squeezing_scope = SqueezingScope::Collective;
    else if (*s == "first") cfg.squeezing_scope = SqueezingScope::FirstBec;
    else r.error("squeezing_scope", "must be \"collective\" or \"first\"");
  }
  echo["squeezing_scope"] = cfg.squeezing_scope == SqueezingScope::Collective ? "collective" : "first";

  // output
  if (const json* o = r.object(root, "", "output", false)) {
    r.check_keys(*o, "output", {"directory", "format", "precision"});
    if (const auto d = r.string(*o, "output", "directory")) {
      if (d->empty()) r.error("output.directory", "must not be empty");
      else cfg.output.directory = *d;
    }
    if (const auto f = r.string(*o, "output", "format")) {
      if (*f == "csv") cfg.output.format = OutputFormat::Csv;
      else if (*f == "json") cfg.output.format = OutputFormat::Json;
      else r.error("output.format", "must be \"csv\" or \"json\"");
    }
    if (const auto p = r.integer(*o, "output", "precision")) {
      if (*p < 1 || *p > 17) r.error("output.precision", "must lie in [1, 17]");
      else cfg.output.precision = static_cast<int>(*p);
    }
  }
  echo["output"] = {{"directory", cfg.output.directory},
                    {"format", cfg.output.format == OutputFormat::Csv ? "csv" : "json"},
                    {"precision", cfg.output.precision}};
}

// ---------------------------------------------------------------------------
// Tables

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<Cell> cells;  // row-major
  std::size_t rows = 0;

  void add_row(std::initializer_list<Cell> row) {
    cells.insert(cells.end(), row.begin(), row.end());
    ++rows;
  }
};

std::vector<std::string> columns_for(Task task) {
  switch (task) {
    case Task::PhotonDist: return {"tau[hbar/q]", "n_c", "n_d", "probability"};
    case Task::WignerConditional:
    case Task::WignerMarginal: return {"tau[hbar/q]", "theta[rad]", "phi[rad]", "W"};
    case Task::Entanglement: return {"tau[hbar/q]", "E_N[log2]", "E_N/E_max"};
    case Task::Fidelity: return {"tau[hbar/q]", "F_EPR"};
    case Task::Expectations:
      return {"tau[hbar/q]", "<S1x>", "<S1y>", "<S1z>", "<S2x>", "<S2y>", "<S2z>"};
    case Task::Variances: return {"tau[hbar/q]", "Var(S1x-S2x)", "Var(S1y-S2y)", "Var(S1z+S2z)"};
    case Task::Criteria:
      return {"tau[hbar/q]", "C_ent",          "C_DGCZ",         "xi2",           "xi2/2",
              "C_steer",     "zeta_opt[rad]",  "theta_mean[rad]", "phi_mean[rad]"};
    case Task::BasisProbabilities: return {"tau[hbar/q]", "basis", "k1", "k2", "probability"};
  }
  return {};
}

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

double or_undefined(const std::optional<double>& v) { return v ? *v : kUndefined; }

std::string format_number(double v, int precision) {
  if (!std::isfinite(v)) return {};
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string render_csv(const std::vector<std::string>& columns, const Table& t, int precision) {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  const std::size_t nc = columns.size();
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < nc; ++c) {
      if (c) out += ',';
      const Cell& cell = t.cells[r * nc + c];
      if (const double* d = std::get_if<double>(&cell)) {
        const std::string s = format_number(*d, precision);
        out += s.empty() ? "NA" : s;
      } else {
        out += std::get<std::string>(cell);
      }
    }
    out += '\n';
  }
  return out;
}

std::string json_string(const std::string& s) { return json(s).dump(); }

std::string render_json(const std::vector<std::string>& columns, const Table& t, int precision, Task task,
                        int n_c, int n_d, double chi_bar) {
  std::string out = "{\n  \"task\": " + json_string(std::string(to_string(task)));
  if (task != Task::PhotonDist) {
    out += ",\n  \"n_c\": " + std::to_string(n_c) + ",\n  \"n_d\": " + std::to_string(n_d) +
           ",\n  \"chi_bar\": " + format_number(chi_bar, 17);
  }
  out += ",\n  \"columns\": [";
  for (std::size_t c = 0; c < columns.size(); ++c) out += (c ? ", " : "") + json_string(columns[c]);
  out += "],\n  \"rows\": [";
  const std::size_t nc = columns.size();
  for (std::size_t r = 0; r < t.rows; ++r) {
    out += r ? ",\n    [" : "\n    [";
    for (std::size_t c = 0; c < nc; ++c) {
      if (c) out += ", ";
      const Cell& cell = t.cells[r * nc + c];
      if (const double* d = std::get_if<double>(&cell)) {
        const std::string s = format_number(*d, precision);
        out += s.empty() ? "null" : s;
      } else {
        out += json_string(std::get<std::string>(cell));
      }
    }
    out += ']';
  }
  out += t.rows ? "\n  ]\n}\n" : "]\n}\n";
  return out;
}

// ---------------------------------------------------------------------------
// Point evaluation

struct Point {
  int outcome = 0;  // index into outcome_list, -1 for outcome-independent jobs
  int chi = 0;
  int tau = 0;
};

void append_wigner(Table& t, double tau, const WignerField& w, bool per_panel_scale) {
  double scale = 1.0;
  if (per_panel_scale) {
    const double m = w.values.cwiseAbs().maxCoeff();
    if (m > 0.0) scale = 1.0 / m;
  }
  for (std::size_t i = 0; i < w.theta.size(); ++i) {
    for (std::size_t j = 0; j < w.phi.size(); ++j) {
      t.add_row({tau, w.theta[i], w.phi[j], w.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * scale});
    }
  }
}

std::vector<Table> evaluate_point(const SweepConfig& cfg, const std::vector<Task>& tasks, const Point& pt) {
  SystemParams p = cfg.base;
  p.tau = cfg.tau_values[static_cast<std::size_t>(pt.tau)];
  std::vector<Table> out(tasks.size());

  if (pt.outcome < 0) {
    // Outcome-independent photon statistics.
    const Eigen::MatrixXd grid = photon_distribution_grid(p.n_atoms, p.alpha, p.tau, cfg.photon_n_max);
    for (int nc = 0; nc <= cfg.photon_n_max; ++nc) {
      for (int nd = 0; nd <= cfg.photon_n_max; ++nd) {
        out[0].add_row({p.tau, static_cast<double>(nc), static_cast<double>(nd), grid(nc, nd)});
      }
    }
    return out;
  }

  p.n_c = cfg.outcome_list[static_cast<std::size_t>(pt.outcome)].first;
  p.n_d = cfg.outcome_list[static_cast<std::size_t>(pt.outcome)].second;
  p.chi_bar = cfg.chi_bar_list[static_cast<std::size_t>(pt.chi)];
  const AtomDensityMatrix rho = apply_photon_loss(p);

  std::optional<SpinMoments> moments;
  auto get_moments = [&]() -> const SpinMoments& {
    if (!moments) moments = spin_moments(rho);
    return *moments;
  };
  const SphereGrid grid{cfg.wigner.n_theta, cfg.wigner.n_phi};

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    Table& t = out[i];
    switch (tasks[i]) {
      case Task::PhotonDist: break;
      case Task::WignerConditional:
        append_wigner(t, p.tau, conditional_wigner(rho, cfg.wigner.k_project, grid), cfg.wigner.per_panel_scale);
        break;
      case Task::WignerMarginal:
        append_wigner(t, p.tau, marginal_wigner(rho, cfg.wigner.marginal_bec, grid), cfg.wigner.per_panel_scale);
        break;
      case Task::Entanglement: {
        const LogNegativity ln = log_negativity(rho);
        t.add_row({p.tau, ln.value, ln.normalized});
        break;
      }
      case Task::Fidelity: t.add_row({p.tau, epr_fidelity(rho)}); break;
      case Task::Expectations: {
        const SpinMoments& m = get_moments();
        t.add_row({p.tau, m.mean1.x(), m.mean1.y(), m.mean1.z(), m.mean2.x(), m.mean2.y(), m.mean2.z()});
        break;
      }
      case Task::Variances:
        t.add_row({p.tau, joint_variance(rho, JointOperator::XMinusX), joint_variance(rho, JointOperator::YMinusY),
                   joint_variance(rho, JointOperator::ZPlusZ)});
        break;
      case Task::Criteria: {
        const auto pv = min_perpendicular_variance(get_moments(), cfg.squeezing_scope);
        const double xi2 = pv ? 2.0 * pv->var_min / pv->mean_length : kUndefined;
        t.add_row({p.tau, criterion_ht(rho), or_undefined(criterion_dgcz(rho)), xi2, xi2 / 2.0,
                   or_undefined(criterion_steering(rho)), pv ? pv->zeta_opt : kUndefined,
                   pv ? pv->theta : kUndefined, pv ? pv->phi : kUndefined});
        break;
      }
      case Task::BasisProbabilities:
        for (const auto& [a, b] : cfg.basis_pairs) {
          const Eigen::MatrixXd prob = basis_probability_grid(rho, a, b);
          const std::string label{axis_char(a), axis_char(b)};
          for (int k1 = 0; k1 < prob.rows(); ++k1) {
            for (int k2 = 0; k2 < prob.cols(); ++k2) {
              t.add_row({p.tau, label, static_cast<double>(k1), static_cast<double>(k2), prob(k1, k2)});
            }
          }
        }
        break;
    }
  }
  return out;
}

std::string describe(const SweepConfig& cfg, const Point& pt) {
  std::ostringstream s;
  s.precision(12);
  s << "tau = " << cfg.tau_values[static_cast<std::size_t>(pt.tau)];
  if (pt.outcome >= 0) {
    const auto& [nc, nd] = cfg.outcome_list[static_cast<std::size_t>(pt.outcome)];
    s << ", n_c = " << nc << ", n_d = " << nd << ", chi_bar = " << cfg.chi_bar_list[static_cast<std::size_t>(pt.chi)];
  }
  return s.str();
}

std::string chi_label(double chi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", chi);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::Configuration, "cannot write " + path.string());
}

const json& presets() {
  static const json parsed = json::parse(detail::kPresetsJson);
  return parsed;
}

}  // namespace

std::string_view to_string(Task task) {
  for (const auto& [t, name] : kTaskNames) {
    if (t == task) return name;
  }
  return "?";
}

std::optional<Task> task_from_string(std::string_view name) {
  for (const auto& [t, n] : kTaskNames) {
    if (n == name) return t;
  }
  return std::nullopt;
}

ConfigResult validate_config(std::string_view text) {
  ConfigResult result;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    result.errors.push_back("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    return result;
  }
  SweepConfig cfg;
  ordered_json echo;
  Reader reader(result.errors);
  read_config(root, cfg, echo, reader);
  if (result.errors.empty()) {
    cfg.echo = echo.dump(2) + "\n";
    result.config = std::move(cfg);
  }
  return result;
}

SweepConfig parse_config(std::string_view text) {
  ConfigResult r = validate_config(text);
  if (!r.config) {
    std::string msg = "invalid configuration:";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw Error(ErrorKind::Configuration, msg);
  }
  return std::move(*r.config);
}

std::string config_reference() {
  return R"(Configuration is a JSON object. Fields (defaults in brackets):
  base.n_atoms        atoms per condensate, 1..400 (required)
  base.alpha          probe amplitude [10]
  base.gamma_bar      phase damping rate, recorded only [0]
  tau_grid            {start [0], stop [pi/2], count [201]}
  tau_values          explicit list of tau, instead of tau_grid
  chi_bar_list        amplitude attenuation rates >= 0 [[0]]
  outcome_list        photon outcomes [[50, 50]]
  tasks               any of photon-dist, wigner-conditional, wigner-marginal,
                      entanglement, fidelity, expectations, variances,
                      criteria, basis-probabilities
                      [entanglement, fidelity, criteria]
  wigner              {k_project [n_atoms/2], n_theta [181], n_phi [361],
                       per_panel_scale [false], marginal_bec [1]}
  basis_pairs         measurement bases for basis-probabilities [["xx","yy","zz"]]
  photon_dist.n_max   photon cutoff [ceil(alpha^2 + 6 alpha)]
  squeezing_scope     "collective" (S1 + S2) or "first" (S1) [collective]
  output              {directory ["qnd-out"], format csv|json [csv], precision [12]}
Environment: QND_BECS_WORKERS sets the number of worker threads.
)";
}

int default_worker_count() {
  if (const char* env = std::getenv("QND_BECS_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Numerical, "sha256_hex: digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

Manifest run_sweep(const SweepConfig& cfg, int workers) {
  if (cfg.tau_values.empty() || cfg.chi_bar_list.empty() || cfg.outcome_list.empty() || cfg.tasks.empty()) {
    throw Error(ErrorKind::Configuration, "run_sweep: empty parameter list");
  }
  if (workers <= 0) workers = default_worker_count();

  // photon-dist is computed once per tau; every other task per (outcome, chi, tau).
  std::vector<Task> point_tasks;
  bool photon = false;
  for (Task t : cfg.tasks) {
    if (t == Task::PhotonDist) photon = true;
    else point_tasks.push_back(t);
  }
  std::vector<Point> points;
  const int n_tau = static_cast<int>(cfg.tau_values.size());
  if (photon) {
    for (int t = 0; t < n_tau; ++t) points.push_back({-1, 0, t});
  }
  if (!point_tasks.empty()) {
    for (int o = 0; o < static_cast<int>(cfg.outcome_list.size()); ++o) {
      for (int c = 0; c < static_cast<int>(cfg.chi_bar_list.size()); ++c) {
        for (int t = 0; t < n_tau; ++t) points.push_back({o, c, t});
      }
    }
  }

  std::vector<std::vector<Table>> results(points.size());
  std::vector<std::exception_ptr> failures(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        results[i] = evaluate_point(cfg, points[i].outcome < 0 ? std::vector<Task>{Task::PhotonDist} : point_tasks,
                                    points[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(points.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " [at " + describe(cfg, points[i]) + "]");
    } catch (const std::exception& e) {
      throw Error(ErrorKind::Numerical, std::string(e.what()) + " [at " + describe(cfg, points[i]) + "]");
    }
  }

  namespace fs = std::filesystem;
  const fs::path dir(cfg.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::Configuration, "cannot create output directory " + dir.string());
  }

  const std::string ext = cfg.output.format == OutputFormat::Csv ? ".csv" : ".json";
  Manifest manifest;
  auto emit = [&](Task task, int outcome, int chi, const Table& table) {
    const auto columns = columns_for(task);
    int nc = 0;
    int nd = 0;
    double chi_bar = 0.0;
    std::string name(to_string(task));
    if (outcome >= 0) {
      nc = cfg.outcome_list[static_cast<std::size_t>(outcome)].first;
      nd = cfg.outcome_list[static_cast<std::size_t>(outcome)].second;
      chi_bar = cfg.chi_bar_list[static_cast<std::size_t>(chi)];
      name += "_nc" + std::to_string(nc) + "_nd" + std::to_string(nd) + "_chi" + chi_label(chi_bar);
    }
    name += ext;
    const std::string bytes = cfg.output.format == OutputFormat::Csv
                                  ? render_csv(columns, table, cfg.output.precision)
                                  : render_json(columns, table, cfg.output.precision, task, nc, nd, chi_bar);
    write_file(dir / name, bytes);
    manifest.files.push_back({name, std::string(to_string(task)), nc, nd, chi_bar, table.rows, sha256_hex(bytes)});
  };

  std::size_t cursor = 0;
  if (photon) {
    Table merged;
    for (int t = 0; t < n_tau; ++t, ++cursor) {
      const Table& part = results[cursor][0];
      merged.cells.insert(merged.cells.end(), part.cells.begin(), part.cells.end());
      merged.rows += part.rows;
    }
    emit(Task::PhotonDist, -1, 0, merged);
  }
  if (!point_tasks.empty()) {
    for (int o = 0; o < static_cast<int>(cfg.outcome_list.size()); ++o) {
      for (int c = 0; c < static_cast<int>(cfg.chi_bar_list.size()); ++c) {
        for (std::size_t k = 0; k < point_tasks.size(); ++k) {
          Table merged;
          for (int t = 0; t < n_tau; ++t) {
            const Table& part = results[cursor + static_cast<std::size_t>(t)][k];
            merged.cells.insert(merged.cells.end(), part.cells.begin(), part.cells.end());
            merged.rows += part.rows;
          }
          emit(point_tasks[k], o, c, merged);
        }
        cursor += static_cast<std::size_t>(n_tau);
      }
    }
  }

  ordered_json m;
  m["tool"] = "qnd-becs";
  m["version"] = std::string(kToolVersion);
  m["config"] = ordered_json::parse(cfg.echo.empty() ? "{}" : cfg.echo);
  ordered_json files = ordered_json::array();
  for (const auto& f : manifest.files) {
    ordered_json entry;
    entry["path"] = f.path;
    entry["task"] = f.task;
    entry["rows"] = f.rows;
    entry["sha256"] = f.sha256;
    ordered_json params;
    params["n_atoms"] = cfg.base.n_atoms;
    params["alpha"] = cfg.base.alpha;
    if (f.task != "photon-dist") {
      params["n_c"] = f.n_c;
      params["n_d"] = f.n_d;
      params["chi_bar"] = f.chi_bar;
      params["gamma_bar"] = cfg.base.gamma_bar;
    }
    params["tau"] = "per row";
    entry["params"] = params;
    files.push_back(entry);
  }
  m["files"] = files;
  const fs::path manifest_path = dir / "manifest.json";
  write_file(manifest_path, m.dump(2) + "\n");
  manifest.path = manifest_path.string();
  return manifest;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [key, value] : presets().items()) names.push_back(key);
  return names;
}

std::string preset_config(std::string_view name) {
  const json& all = presets();
  const auto it = all.find(std::string(name));
  if (it == all.end()) throw Error(ErrorKind::Configuration, "unknown preset '" + std::string(name) + "'");
  return it->dump(2) + "\n";
}

}  // namespace qnd
