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

#include "qnd/entanglement.hpp"
#include "qnd/observables.hpp"
#include "qnd/state.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qnd {

enum class Task {
  PhotonDist,
  WignerConditional,
  WignerMarginal,
  Entanglement,
  Fidelity,
  Expectations,
  Variances,
  Criteria,
  BasisProbabilities,
};

std::string_view to_string(Task task);
std::optional<Task> task_from_string(std::string_view name);

enum class OutputFormat { Csv, Json };

struct SweepConfig {
  SystemParams base;  // n_atoms, alpha and gamma_bar; tau, chi_bar, n_c, n_d come from the lists below
  std::vector<double> tau_values;
  std::vector<double> chi_bar_list{0.0};
  std::vector<std::pair<int, int>> outcome_list{{50, 50}};
  std::vector<Task> tasks;

  struct Wigner {
    int k_project = 0;
    int n_theta = 181;
    int n_phi = 361;
    bool per_panel_scale = false;  // divide each tau slice by its max |W|
    Bec marginal_bec = Bec::First;
  } wigner;

  std::vector<std::pair<SpinAxis, SpinAxis>> basis_pairs{
      {SpinAxis::X, SpinAxis::X}, {SpinAxis::Y, SpinAxis::Y}, {SpinAxis::Z, SpinAxis::Z}};
  int photon_n_max = 0;
  SqueezingScope squeezing_scope = SqueezingScope::Collective;

  struct Output {
    std::string directory = "qnd-out";
    OutputFormat format = OutputFormat::Csv;
    int precision = 12;
  } output;

  /// The configuration with every default filled in, as canonical JSON.
  std::string echo;
};

struct ConfigResult {
  std::optional<SweepConfig> config;
  std::vector<std::string> errors;  // "field.path: message" or "line L, column C: message"
};

/// Parses and checks a JSON configuration, collecting every error.
ConfigResult validate_config(std::string_view text);

/// validate_config, throwing Error(Configuration) with all messages joined.
SweepConfig parse_config(std::string_view text);

/// Human-readable schema with defaults.
std::string config_reference();

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::string task;
  int n_c = 0;
  int n_d = 0;
  double chi_bar = 0.0;
  std::size_t rows = 0;
  std::string sha256;
};

struct Manifest {
  std::string path;
  std::vector<ManifestEntry> files;
};

/// Worker count from QND_BECS_WORKERS, else the hardware concurrency.
int default_worker_count();

/// Runs every (outcome, chi_bar, tau) point on a worker pool and writes one
/// table per (task, outcome, chi_bar) plus manifest.json. Output bytes do not
/// depend on the worker count. Failures rethrow with the parameter point.
Manifest run_sweep(const SweepConfig& config, int workers = 0);

std::vector<std::string> preset_names();

/// Configuration text of a built-in preset; Error(Configuration) if unknown.
std::string preset_config(std::string_view name);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

inline constexpr std::string_view kToolVersion = "1.0.0";

}  // namespace qnd
