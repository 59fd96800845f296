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

// qnd-becs: parameter sweeps over the QND-entangled two-condensate model.

#include "qnd/error.hpp"
#include "qnd/sweep.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw qnd::Error(qnd::ErrorKind::Configuration, "cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_config(qnd::SweepConfig cfg, const std::string& out_dir, int workers) {
  if (!out_dir.empty()) cfg.output.directory = out_dir;
  const qnd::Manifest m = qnd::run_sweep(cfg, workers);
  for (const auto& f : m.files) std::cout << f.path << "  " << f.rows << " rows\n";
  std::cout << "manifest: " << m.path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qnd-becs: entanglement of two condensates by QND measurement"};
  app.footer(qnd::config_reference());
  app.set_version_flag("--version", std::string(qnd::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string preset_name;
  int workers = 0;
  bool list = false;
  bool show = false;

  auto* run = app.add_subcommand("run", "Run a sweep described by a JSON config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Override output.directory");
  run->add_option("--workers", workers, "Worker threads (default: QND_BECS_WORKERS or all cores)");

  auto* preset = app.add_subcommand("preset", "Run a built-in figure preset (fig2a ... fig9l)");
  preset->add_option("name", preset_name, "Preset name");
  preset->add_option("--out", out_dir, "Output directory (default: the preset name)");
  preset->add_option("--workers", workers, "Worker threads");
  preset->add_flag("--list", list, "List preset names");
  preset->add_flag("--show", show, "Print the preset config instead of running it");

  auto* validate = app.add_subcommand("validate", "Check a config file and print it with defaults");
  validate->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      return run_config(qnd::parse_config(read_file(config_path)), out_dir, workers);
    }
    if (*preset) {
      if (list) {
        for (const auto& n : qnd::preset_names()) std::cout << n << "\n";
        return 0;
      }
      if (preset_name.empty()) {
        std::cerr << "preset: a name is required (see --list)\n";
        return kExitConfig;
      }
      const std::string text = qnd::preset_config(preset_name);
      if (show) {
        std::cout << text;
        return 0;
      }
      return run_config(qnd::parse_config(text), out_dir, workers);
    }
    if (*validate) {
      const qnd::ConfigResult r = qnd::validate_config(read_file(config_path));
      if (!r.config) {
        for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
        return kExitConfig;
      }
      std::cout << r.config->echo;
      return 0;
    }
  } catch (const qnd::Error& e) {
    std::cerr << "error (" << qnd::to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == qnd::ErrorKind::Configuration ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
