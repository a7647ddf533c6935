// Copyright 2026 The JPTA Toolkit Authors. All Rights Reserved.
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

// jpta: design, sweep and compare JPTA beamformers from JSON configs.
// Exit codes: 0 ok, 1 I/O failure, 2 config or input error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jpta/config.hpp"
#include "jpta/errors.hpp"
#include "jpta/experiment.hpp"
#include "jpta/io.hpp"
#include "jpta/reproduce.hpp"

namespace {

using namespace jpta::cli;

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output directory (overrides output.dir)");
  cmd->add_option("--seed", c.seed, "Experiment seed; also replaces per-algorithm HBF seeds");
  cmd->add_option("--jobs", c.jobs, "Worker threads for sweep points")->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", c.timing, "Add wall-clock columns (outputs stop being byte-reproducible)");
}

ExperimentConfig load_with_overrides(const std::string& path, const Common& c) {
  ExperimentConfig e = load_config(path);
  if (!c.out.empty()) e.output.dir = c.out;
  if (c.seed) {
    e.seed = *c.seed;
    for (AlgorithmBlock& a : e.algorithms) a.seed.reset();
  }
  if (c.timing) e.output.timing = true;
  return e;
}

int cmd_design(const std::string& path, const Common& c, bool gain_map) {
  ExperimentConfig e = load_with_overrides(path, c);
  if (gain_map) e.output.gain_map = true;
  const DesignOutputs out = run_design(e);
  std::cout << out.result.algorithm << " F_obj=" << format_exact(out.result.report.f_obj) << "\n";
  std::cout << "wrote " << out.beamformer_path << "\nwrote " << out.report_path << "\n";
  if (!out.gain_map_path.empty()) std::cout << "wrote " << out.gain_map_path << "\n";
  return 0;
}

int cmd_sweep(const std::string& path, const Common& c) {
  const ExperimentConfig e = load_with_overrides(path, c);
  if (!e.sweep) throw ConfigError(path + ": sweep: missing \"sweep\" block");
  const std::vector<ResultRecord> rows = run_sweep(e, c.jobs);
  std::cout << "wrote " << write_sweep(e, rows, "sweep.csv") << " (" << rows.size() << " rows)\n";
  return 0;
}

int cmd_compare_hbf(const std::string& path, const Common& c, std::vector<int> chains) {
  ExperimentConfig e = load_with_overrides(path, c);
  if (chains.empty()) {
    for (int n = 1; n <= e.system.M; n *= 2) chains.push_back(n);
  }
  std::sort(chains.begin(), chains.end());
  chains.erase(std::unique(chains.begin(), chains.end()), chains.end());
  for (int n : chains) {
    if (n < 1 || n > e.system.M) throw ConfigError("--chains: " + std::to_string(n) + " outside [1, M]");
  }
  std::vector<double> fc_values(chains.begin(), chains.end());
  std::vector<double> pc_values;
  for (int n : chains) {
    if (e.system.M % n == 0) pc_values.push_back(n);
  }
  AlgorithmBlock reference;
  for (const AlgorithmBlock& a : e.algorithms) {
    if (a.kind == AlgorithmKind::kJpta) reference = a;
  }
  AlgorithmBlock fc;
  fc.kind = AlgorithmKind::kHbf;
  fc.structure = jpta::HbfStructure::kFullyConnected;
  AlgorithmBlock pc = fc;
  pc.structure = jpta::HbfStructure::kPartiallyConnected;

  ExperimentConfig fc_exp = e;
  fc_exp.algorithms = {fc, reference};
  fc_exp.sweep = SweepBlock{SweepParameter::kNrf, fc_values};
  ExperimentConfig pc_exp = e;
  pc_exp.algorithms = {pc};
  pc_exp.sweep = SweepBlock{SweepParameter::kNrf, pc_values};

  std::vector<ResultRecord> rows = run_sweep(fc_exp, c.jobs);
  double ref = 0.0;
  std::vector<int> fc_n, pc_n;
  std::vector<double> fc_f, pc_f;
  for (const ResultRecord& r : rows) {
    if (r.algorithm == reference.label()) ref = r.f_obj;
    if (r.algorithm == "hbf-fc") {
      fc_n.push_back(static_cast<int>(r.value));
      fc_f.push_back(r.f_obj);
    }
  }
  if (!pc_values.empty()) {
    for (const ResultRecord& r : run_sweep(pc_exp, c.jobs)) {
      pc_n.push_back(static_cast<int>(r.value));
      pc_f.push_back(r.f_obj);
      rows.push_back(r);
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRecord& a, const ResultRecord& b) { return a.value < b.value; });
  std::cout << "wrote " << write_sweep(fc_exp, rows, "compare_hbf.csv") << "\n";
  std::cout << reference.label() << " reference F_obj=" << format_exact(ref) << "\n";
  const int fc_cross = crossover_chains(fc_n, fc_f, ref);
  const int pc_cross = crossover_chains(pc_n, pc_f, ref);
  std::cout << "hbf-fc reaches it at N_RF=" << (fc_cross ? std::to_string(fc_cross) : "none") << "\n";
  std::cout << "hbf-pc reaches it at N_RF=" << (pc_cross ? std::to_string(pc_cross) : "none") << "\n";
  return 0;
}

int cmd_reproduce(const std::string& figure, const Common& c, bool fast, int draws, double theta_step) {
  ReproduceOptions o;
  o.fast = fast;
  o.out_dir = c.out.empty() ? "out" : c.out;
  o.seed = c.seed.value_or(1);
  o.jobs = c.jobs;
  o.timing = c.timing;
  o.convergence_draws = draws;
  o.theta_step_deg = theta_step;
  if (fast) std::cerr << "warning: --fast substitutes K=256 for K=2048; values are qualitative\n";
  for (const std::string& path : reproduce(figure, o)) std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_gain_map(const std::string& path, std::string out, double theta_step, bool ideal) {
  if (out.empty()) out = (std::filesystem::path(path).parent_path() / (ideal ? "gain_map_ideal.csv" : "gain_map.csv")).string();
  std::cout << "wrote " << gain_map_from_file(path, out, theta_step, ideal) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JPTA beamformer design toolkit"};
  app.require_subcommand(1);

  Common common;
  std::string config_path;
  bool gain_map = false;
  auto* design = app.add_subcommand("design", "Design one beamformer and write its files");
  design->add_option("config", config_path, "Experiment config (JSON)")->required();
  design->add_flag("--gain-map", gain_map, "Also write gain_map.csv");
  add_common(design, common);

  auto* sweep = app.add_subcommand("sweep", "Run the config's sweep block into sweep.csv");
  sweep->add_option("config", config_path, "Experiment config (JSON)")->required();
  add_common(sweep, common);

  std::vector<int> chains;
  auto* compare = app.add_subcommand("compare-hbf", "F_obj of HBF-FC/PC vs RF chains against the JPTA design");
  compare->add_option("config", config_path, "Experiment config (JSON)")->required();
  compare->add_option("--chains", chains, "RF chain counts (default: powers of two up to M)");
  add_common(compare, common);

  std::string figure;
  bool fast = false;
  int draws = 100;
  double theta_step = 1.0;
  auto* repro = app.add_subcommand("reproduce", "Run a figure preset (fig4 fig5 fig6 fig7 fig8 fig9 fig11)");
  repro->add_option("figure", figure, "Figure id")->required();
  repro->add_flag("--fast", fast, "Use K=256 instead of 2048");
  repro->add_option("--draws", draws, "Random instances per behavior for fig7")->check(CLI::PositiveNumber);
  repro->add_option("--theta-step", theta_step, "Gain-map angle step in degrees")->check(CLI::Range(0.001, 180.0));
  add_common(repro, common);

  std::string bf_path;
  std::string out_file;
  bool ideal = false;
  auto* gm = app.add_subcommand("gain-map", "Gain-map CSV from a stored beamformer file");
  gm->add_option("beamformer", bf_path, "beamformer.txt or hbf_beamformer.txt")->required();
  gm->add_option("--out", out_file, "Output CSV (default: next to the beamformer)");
  gm->add_option("--theta-step", theta_step, "Angle step in degrees")->check(CLI::Range(0.001, 180.0));
  gm->add_flag("--ideal", ideal, "Map the target beams instead of the design");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*design) return cmd_design(config_path, common, gain_map);
    if (*sweep) return cmd_sweep(config_path, common);
    if (*compare) return cmd_compare_hbf(config_path, common, chains);
    if (*repro) return cmd_reproduce(figure, common, fast, draws, theta_step);
    if (*gm) return cmd_gain_map(bf_path, out_file, theta_step, ideal);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const jpta::FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const jpta::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
