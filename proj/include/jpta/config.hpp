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

#ifndef JPTA_CONFIG_HPP
#define JPTA_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jpta/beam_targets.hpp"
#include "jpta/design.hpp"
#include "jpta/hbf_baseline.hpp"

namespace jpta::cli {

// Invalid experiment configuration. The message is ready for the user:
// "<source>:<line>: <field>: <problem>" whenever the field can be located.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SystemBlock {
  int M = 64;
  int N = 64;
  double f0_ghz = 100.0;
  double W_ghz = 10.0;
  int K = 2048;
  double kappa = 64.0;
  // Defaults to K.
  std::optional<double> p_sum;

  double power() const { return p_sum.value_or(static_cast<double>(K)); }
};

enum class TargetKind { kBehavior1, kBehavior2, kBehavior3, kCustom };

// Angles are kept in degrees, exactly as written in the config.
struct TargetBlock {
  TargetKind kind = TargetKind::kBehavior1;
  double theta0_deg = 30.0;
  double delta_theta_deg = 45.0;
  double theta1_deg = -45.0;
  double theta2_deg = 30.0;
  // Behavior 3: first subcarrier index of every band after the first. Empty
  // means equal-width bands.
  std::vector<int> band_edges;
  std::vector<double> angles_deg;
  // Custom target file. load_config makes relative names absolute against the
  // config file's directory; parse_config leaves them to base_dir.
  std::string file;
  bool rescale = false;
  WeightScheme weights = WeightScheme::kUniform;
};

enum class AlgorithmKind { kJpta, kHeuristic, kHbf };

struct AlgorithmBlock {
  AlgorithmKind kind = AlgorithmKind::kJpta;
  // jpta
  TtdUpdate variant = TtdUpdate::kLineSearch;
  int max_iter = 10;
  int grid = 4096;
  std::string discrete_set_file;  // delays in ns, resolved like target.file
  bool nonnegative = true;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> init_seed;
  // heuristic
  bool strict_verbatim = false;
  // hbf
  HbfStructure structure = HbfStructure::kFullyConnected;
  int n_rf = 1;
  int iters = 50;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  int restarts = 5;

  // "jpta-ls", "jpta-wls", "heuristic", "hbf-fc" or "hbf-pc".
  std::string label() const;
};

enum class SweepParameter { kN, kKappa, kMaxIter, kNrf };

struct SweepBlock {
  SweepParameter parameter = SweepParameter::kN;
  std::vector<double> values;
};

struct OutputBlock {
  std::string dir = "out";
  bool gain_map = false;
  double theta_step_deg = 1.0;
  bool timing = false;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  SystemBlock system;
  TargetBlock target;
  std::vector<AlgorithmBlock> algorithms;
  std::optional<SweepBlock> sweep;
  OutputBlock output;
  // Directory relative file names are resolved against.
  std::string base_dir = ".";
};

// Parses and validates JSON text (comments allowed). source names the
// text in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Fully resolved config, every default spelled out; parse_config accepts it.
nlohmann::json to_json(const ExperimentConfig& config);
// to_json on one line, for file preambles.
std::string echo(const ExperimentConfig& config);

// Angle in degrees from a number or a string such as "30", "-45deg" or
// "12.5 deg"; must lie in [-90, 90]. what names the field in errors.
double parse_angle_deg(const nlohmann::json& value, const std::string& what);

std::string sweep_parameter_name(SweepParameter p);

}  // namespace jpta::cli

#endif  // JPTA_CONFIG_HPP
