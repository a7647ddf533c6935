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

#ifndef JPTA_EXPERIMENT_HPP
#define JPTA_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jpta/array_model.hpp"
#include "jpta/beam_targets.hpp"
#include "jpta/config.hpp"
#include "jpta/hbf_baseline.hpp"
#include "jpta/io.hpp"
#include "jpta/metrics.hpp"

namespace jpta::cli {

// Everything derived from the system and target blocks.
struct Instance {
  SystemConfig config;
  SubcarrierGrid grid;
  BeamTarget target;
};

// Library argument errors surface as ConfigError naming the block.
Instance make_instance(const ExperimentConfig& experiment);

struct RunResult {
  std::string algorithm;
  std::optional<JptaBeamformer> jpta;  // JPTA and heuristic designs
  std::optional<HbfBeamformer> hbf;
  Eigen::MatrixXcd beams;  // unit-norm effective beam per subcarrier, M x K
  FitReport report;
  int iterations = 0;
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
};

RunResult run_algorithm(const Instance& instance, const ExperimentConfig& experiment,
                        const AlgorithmBlock& algorithm);

// (1/K) sum_k [(|b_k| - |x_k|)^2 + w_k |bbar_k - x_k/|x_k||^2] for the
// transmitted per-subcarrier vectors x_k (columns). Equals objective_tilde for
// a JPTA design, whose x_k is alpha_k T P d_k.
double matching_objective(const BeamTarget& target, const Eigen::MatrixXcd& transmitted);

// Delays in ns, whitespace or newline separated, '#' comments; returned in
// seconds, sorted.
std::vector<double> read_discrete_set(const std::string& path);

// Runs fn(i) for i in [0, n) on up to jobs threads. Results must be written
// to per-index slots; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// One record per sweep value per algorithm, sorted by value, then by the
// algorithm's position in the config. Without a sweep block, one record per
// algorithm.
std::vector<ResultRecord> run_sweep(const ExperimentConfig& experiment, int jobs = 1);

// 'step' degree grid over [-90, 90] in radians; always includes both ends.
std::vector<double> theta_grid(double step_deg);

Eigen::MatrixXd beam_gain_map(const Instance& instance, const Eigen::MatrixXcd& beams,
                              const std::vector<double>& thetas);

// Preamble lines shared by every emitted file: the resolved config and any
// extra notes (warnings, provenance).
std::vector<std::string> preamble(const ExperimentConfig& experiment,
                                  const std::vector<std::string>& notes = {});

struct DesignOutputs {
  RunResult result;
  std::string beamformer_path;
  std::string report_path;
  std::string gain_map_path;  // empty unless requested
};

// Single design: beamformer (or hybrid) file, fit report and optional gain
// map, written into experiment.output.dir.
DesignOutputs run_design(const ExperimentConfig& experiment, const std::vector<std::string>& notes = {});

// Writes run_sweep's records to <dir>/<file_name>.
std::string write_sweep(const ExperimentConfig& experiment, const std::vector<ResultRecord>& records,
                        const std::string& file_name, const std::vector<std::string>& notes = {});

// Reloads a beamformer file and recomputes F_obj from the stored settings
// and the config echoed inside it.
double refit_beamformer_file(const std::string& path);

// Gain map of a stored beamformer (JPTA or hybrid file); ideal=true maps
// the target instead.
std::string gain_map_from_file(const std::string& beamformer_path, const std::string& out_path,
                               double theta_step_deg, bool ideal);

}  // namespace jpta::cli

#endif  // JPTA_EXPERIMENT_HPP
