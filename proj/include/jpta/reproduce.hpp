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

#ifndef JPTA_REPRODUCE_HPP
#define JPTA_REPRODUCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "jpta/config.hpp"

namespace jpta::cli {

// Reference scenario: M=64 antennas, f0=100 GHz, W=10 GHz, K=2048
// subcarriers, uniform weights, max_iter=10; behavior 1 sweeps 30 +- 22.5
// deg and behavior 2 splits -45 / 30 deg at k=0.
struct ReproduceOptions {
  bool fast = false;  // K=256 instead of 2048
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int jobs = 1;
  bool timing = false;
  int convergence_draws = 100;  // random instances per behavior in fig7
  double theta_step_deg = 1.0;
};

const std::vector<std::string>& figure_ids();

// Base experiment for the reference scenario (behavior 1 or 2, one
// line-search JPTA algorithm).
ExperimentConfig reference_experiment(int behavior, const ReproduceOptions& options);

// Runs one preset and writes plot-ready CSVs plus metadata.txt into
// <out_dir>/<figure>. Returns the written paths. Unknown ids raise ConfigError.
std::vector<std::string> reproduce(const std::string& figure, const ReproduceOptions& options);

// Smallest swept chain count whose F_obj reaches the reference (0: never).
int crossover_chains(const std::vector<int>& chains, const std::vector<double>& f_obj, double reference);

// Linear-interpolation percentile (q in [0, 100]) of unsorted data.
double percentile(std::vector<double> data, double q);

}  // namespace jpta::cli

#endif  // JPTA_REPRODUCE_HPP
