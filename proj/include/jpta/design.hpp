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

#ifndef JPTA_DESIGN_HPP
#define JPTA_DESIGN_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jpta/array_model.hpp"
#include "jpta/beam_targets.hpp"

namespace jpta {

enum class TtdUpdate { kLineSearch, kWls };

struct DesignOptions {
  TtdUpdate ttd_update = TtdUpdate::kLineSearch;
  int max_iter = 10;
  // Uniform delay grid over [-kappa/(2W), kappa/(2W)] for the line search.
  int grid_size = 4096;
  // Sorted feasible delays in [0, kappa/W]; empty means continuous delays.
  std::vector<double> discrete_delays;
  bool enforce_nonnegative_delays = true;
  // Stop early once an iteration improves the analog objective by less.
  std::optional<double> convergence_epsilon;
  // Seeded uniform initialization of the digital phases instead of zeros.
  std::optional<std::uint64_t> random_init_seed;
  // Called after every iteration with the 1-based count and the current
  // (centered, unshifted) settings.
  std::function<void(int, const JptaBeamformer&)> on_iteration;

  void validate(const SystemConfig& config) const;
};

struct DesignResult {
  JptaBeamformer beamformer;
  // Analog objective after every completed iteration.
  std::vector<double> objective_trace;
  int iterations = 0;
  // Phase updates whose defining sum vanished (phase set to 0).
  int degenerate_updates = 0;
};

// |alpha_k| = |b_k|.
std::vector<double> digital_power_allocation(const BeamTarget& target);

// sum_{m in M_n} | sum_k w_k e^{j arg alpha_k} conj([bbar_k]_m) e^{-j 2 pi f_k tau} |.
double ttd_objective(const SystemConfig& config, const SubcarrierGrid& grid, int n, double tau,
                     const BeamTarget& target, std::span<const double> digital_phases);

// Grid argmax of ttd_objective over the centered delay range, refined by a
// parabola through the best point and its neighbours. Ties go to the
// smallest delay. A feasible incumbent replaces the result when it scores
// strictly higher, which keeps the alternating iteration monotone.
double ttd_update_line_search(const SystemConfig& config, const SubcarrierGrid& grid, int n,
                              const BeamTarget& target, std::span<const double> digital_phases,
                              const DesignOptions& options,
                              std::optional<double> incumbent = std::nullopt);

// Adds multiples of 2 pi so adjacent entries differ by at most pi. The first
// entry is kept as is.
std::vector<double> phase_unwrap(std::span<const double> seq);

// Closed-form delay from the weighted least-squares linear-phase fit, wrapped
// to one period [-K/(2W), K/(2W)) and clamped to the search range.
double ttd_update_wls(const SystemConfig& config, const SubcarrierGrid& grid, int n,
                      const BeamTarget& target, std::span<const double> digital_phases);

struct PhaseUpdate {
  double phase = 0.0;
  bool degenerate = false;
};

// Optimal phase of antenna m0 (0-based) given its group's delay.
PhaseUpdate ps_update(const SystemConfig& config, const SubcarrierGrid& grid, int m0, double tau,
                      const BeamTarget& target, std::span<const double> digital_phases);

// Optimal digital phase of subcarrier index k given the analog settings.
PhaseUpdate digital_phase_update(const SystemConfig& config, const SubcarrierGrid& grid, int k,
                                 std::span<const double> delays, std::span<const double> phases,
                                 const BeamTarget& target);

// Common offset that pushes the delays to the middle of the allowed range,
// and the shifted delays. Callers compensate arg alpha_k -= 2 pi f_k offset.
std::pair<std::vector<double>, double> center_delays(const SystemConfig& config,
                                                     std::span<const double> delays);

// Subtracts min(tau) from all delays and compensates the digital phases, so
// every e^{j arg alpha_k} T P d_k is unchanged.
JptaBeamformer shift_nonnegative(const JptaBeamformer& bf, const SubcarrierGrid& grid);

// Rounds every delay to the nearest member of the sorted set (ties to the
// smaller value) and re-optimizes the phases: one phase-shifter pass followed
// by a digital-phase pass.
JptaBeamformer quantize_delays(const SystemConfig& config, const SubcarrierGrid& grid,
                               const JptaBeamformer& bf, const BeamTarget& target,
                               std::span<const double> discrete_set);

// Alternating optimization of delays, phase shifts and digital phases.
DesignResult design_jpta(const SystemConfig& config, const SubcarrierGrid& grid,
                         const BeamTarget& target, const DesignOptions& options = {});

}  // namespace jpta

#endif  // JPTA_DESIGN_HPP
