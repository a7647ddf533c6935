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

#include "jpta/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jpta/beam_targets.hpp"
#include "jpta/design.hpp"

namespace jpta {

namespace {

void require_angle(double theta, const char* what) {
  if (!(std::abs(theta) <= kPi / 2 + 1e-12)) {
    throw std::invalid_argument(std::string(what) + " outside [-pi/2, pi/2]");
  }
}

// Mean-centers, records the unclamped values, then clamps to the search range.
void center_and_clamp(const SystemConfig& config, std::vector<double>& delays,
                      std::vector<double>& unclamped) {
  const double mean = std::accumulate(delays.begin(), delays.end(), 0.0) / delays.size();
  for (double& t : delays) t -= mean;
  unclamped = delays;
  const double h = config.half_delay_range();
  for (double& t : delays) t = std::clamp(t, -h, h);
}

// Digital magnitudes sqrt(P/K), phases from the digital-phase update, and the
// optional nonnegative shift.
void finish(const SystemConfig& config, const SubcarrierGrid& grid, const BeamTarget& target,
            const HeuristicOptions& options, HeuristicDesign& design) {
  JptaBeamformer& bf = design.beamformer;
  const double magnitude = std::sqrt(config.total_power() / grid.size());
  bf.alpha.resize(static_cast<size_t>(grid.size()));
  for (int p = 0; p < grid.size(); ++p) {
    const PhaseUpdate u = digital_phase_update(config, grid, grid.indices()[static_cast<size_t>(p)],
                                               bf.delays, bf.phases, target);
    bf.alpha[static_cast<size_t>(p)] = std::polar(magnitude, u.phase);
  }
  if (options.enforce_nonnegative_delays) bf = shift_nonnegative(bf, grid);
}

}  // namespace

HeuristicDesign heuristic_behavior1(const SystemConfig& config, const SubcarrierGrid& grid,
                                    double theta0, double delta_theta,
                                    const HeuristicOptions& options) {
  require_angle(theta0 - std::abs(delta_theta) / 2, "behavior-1 sweep start");
  require_angle(theta0 + std::abs(delta_theta) / 2, "behavior-1 sweep end");
  const BeamTarget target = behavior1_target(config, grid, theta0, delta_theta);

  const double f0 = config.carrier_freq();
  const double W = config.bandwidth();
  const double slope = std::sin(theta0 - delta_theta / 2) * grid.f_min() -
                       std::sin(theta0 + delta_theta / 2) * grid.f_max();

  HeuristicDesign design;
  JptaBeamformer& bf = design.beamformer;
  bf.delays.assign(static_cast<size_t>(config.num_ttds()), 0.0);
  for (int n = 0; n < config.num_ttds(); ++n) {
    const auto& group = config.groups()[static_cast<size_t>(n)];
    double sum = 0.0;
    for (int m0 : group) sum += (m0 + 1) * slope;  // 1-based antenna index
    bf.delays[static_cast<size_t>(n)] = sum / (2.0 * W * f0 * group.size());
  }
  center_and_clamp(config, bf.delays, design.unclamped_delays);

  bf.phases.assign(static_cast<size_t>(config.num_antennas()), 0.0);
  for (int m0 = 0; m0 < config.num_antennas(); ++m0) {
    const double tau = bf.delays[static_cast<size_t>(config.ttd_of(m0))];
    bf.phases[static_cast<size_t>(m0)] = wrap_phase(kPi * m0 * std::sin(theta0) + kTwoPi * f0 * tau);
  }
  finish(config, grid, target, options, design);
  return design;
}

Eigen::VectorXcd midpoint_beam(int num_antennas, double theta1, double theta2, bool strict_verbatim) {
  const double s1 = std::sin(strict_verbatim ? theta2 : theta1);
  const double s2 = std::sin(theta2);
  Eigen::VectorXcd b(num_antennas);
  for (int m0 = 0; m0 < num_antennas; ++m0) {
    const int m = m0 + 1;
    b[m0] = (std::polar(1.0, kPi * m * s1) + std::polar(1.0, kPi * m * s2)) /
            std::sqrt(2.0 * num_antennas);
  }
  const double norm = b.norm();
  if (norm > 0.0) b /= norm;
  return b;
}

HeuristicDesign heuristic_behavior2(const SystemConfig& config, const SubcarrierGrid& grid,
                                    double theta1, double theta2, const HeuristicOptions& options) {
  require_angle(theta1, "theta1");
  require_angle(theta2, "theta2");
  const BeamTarget target = behavior2_target(config, grid, theta1, theta2);
  const int M = config.num_antennas();
  const Eigen::VectorXcd mid = midpoint_beam(M, theta1, theta2, options.strict_verbatim);

  const double f0 = config.carrier_freq();
  const double W = config.bandwidth();
  // f_{floor(K/3)}; the index always lies inside the grid.
  const double f_ref = f0 + std::floor(grid.size() / 3.0) * W / grid.size();
  const double s2 = std::sin(theta2);

  HeuristicDesign design;
  JptaBeamformer& bf = design.beamformer;
  bf.delays.assign(static_cast<size_t>(config.num_ttds()), 0.0);
  for (int n = 0; n < config.num_ttds(); ++n) {
    cdouble acc = 0.0;
    for (int m0 : config.groups()[static_cast<size_t>(n)]) {
      acc += std::conj(mid[m0]) * std::polar(1.0, kPi * (m0 + 1) * s2 * f_ref / f0);
    }
    bf.delays[static_cast<size_t>(n)] = -3.0 / (kTwoPi * W) * std::arg(acc);
  }
  center_and_clamp(config, bf.delays, design.unclamped_delays);

  bf.phases.assign(static_cast<size_t>(M), 0.0);
  const double tiny = 1e-12 / std::sqrt(static_cast<double>(M));
  for (int m0 = 0; m0 < M; ++m0) {
    const double tau = bf.delays[static_cast<size_t>(config.ttd_of(m0))];
    double base = 0.0;
    if (std::abs(mid[m0]) > tiny) {
      base = std::arg(mid[m0]);
    } else {
      ++design.degenerate_phases;
    }
    bf.phases[static_cast<size_t>(m0)] = wrap_phase(base + kTwoPi * f0 * tau);
  }
  finish(config, grid, target, options, design);
  return design;
}

double required_delay_budget(Behavior behavior, const SystemConfig& config,
                             const HeuristicParams& params) {
  if (behavior == Behavior::kOne) {
    return config.num_antennas() * std::abs(std::sin(params.delta_theta / 2)) / config.bandwidth();
  }
  return 3.0 / config.bandwidth();
}

}  // namespace jpta
