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

#ifndef JPTA_HEURISTICS_HPP
#define JPTA_HEURISTICS_HPP

#include <vector>

#include <Eigen/Dense>

#include "jpta/array_model.hpp"

namespace jpta {

enum class Behavior { kOne, kTwo };

struct HeuristicParams {
  Behavior behavior = Behavior::kOne;
  double theta0 = 0.0;       // behavior 1 sweep center
  double delta_theta = 0.0;  // behavior 1 sweep width
  double theta1 = 0.0;       // behavior 2, k < 0
  double theta2 = 0.0;       // behavior 2, k >= 0
};

struct HeuristicOptions {
  bool enforce_nonnegative_delays = true;
  // Behavior 2 only: build the midpoint beam from sin(theta2) in both terms,
  // exactly as the original printed recipe does.
  bool strict_verbatim = false;
};

struct HeuristicDesign {
  JptaBeamformer beamformer;
  // Mean-centered delays before clamping to the search range.
  std::vector<double> unclamped_delays;
  // Antennas whose midpoint-beam entry vanished (phase forced to 0).
  int degenerate_phases = 0;
};

// Closed-form rainbow-beam design: per-group mean of the linear phase slope
// between f_min and f_max, phases matched at the center subcarrier.
HeuristicDesign heuristic_behavior1(const SystemConfig& config, const SubcarrierGrid& grid,
                                    double theta0, double delta_theta,
                                    const HeuristicOptions& options = {});

// Closed-form two-angle design from the linear-phase approximation through
// the midpoint beam.
HeuristicDesign heuristic_behavior2(const SystemConfig& config, const SubcarrierGrid& grid,
                                    double theta1, double theta2,
                                    const HeuristicOptions& options = {});

// Midpoint beam [e^{j pi m sin(theta1)} + e^{j pi m sin(theta2)}], m = 1..M,
// scaled to unit norm (zero when the two responses cancel everywhere).
Eigen::VectorXcd midpoint_beam(int num_antennas, double theta1, double theta2,
                               bool strict_verbatim = false);

// Delay spread the heuristics need without clipping: M |sin(dtheta/2)| / W
// for behavior 1 and 3 / W for behavior 2.
double required_delay_budget(Behavior behavior, const SystemConfig& config,
                             const HeuristicParams& params);

}  // namespace jpta

#endif  // JPTA_HEURISTICS_HPP
