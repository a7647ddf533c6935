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

#ifndef JPTA_BEAM_TARGETS_HPP
#define JPTA_BEAM_TARGETS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jpta/array_model.hpp"

namespace jpta {

enum class WeightScheme {
  kUniform,     // w_k = 1
  kPower,       // w_k = |b_k|^2
  kSaturating,  // w_k = |b_k|^2 / (1 + |b_k|^2)
};

std::vector<double> subcarrier_weights(const Eigen::VectorXd& norms, WeightScheme scheme);

// Desired per-subcarrier beams b_k (columns, ascending subcarrier index) with
// their normalized directions, subcarrier weights and the power budget.
//
// Subcarriers with |b_k| = 0 carry a zero direction and their weight is
// forced to zero, so every sum over k skips them.
class BeamTarget {
 public:
  static BeamTarget from_columns(Eigen::MatrixXcd beams, std::vector<double> weights,
                                 double power_budget);
  static BeamTarget from_columns(Eigen::MatrixXcd beams, WeightScheme scheme,
                                 double power_budget);

  int num_antennas() const { return static_cast<int>(beams_.rows()); }
  int num_subcarriers() const { return static_cast<int>(beams_.cols()); }

  const Eigen::MatrixXcd& beams() const { return beams_; }
  const Eigen::MatrixXcd& directions() const { return directions_; }
  const Eigen::VectorXd& norms() const { return norms_; }
  const std::vector<double>& weights() const { return weights_; }
  double power_budget() const { return power_budget_; }
  double total_power() const { return norms_.squaredNorm(); }
  double weight_sum() const;

 private:
  BeamTarget() = default;

  Eigen::MatrixXcd beams_;
  Eigen::MatrixXcd directions_;
  Eigen::VectorXd norms_;
  std::vector<double> weights_;
  double power_budget_ = 0.0;
};

// Behavior 1: b_k = sqrt(P/(MK)) a_k(theta0 + k dtheta / K).
BeamTarget behavior1_target(const SystemConfig& config, const SubcarrierGrid& grid,
                            double theta0, double delta_theta,
                            WeightScheme scheme = WeightScheme::kUniform);

// Behavior 2: steer to theta1 for k < 0 and theta2 for k >= 0.
BeamTarget behavior2_target(const SystemConfig& config, const SubcarrierGrid& grid,
                            double theta1, double theta2,
                            WeightScheme scheme = WeightScheme::kUniform);

// Piecewise-constant steering. band_edges lists the first subcarrier index of
// every band after the first, strictly increasing inside
// (first_index, last_index]; angles holds one angle per band.
BeamTarget multi_angle_target(const SystemConfig& config, const SubcarrierGrid& grid,
                              const std::vector<int>& band_edges,
                              const std::vector<double>& angles,
                              WeightScheme scheme = WeightScheme::kUniform);

struct CustomTargetOptions {
  bool rescale = false;
  WeightScheme scheme = WeightScheme::kUniform;
};

// Text format: one subcarrier per line in ascending index order, M
// whitespace-separated "re,im" pairs per line. Blank lines and lines starting
// with '#' are ignored.
BeamTarget read_custom_target(std::istream& in, const SystemConfig& config,
                              const SubcarrierGrid& grid, const CustomTargetOptions& options);
BeamTarget custom_target(const SystemConfig& config, const SubcarrierGrid& grid,
                         const std::string& path, const CustomTargetOptions& options);

void write_target(std::ostream& out, const BeamTarget& target);

}  // namespace jpta

#endif  // JPTA_BEAM_TARGETS_HPP
