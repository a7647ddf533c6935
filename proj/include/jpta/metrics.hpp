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

#ifndef JPTA_METRICS_HPP
#define JPTA_METRICS_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jpta/array_model.hpp"
#include "jpta/beam_targets.hpp"

namespace jpta {

// Full matching objective (lower is better):
//   (1/K) sum_k [ (|b_k| - |alpha_k|)^2 + w_k |bbar_k - T P d_k e^{j arg alpha_k}|^2 ].
double objective_tilde(const BeamTarget& target, const JptaBeamformer& bf,
                       const SystemConfig& config, const SubcarrierGrid& grid);

// Analog objective sum_k w_k Re[e^{j arg alpha_k} bbar_k^H w_k] for a beam set
// (M x K) and digital phases.
double analog_objective(const BeamTarget& target, const Eigen::MatrixXcd& beams,
                        std::span<const double> digital_phases);
double analog_objective(const BeamTarget& target, const JptaBeamformer& bf,
                        const SystemConfig& config, const SubcarrierGrid& grid);

// |bbar_k^H w_k| per subcarrier.
std::vector<double> per_subcarrier_match(const BeamTarget& target, const Eigen::MatrixXcd& beams);

// Goodness of fit sum_k w_k |bbar_k^H w_k| / sum_k w_k. Every column of
// beams must have unit norm (within 1e-9); throws std::invalid_argument
// otherwise.
double fit_objective(const BeamTarget& target, const Eigen::MatrixXcd& beams);

// Scales every nonzero column to unit norm; zero columns stay zero.
Eigen::MatrixXcd normalize_columns(const Eigen::MatrixXcd& beams);

struct FitReport {
  double f_obj = 0.0;
  double f_tilde_obj = 0.0;
  std::vector<double> per_subcarrier_match;
  std::vector<double> convergence_trace;
  std::map<std::string, std::string> metadata;
};

FitReport make_fit_report(const BeamTarget& target, const SystemConfig& config,
                          const SubcarrierGrid& grid, const JptaBeamformer& bf,
                          std::vector<double> trace = {});

}  // namespace jpta

#endif  // JPTA_METRICS_HPP
