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

#include "jpta/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jpta {

namespace {

void check_shape(const BeamTarget& target, const Eigen::MatrixXcd& beams) {
  if (beams.rows() != target.num_antennas() || beams.cols() != target.num_subcarriers()) {
    throw std::invalid_argument("beam set must be M x K to match the target");
  }
}

}  // namespace

double objective_tilde(const BeamTarget& target, const JptaBeamformer& bf,
                       const SystemConfig& config, const SubcarrierGrid& grid) {
  const Eigen::MatrixXcd beams = effective_beam_set(config, grid, bf);
  check_shape(target, beams);
  if (static_cast<int>(bf.alpha.size()) != target.num_subcarriers()) {
    throw std::invalid_argument("objective_tilde: one digital weight per subcarrier required");
  }
  const int K = target.num_subcarriers();
  double total = 0.0;
  for (int p = 0; p < K; ++p) {
    const cdouble alpha = bf.alpha[static_cast<size_t>(p)];
    const double power_gap = target.norms()[p] - std::abs(alpha);
    const cdouble rot = std::polar(1.0, std::arg(alpha));
    const double beam_gap = (target.directions().col(p) - beams.col(p) * rot).squaredNorm();
    total += power_gap * power_gap + target.weights()[static_cast<size_t>(p)] * beam_gap;
  }
  return total / K;
}

double analog_objective(const BeamTarget& target, const Eigen::MatrixXcd& beams,
                        std::span<const double> digital_phases) {
  check_shape(target, beams);
  if (static_cast<int>(digital_phases.size()) != target.num_subcarriers()) {
    throw std::invalid_argument("analog_objective: one digital phase per subcarrier required");
  }
  double total = 0.0;
  for (int p = 0; p < target.num_subcarriers(); ++p) {
    const double w = target.weights()[static_cast<size_t>(p)];
    if (w == 0.0) continue;
    const cdouble inner = target.directions().col(p).dot(beams.col(p));
    total += w * (std::polar(1.0, digital_phases[static_cast<size_t>(p)]) * inner).real();
  }
  return total;
}

double analog_objective(const BeamTarget& target, const JptaBeamformer& bf,
                        const SystemConfig& config, const SubcarrierGrid& grid) {
  std::vector<double> phases(bf.alpha.size());
  for (size_t p = 0; p < bf.alpha.size(); ++p) phases[p] = std::arg(bf.alpha[p]);
  return analog_objective(target, effective_beam_set(config, grid, bf), phases);
}

std::vector<double> per_subcarrier_match(const BeamTarget& target, const Eigen::MatrixXcd& beams) {
  check_shape(target, beams);
  std::vector<double> match(static_cast<size_t>(target.num_subcarriers()));
  for (int p = 0; p < target.num_subcarriers(); ++p) {
    match[static_cast<size_t>(p)] = std::abs(target.directions().col(p).dot(beams.col(p)));
  }
  return match;
}

double fit_objective(const BeamTarget& target, const Eigen::MatrixXcd& beams) {
  check_shape(target, beams);
  for (int p = 0; p < target.num_subcarriers(); ++p) {
    if (std::abs(beams.col(p).norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("fit_objective: beam for subcarrier position " +
                                  std::to_string(p) + " is not unit norm");
    }
  }
  const std::vector<double> match = per_subcarrier_match(target, beams);
  double num = 0.0;
  for (size_t p = 0; p < match.size(); ++p) num += target.weights()[p] * match[p];
  return num / target.weight_sum();
}

Eigen::MatrixXcd normalize_columns(const Eigen::MatrixXcd& beams) {
  Eigen::MatrixXcd out = beams;
  for (Eigen::Index p = 0; p < out.cols(); ++p) {
    const double n = out.col(p).norm();
    if (n > 0.0) out.col(p) /= n;
  }
  return out;
}

FitReport make_fit_report(const BeamTarget& target, const SystemConfig& config,
                          const SubcarrierGrid& grid, const JptaBeamformer& bf,
                          std::vector<double> trace) {
  const Eigen::MatrixXcd beams = effective_beam_set(config, grid, bf);
  FitReport report;
  report.f_obj = fit_objective(target, beams);
  report.f_tilde_obj = objective_tilde(target, bf, config, grid);
  report.per_subcarrier_match = per_subcarrier_match(target, beams);
  report.convergence_trace = std::move(trace);
  return report;
}

}  // namespace jpta
