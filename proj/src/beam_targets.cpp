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

#include "jpta/beam_targets.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "jpta/errors.hpp"

namespace jpta {

std::vector<double> subcarrier_weights(const Eigen::VectorXd& norms, WeightScheme scheme) {
  std::vector<double> w(static_cast<size_t>(norms.size()));
  for (Eigen::Index p = 0; p < norms.size(); ++p) {
    const double power = norms[p] * norms[p];
    switch (scheme) {
      case WeightScheme::kUniform: w[static_cast<size_t>(p)] = 1.0; break;
      case WeightScheme::kPower: w[static_cast<size_t>(p)] = power; break;
      case WeightScheme::kSaturating: w[static_cast<size_t>(p)] = power / (1.0 + power); break;
    }
  }
  return w;
}

BeamTarget BeamTarget::from_columns(Eigen::MatrixXcd beams, std::vector<double> weights,
                                    double power_budget) {
  if (beams.rows() == 0 || beams.cols() == 0) {
    throw std::invalid_argument("BeamTarget: empty beam set");
  }
  if (static_cast<Eigen::Index>(weights.size()) != beams.cols()) {
    throw std::invalid_argument("BeamTarget: one weight per subcarrier required");
  }
  if (!beams.allFinite()) throw std::invalid_argument("BeamTarget: non-finite beam entries");

  BeamTarget t;
  t.norms_ = beams.colwise().norm().transpose();
  const double total = t.norms_.squaredNorm();
  if (total > power_budget * (1.0 + 1e-12)) {
    throw std::invalid_argument("BeamTarget: sum of |b_k|^2 = " + std::to_string(total) +
                                " exceeds the power budget " + std::to_string(power_budget));
  }
  t.directions_ = Eigen::MatrixXcd::Zero(beams.rows(), beams.cols());
  bool any_weight = false;
  for (Eigen::Index p = 0; p < beams.cols(); ++p) {
    double& w = weights[static_cast<size_t>(p)];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("BeamTarget: weights must be finite and nonnegative");
    }
    if (t.norms_[p] > 0.0) {
      t.directions_.col(p) = beams.col(p) / t.norms_[p];
    } else {
      w = 0.0;
    }
    any_weight = any_weight || w > 0.0;
  }
  if (!any_weight) throw std::invalid_argument("BeamTarget: all subcarrier weights are zero");
  t.beams_ = std::move(beams);
  t.weights_ = std::move(weights);
  t.power_budget_ = power_budget;
  return t;
}

BeamTarget BeamTarget::from_columns(Eigen::MatrixXcd beams, WeightScheme scheme,
                                    double power_budget) {
  std::vector<double> w = subcarrier_weights(beams.colwise().norm().transpose(), scheme);
  return from_columns(std::move(beams), std::move(w), power_budget);
}

double BeamTarget::weight_sum() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

namespace {

void check_angle(double theta, const char* what) {
  constexpr double slack = 1e-12;
  if (!(std::abs(theta) <= kPi / 2 + slack)) {
    throw std::invalid_argument(std::string(what) + " outside [-pi/2, pi/2]");
  }
}

void check_grid(const SystemConfig& config, const SubcarrierGrid& grid) {
  if (grid.size() != config.num_subcarriers()) {
    throw std::invalid_argument("subcarrier grid does not match the system config");
  }
}

// Steers subcarrier position p to angle_of(p) with uniform per-subcarrier power.
template <typename AngleFn>
BeamTarget steered_target(const SystemConfig& config, const SubcarrierGrid& grid,
                          AngleFn angle_of, WeightScheme scheme) {
  check_grid(config, grid);
  const int M = config.num_antennas();
  const int K = grid.size();
  const double amp = std::sqrt(config.total_power() / (static_cast<double>(M) * K));
  Eigen::MatrixXcd b(M, K);
  for (int p = 0; p < K; ++p) {
    b.col(p) = amp * array_response_at(M, grid.frequency_at(p), config.carrier_freq(),
                                       angle_of(grid.indices()[static_cast<size_t>(p)]));
  }
  return BeamTarget::from_columns(std::move(b), scheme, config.total_power());
}

}  // namespace

BeamTarget behavior1_target(const SystemConfig& config, const SubcarrierGrid& grid,
                            double theta0, double delta_theta, WeightScheme scheme) {
  check_angle(theta0 - std::abs(delta_theta) / 2, "behavior-1 sweep start");
  check_angle(theta0 + std::abs(delta_theta) / 2, "behavior-1 sweep end");
  const double K = static_cast<double>(grid.size());
  return steered_target(
      config, grid, [&](int k) { return theta0 + k * delta_theta / K; }, scheme);
}

BeamTarget behavior2_target(const SystemConfig& config, const SubcarrierGrid& grid,
                            double theta1, double theta2, WeightScheme scheme) {
  check_angle(theta1, "theta1");
  check_angle(theta2, "theta2");
  return steered_target(
      config, grid, [&](int k) { return k < 0 ? theta1 : theta2; }, scheme);
}

BeamTarget multi_angle_target(const SystemConfig& config, const SubcarrierGrid& grid,
                              const std::vector<int>& band_edges,
                              const std::vector<double>& angles, WeightScheme scheme) {
  if (angles.size() != band_edges.size() + 1) {
    throw std::invalid_argument("multi_angle_target: need exactly one angle per band");
  }
  for (double a : angles) check_angle(a, "band angle");
  int prev = grid.first_index();
  for (int edge : band_edges) {
    if (edge <= prev || edge > grid.last_index()) {
      throw std::invalid_argument(
          "multi_angle_target: band edges must be strictly increasing inside the grid");
    }
    prev = edge;
  }
  return steered_target(
      config, grid,
      [&](int k) {
        size_t band = 0;
        while (band < band_edges.size() && k >= band_edges[band]) ++band;
        return angles[band];
      },
      scheme);
}

namespace {

cdouble parse_pair(const std::string& token, int line_no) {
  const auto comma = token.find(',');
  if (comma == std::string::npos) {
    throw FormatError("target file line " + std::to_string(line_no) + ": expected re,im but got '" +
                      token + "'");
  }
  try {
    size_t used_re = 0, used_im = 0;
    const std::string re_s = token.substr(0, comma);
    const std::string im_s = token.substr(comma + 1);
    const double re = std::stod(re_s, &used_re);
    const double im = std::stod(im_s, &used_im);
    if (used_re != re_s.size() || used_im != im_s.size()) throw std::invalid_argument("trailing");
    return {re, im};
  } catch (const std::exception&) {
    throw FormatError("target file line " + std::to_string(line_no) + ": malformed number in '" +
                      token + "'");
  }
}

}  // namespace

BeamTarget read_custom_target(std::istream& in, const SystemConfig& config,
                              const SubcarrierGrid& grid, const CustomTargetOptions& options) {
  check_grid(config, grid);
  const int M = config.num_antennas();
  const int K = grid.size();
  Eigen::MatrixXcd b(M, K);
  int row = 0;
  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (row >= K) {
      throw FormatError("target file line " + std::to_string(line_no) + ": more than K=" +
                        std::to_string(K) + " subcarrier rows");
    }
    std::istringstream tokens(line);
    std::string token;
    int m0 = 0;
    while (tokens >> token) {
      if (m0 >= M) {
        throw FormatError("target file line " + std::to_string(line_no) + ": more than M=" +
                          std::to_string(M) + " entries");
      }
      b(m0++, row) = parse_pair(token, line_no);
    }
    if (m0 != M) {
      throw FormatError("target file line " + std::to_string(line_no) + ": expected M=" +
                        std::to_string(M) + " entries, found " + std::to_string(m0));
    }
    if (b.col(row).norm() == 0.0) {
      throw FormatError("target file line " + std::to_string(line_no) +
                        ": all-zero beam cannot be normalized");
    }
    ++row;
  }
  if (row != K) {
    throw FormatError("target file holds " + std::to_string(row) + " subcarrier rows, expected K=" +
                      std::to_string(K));
  }
  const double total = b.squaredNorm();
  if (total > config.total_power() * (1.0 + 1e-12)) {
    if (!options.rescale) {
      throw std::invalid_argument("custom target power " + std::to_string(total) +
                                  " exceeds P_sum " + std::to_string(config.total_power()) +
                                  " (enable rescaling to accept it)");
    }
    b *= std::sqrt(config.total_power() / total);
  }
  return BeamTarget::from_columns(std::move(b), options.scheme, config.total_power());
}

BeamTarget custom_target(const SystemConfig& config, const SubcarrierGrid& grid,
                         const std::string& path, const CustomTargetOptions& options) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open target file '" + path + "'");
  return read_custom_target(in, config, grid, options);
}

void write_target(std::ostream& out, const BeamTarget& target) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (int p = 0; p < target.num_subcarriers(); ++p) {
    line.str("");
    for (int m0 = 0; m0 < target.num_antennas(); ++m0) {
      const cdouble v = target.beams()(m0, p);
      if (m0) line << ' ';
      line << v.real() << ',' << v.imag();
    }
    out << line.str() << '\n';
  }
}

}  // namespace jpta
