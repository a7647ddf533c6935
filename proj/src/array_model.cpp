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

#include "jpta/array_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jpta {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

double wrap_phase(double x) {
  double y = x - kTwoPi * std::floor((x + kPi) / kTwoPi);
  // Rounding can land exactly on +pi.
  if (y >= kPi) y -= kTwoPi;
  if (y < -kPi) y = -kPi;
  return y;
}

SystemConfig SystemConfig::make(int num_antennas, int num_ttds,
                                double carrier_freq_hz, double bandwidth_hz,
                                int num_subcarriers, double kappa,
                                double total_power) {
  if (num_antennas <= 0 || num_ttds <= 0) {
    throw std::invalid_argument("SystemConfig: M and N must be positive");
  }
  if (num_ttds > num_antennas) {
    throw std::invalid_argument("SystemConfig: N must not exceed M");
  }
  if (num_antennas % num_ttds != 0) {
    throw std::invalid_argument(
        "SystemConfig: contiguous TTD mapping requires N to divide M (M=" +
        std::to_string(num_antennas) + ", N=" + std::to_string(num_ttds) + ")");
  }
  const int per_group = num_antennas / num_ttds;
  std::vector<std::vector<int>> groups(static_cast<size_t>(num_ttds));
  for (int n = 0; n < num_ttds; ++n) {
    for (int j = 0; j < per_group; ++j) {
      groups[static_cast<size_t>(n)].push_back(n * per_group + j);
    }
  }
  return with_mapping(num_antennas, std::move(groups), carrier_freq_hz,
                      bandwidth_hz, num_subcarriers, kappa, total_power);
}

SystemConfig SystemConfig::with_mapping(int num_antennas,
                                        std::vector<std::vector<int>> groups,
                                        double carrier_freq_hz,
                                        double bandwidth_hz,
                                        int num_subcarriers, double kappa,
                                        double total_power) {
  SystemConfig c;
  c.num_antennas_ = num_antennas;
  c.carrier_freq_ = carrier_freq_hz;
  c.bandwidth_ = bandwidth_hz;
  c.num_subcarriers_ = num_subcarriers;
  c.kappa_ = kappa;
  c.total_power_ = total_power;
  c.groups_ = std::move(groups);
  c.validate();
  c.ttd_of_.assign(static_cast<size_t>(num_antennas), -1);
  for (size_t n = 0; n < c.groups_.size(); ++n) {
    for (int m0 : c.groups_[n]) c.ttd_of_[static_cast<size_t>(m0)] = static_cast<int>(n);
  }
  return c;
}

void SystemConfig::validate() const {
  if (num_antennas_ <= 0) throw std::invalid_argument("SystemConfig: M must be positive");
  if (groups_.empty()) throw std::invalid_argument("SystemConfig: N must be positive");
  if (static_cast<int>(groups_.size()) > num_antennas_) {
    throw std::invalid_argument("SystemConfig: N must not exceed M");
  }
  if (num_subcarriers_ <= 0) throw std::invalid_argument("SystemConfig: K must be positive");
  if (!(bandwidth_ > 0.0)) throw std::invalid_argument("SystemConfig: W must be positive");
  if (!(carrier_freq_ > bandwidth_ / 2.0)) {
    throw std::invalid_argument("SystemConfig: f0 must exceed W/2");
  }
  if (!(kappa_ >= 0.0)) throw std::invalid_argument("SystemConfig: kappa must be nonnegative");
  if (!(total_power_ > 0.0)) throw std::invalid_argument("SystemConfig: P_sum must be positive");

  std::vector<int> seen(static_cast<size_t>(num_antennas_), 0);
  for (const auto& g : groups_) {
    if (g.empty()) throw std::invalid_argument("SystemConfig: empty TTD group");
    for (int m0 : g) {
      if (m0 < 0 || m0 >= num_antennas_) {
        throw std::invalid_argument("SystemConfig: antenna index out of range in TTD mapping");
      }
      if (seen[static_cast<size_t>(m0)]++) {
        throw std::invalid_argument("SystemConfig: antenna assigned to more than one TTD");
      }
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw std::invalid_argument("SystemConfig: antenna not assigned to any TTD");
  }
}

SubcarrierGrid::SubcarrierGrid(const SystemConfig& config) : carrier_(config.carrier_freq()) {
  const int K = config.num_subcarriers();
  const int first = floor_div(1 - K, 2);
  const int last = floor_div(K - 1, 2);
  const double step = config.bandwidth() / static_cast<double>(K);
  indices_.reserve(static_cast<size_t>(K));
  for (int k = first; k <= last; ++k) {
    indices_.push_back(k);
    offsets_.push_back(static_cast<double>(k) * step);
    freqs_.push_back(carrier_ + static_cast<double>(k) * step);
  }
}

int SubcarrierGrid::position(int k) const {
  if (!contains(k)) {
    throw std::out_of_range("subcarrier index " + std::to_string(k) + " outside grid [" +
                            std::to_string(first_index()) + ", " +
                            std::to_string(last_index()) + "]");
  }
  return k - first_index();
}

SubcarrierGrid build_grid(const SystemConfig& config) { return SubcarrierGrid(config); }

SteeringAngle::SteeringAngle(double theta_rad) : theta_(theta_rad) {
  // Small slack for values produced by degree conversion.
  constexpr double slack = 1e-12;
  if (!(theta_rad >= -kPi / 2 - slack && theta_rad <= kPi / 2 + slack)) {
    throw std::invalid_argument("steering angle " + std::to_string(theta_rad) +
                                " rad outside [-pi/2, pi/2]");
  }
}

SteeringAngle SteeringAngle::from_degrees(double deg) { return SteeringAngle(deg * kPi / 180.0); }

Eigen::VectorXcd array_response_at(int num_antennas, double freq_hz, double carrier_hz,
                                   double theta_rad) {
  const double step = kPi * std::sin(theta_rad) * freq_hz / carrier_hz;
  Eigen::VectorXcd a(num_antennas);
  for (int m0 = 0; m0 < num_antennas; ++m0) a[m0] = std::polar(1.0, step * m0);
  return a;
}

Eigen::VectorXcd array_response(const SystemConfig& config, const SubcarrierGrid& grid, int k,
                                SteeringAngle theta) {
  return array_response_at(config.num_antennas(), grid.frequency(k), config.carrier_freq(),
                           theta.radians());
}

namespace {

void check_dimensions(const SystemConfig& config, const SubcarrierGrid& grid,
                      const JptaBeamformer& bf) {
  if (static_cast<int>(bf.delays.size()) != config.num_ttds() ||
      static_cast<int>(bf.phases.size()) != config.num_antennas()) {
    throw std::invalid_argument("beamformer dimensions do not match the system config");
  }
  if (!bf.alpha.empty() && static_cast<int>(bf.alpha.size()) != grid.size()) {
    throw std::invalid_argument("beamformer digital weights do not match the subcarrier grid");
  }
}

}  // namespace

Eigen::VectorXcd effective_beamformer(const SystemConfig& config, const SubcarrierGrid& grid,
                                      const JptaBeamformer& bf, int k) {
  check_dimensions(config, grid, bf);
  const double f = grid.frequency(k);
  const int M = config.num_antennas();
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  Eigen::VectorXcd w(M);
  for (int m0 = 0; m0 < M; ++m0) {
    const double tau = bf.delays[static_cast<size_t>(config.ttd_of(m0))];
    w[m0] = std::polar(scale, bf.phases[static_cast<size_t>(m0)] - kTwoPi * f * tau);
  }
  return w;
}

Eigen::MatrixXcd effective_beam_set(const SystemConfig& config, const SubcarrierGrid& grid,
                                    const JptaBeamformer& bf) {
  Eigen::MatrixXcd beams(config.num_antennas(), grid.size());
  for (int p = 0; p < grid.size(); ++p) {
    beams.col(p) = effective_beamformer(config, grid, bf, grid.indices()[static_cast<size_t>(p)]);
  }
  return beams;
}

double array_gain(const SystemConfig& config, const SubcarrierGrid& grid,
                  const Eigen::VectorXcd& w, int k, SteeringAngle theta) {
  if (w.size() != config.num_antennas()) {
    throw std::invalid_argument("array_gain: beamformer length must equal M");
  }
  const Eigen::VectorXcd a = array_response(config, grid, k, theta);
  return std::norm(a.dot(w));  // Eigen's dot conjugates the left operand.
}

Eigen::MatrixXd gain_map(const SystemConfig& config, const SubcarrierGrid& grid,
                         const Eigen::MatrixXcd& beams, std::span<const double> thetas) {
  if (thetas.empty()) throw std::invalid_argument("gain_map: empty theta grid");
  if (beams.rows() != config.num_antennas() || beams.cols() != grid.size()) {
    throw std::invalid_argument("gain_map: beam set must be M x K");
  }
  const int T = static_cast<int>(thetas.size());
  Eigen::MatrixXd out(grid.size(), T);
  const int M = config.num_antennas();
  for (int p = 0; p < grid.size(); ++p) {
    const double ratio = grid.frequency_at(p) / config.carrier_freq();
    for (int t = 0; t < T; ++t) {
      const double step = kPi * std::sin(thetas[static_cast<size_t>(t)]) * ratio;
      cdouble acc = 0.0;
      for (int m0 = 0; m0 < M; ++m0) acc += std::polar(1.0, -step * m0) * beams(m0, p);
      out(p, t) = std::norm(acc);
    }
  }
  return out;
}

std::vector<double> default_theta_grid() {
  std::vector<double> thetas;
  for (int d = -90; d <= 90; ++d) thetas.push_back(d * kPi / 180.0);
  return thetas;
}

double gain_to_db(double gain_linear) {
  if (!(gain_linear > 1e-10)) return -100.0;
  return 10.0 * std::log10(gain_linear);
}

}  // namespace jpta
