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

#ifndef JPTA_ARRAY_MODEL_HPP
#define JPTA_ARRAY_MODEL_HPP

#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace jpta {

using cdouble = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wraps an angle into [-pi, pi).
double wrap_phase(double x);

// Physical description of a uniform linear array fed by one RF chain through
// a network of true-time-delay (TTD) units and per-antenna phase shifters.
//
// Antenna indices are stored 0-based (storage index m0 = m - 1). Each TTD n
// drives the antennas listed in groups()[n].
class SystemConfig {
 public:
  // Contiguous-block mapping: TTD n drives antennas (n-1)M/N < m <= nM/N.
  // Requires N to divide M.
  static SystemConfig make(int num_antennas, int num_ttds,
                           double carrier_freq_hz, double bandwidth_hz,
                           int num_subcarriers, double kappa,
                           double total_power);

  // Explicit mapping; groups hold 0-based antenna indices and must partition
  // {0..M-1} into N nonempty sets.
  static SystemConfig with_mapping(int num_antennas,
                                   std::vector<std::vector<int>> groups,
                                   double carrier_freq_hz, double bandwidth_hz,
                                   int num_subcarriers, double kappa,
                                   double total_power);

  int num_antennas() const { return num_antennas_; }
  int num_ttds() const { return static_cast<int>(groups_.size()); }
  double carrier_freq() const { return carrier_freq_; }
  double bandwidth() const { return bandwidth_; }
  int num_subcarriers() const { return num_subcarriers_; }
  double kappa() const { return kappa_; }
  double total_power() const { return total_power_; }

  const std::vector<std::vector<int>>& groups() const { return groups_; }
  // TTD index driving antenna m0.
  int ttd_of(int m0) const { return ttd_of_[static_cast<size_t>(m0)]; }

  // Half-width of the centered delay search range, kappa / (2W).
  double half_delay_range() const { return kappa_ / (2.0 * bandwidth_); }
  // Upper end of the physical delay range [0, kappa / W].
  double max_delay() const { return kappa_ / bandwidth_; }

 private:
  SystemConfig() = default;
  void validate() const;

  int num_antennas_ = 0;
  double carrier_freq_ = 0.0;
  double bandwidth_ = 0.0;
  int num_subcarriers_ = 0;
  double kappa_ = 0.0;
  double total_power_ = 0.0;
  std::vector<std::vector<int>> groups_;
  std::vector<int> ttd_of_;
};

// OFDM subcarrier indices floor((1-K)/2) .. floor((K-1)/2) and their
// frequencies f_k = f0 + k W / K. Columns of every per-subcarrier matrix in
// this library are ordered by ascending index, so position p holds index
// first_index() + p.
class SubcarrierGrid {
 public:
  explicit SubcarrierGrid(const SystemConfig& config);

  int size() const { return static_cast<int>(indices_.size()); }
  int first_index() const { return indices_.front(); }
  int last_index() const { return indices_.back(); }
  bool contains(int k) const { return k >= first_index() && k <= last_index(); }
  // Throws std::out_of_range for indices outside the grid.
  int position(int k) const;

  const std::vector<int>& indices() const { return indices_; }
  const std::vector<double>& frequencies() const { return freqs_; }
  double frequency(int k) const { return freqs_[static_cast<size_t>(position(k))]; }
  double frequency_at(int pos) const { return freqs_[static_cast<size_t>(pos)]; }
  // f_k - f0, exactly k W / K.
  double offset_at(int pos) const { return offsets_[static_cast<size_t>(pos)]; }
  double carrier() const { return carrier_; }

  double f_min() const { return freqs_.front(); }
  double f_max() const { return freqs_.back(); }

 private:
  std::vector<int> indices_;
  std::vector<double> freqs_;
  std::vector<double> offsets_;
  double carrier_ = 0.0;
};

SubcarrierGrid build_grid(const SystemConfig& config);

// Steering angle in radians, restricted to [-pi/2, pi/2].
class SteeringAngle {
 public:
  explicit SteeringAngle(double theta_rad);
  static SteeringAngle from_degrees(double deg);
  double radians() const { return theta_; }
  double degrees() const { return theta_ * 180.0 / kPi; }

 private:
  double theta_;
};

// The designed JPTA settings: N delays (s), M phases (rad) and one complex
// digital weight per subcarrier (ascending index order).
struct JptaBeamformer {
  std::vector<double> delays;
  std::vector<double> phases;
  std::vector<cdouble> alpha;
};

// Element m0 is exp(j m0 pi sin(theta) f_k / f0).
Eigen::VectorXcd array_response(const SystemConfig& config,
                                const SubcarrierGrid& grid, int k,
                                SteeringAngle theta);

// Same response at an arbitrary frequency; used by the gain map and targets.
Eigen::VectorXcd array_response_at(int num_antennas, double freq_hz,
                                   double carrier_hz, double theta_rad);

// T P d_k: element m0 is exp(j phi_m0) exp(-j 2 pi f_k tau_n(m0)) / sqrt(M).
Eigen::VectorXcd effective_beamformer(const SystemConfig& config,
                                      const SubcarrierGrid& grid,
                                      const JptaBeamformer& bf, int k);

// All K effective beamformers as columns of an M x K matrix.
Eigen::MatrixXcd effective_beam_set(const SystemConfig& config,
                                    const SubcarrierGrid& grid,
                                    const JptaBeamformer& bf);

// |a_k(theta)^H w|^2.
double array_gain(const SystemConfig& config, const SubcarrierGrid& grid,
                  const Eigen::VectorXcd& w, int k, SteeringAngle theta);

// K x T matrix of array gains for beams (M x K, column per subcarrier) over
// the given angles (radians).
Eigen::MatrixXd gain_map(const SystemConfig& config, const SubcarrierGrid& grid,
                         const Eigen::MatrixXcd& beams,
                         std::span<const double> thetas);

// 1 degree steps over [-90, 90], in radians.
std::vector<double> default_theta_grid();

// 10 log10(g), floored at -100 dB.
double gain_to_db(double gain_linear);

}  // namespace jpta

#endif  // JPTA_ARRAY_MODEL_HPP
