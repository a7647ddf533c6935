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

#include "jpta/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "jpta/errors.hpp"
#include "jpta/metrics.hpp"

namespace jpta {

void DesignOptions::validate(const SystemConfig& config) const {
  if (max_iter < 1) throw std::invalid_argument("DesignOptions: max_iter must be positive");
  if (grid_size < 3) throw std::invalid_argument("DesignOptions: line-search grid needs >= 3 points");
  if (convergence_epsilon && !(*convergence_epsilon >= 0.0)) {
    throw std::invalid_argument("DesignOptions: convergence epsilon must be nonnegative");
  }
  if (!std::is_sorted(discrete_delays.begin(), discrete_delays.end())) {
    throw std::invalid_argument("DesignOptions: discrete delay set must be sorted");
  }
  const double hi = config.max_delay() * (1.0 + 1e-12);
  for (double d : discrete_delays) {
    if (!(d >= 0.0 && d <= hi)) {
      throw std::invalid_argument("DesignOptions: discrete delay outside [0, kappa/W]");
    }
  }
}

std::vector<double> digital_power_allocation(const BeamTarget& target) {
  const auto& n = target.norms();
  return {n.data(), n.data() + n.size()};
}

namespace {

void check_inputs(const SystemConfig& config, const SubcarrierGrid& grid, const BeamTarget& target,
                  std::span<const double> digital_phases) {
  if (target.num_antennas() != config.num_antennas() || target.num_subcarriers() != grid.size()) {
    throw std::invalid_argument("target dimensions do not match the system config");
  }
  if (static_cast<int>(digital_phases.size()) != grid.size()) {
    throw std::invalid_argument("one digital phase per subcarrier required");
  }
}

void check_group(const SystemConfig& config, int n) {
  if (n < 0 || n >= config.num_ttds()) {
    throw std::out_of_range("TTD index " + std::to_string(n) + " out of range");
  }
}

// C(m, p) = w_p e^{j arg alpha_p} conj([bbar_p]_m). Every TTD objective and
// phase update is a sum over p of these coefficients times a delay phasor.
Eigen::MatrixXcd coefficient_matrix(const BeamTarget& target, std::span<const double> digital_phases) {
  Eigen::MatrixXcd c = target.directions().conjugate();
  for (int p = 0; p < target.num_subcarriers(); ++p) {
    c.col(p) *= std::polar(target.weights()[static_cast<size_t>(p)], digital_phases[static_cast<size_t>(p)]);
  }
  return c;
}

// Evaluates the TTD objective on the uniform delay grid, one row per group.
// The carrier term e^{-j 2 pi f0 tau} is common to all subcarriers and drops
// out under the magnitude, so only the offsets k W / K enter the phasors.
class DelaySearch {
 public:
  DelaySearch(const SystemConfig& config, const SubcarrierGrid& grid, const BeamTarget& target,
              std::span<const double> digital_phases, int grid_size)
      : config_(config),
        coef_(coefficient_matrix(target, digital_phases)),
        offsets_(grid.size()),
        half_range_(config.half_delay_range()),
        grid_size_(grid_size) {
    for (int p = 0; p < grid.size(); ++p) offsets_[p] = grid.offset_at(p);
    step_ = grid_size_ > 1 ? 2.0 * half_range_ / (grid_size_ - 1) : 0.0;
  }

  double tau_at(int i) const { return -half_range_ + i * step_; }

  double group_objective(int n, double tau) const {
    const Eigen::VectorXcd phasor = phasors(tau);
    double total = 0.0;
    for (int m0 : config_.groups()[static_cast<size_t>(n)]) {
      total += std::abs((coef_.row(m0) * phasor).value());
    }
    return total;
  }

  // Best delay for each listed group.
  std::vector<double> search(const std::vector<int>& groups,
                             const std::vector<std::optional<double>>& incumbents) const {
    std::vector<double> result(groups.size(), 0.0);
    if (half_range_ == 0.0) return result;  // kappa = 0 admits tau = 0 only.

    // Rows of coef_ for the requested groups, and their group slot.
    std::vector<int> rows;
    std::vector<int> slot;
    for (size_t g = 0; g < groups.size(); ++g) {
      for (int m0 : config_.groups()[static_cast<size_t>(groups[g])]) {
        rows.push_back(m0);
        slot.push_back(static_cast<int>(g));
      }
    }
    Eigen::MatrixXcd sub(static_cast<Eigen::Index>(rows.size()), coef_.cols());
    for (size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = coef_.row(rows[r]);

    const int K = static_cast<int>(offsets_.size());
    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups.size()), grid_size_);
    constexpr int kBlock = 512;
    Eigen::MatrixXcd e(K, kBlock);
    for (int i0 = 0; i0 < grid_size_; i0 += kBlock) {
      const int width = std::min(kBlock, grid_size_ - i0);
      for (int j = 0; j < width; ++j) {
        const double tau = tau_at(i0 + j);
        for (int p = 0; p < K; ++p) e(p, j) = std::polar(1.0, -kTwoPi * offsets_[p] * tau);
      }
      const Eigen::MatrixXcd s = sub * e.leftCols(width);
      for (Eigen::Index r = 0; r < s.rows(); ++r) {
        table.row(slot[static_cast<size_t>(r)]).segment(i0, width) += s.row(r).cwiseAbs();
      }
    }

    for (size_t g = 0; g < groups.size(); ++g) {
      result[g] = pick(groups[g], table.row(static_cast<Eigen::Index>(g)), incumbents[g]);
    }
    return result;
  }

 private:
  Eigen::VectorXcd phasors(double tau) const {
    Eigen::VectorXcd v(offsets_.size());
    for (Eigen::Index p = 0; p < offsets_.size(); ++p) v[p] = std::polar(1.0, -kTwoPi * offsets_[p] * tau);
    return v;
  }

  double pick(int n, const Eigen::RowVectorXd& values, std::optional<double> incumbent) const {
    const double best_value = values.maxCoeff();
    const double tol = 1e-12 * std::max(1.0, std::abs(best_value));
    int best = 0;
    while (values[best] < best_value - tol) ++best;

    double tau = tau_at(best);
    double value = values[best];
    if (best > 0 && best < grid_size_ - 1) {
      const double lo = values[best - 1], mid = values[best], hi = values[best + 1];
      const double curvature = lo - 2.0 * mid + hi;
      if (curvature < 0.0) {
        const double shift = std::clamp(0.5 * (lo - hi) / curvature, -1.0, 1.0);
        const double refined = tau + shift * step_;
        const double refined_value = group_objective(n, refined);
        if (refined_value > value) {
          tau = refined;
          value = refined_value;
        }
      }
    }
    if (incumbent && std::abs(*incumbent) <= half_range_ * (1.0 + 1e-12)) {
      if (group_objective(n, *incumbent) > value) tau = *incumbent;
    }
    return tau;
  }

  const SystemConfig& config_;
  Eigen::MatrixXcd coef_;
  Eigen::VectorXd offsets_;
  double half_range_;
  int grid_size_;
  double step_ = 0.0;
};

double wrap_delay(double tau, double period) {
  const double half = period / 2.0;
  return tau + half - period * std::floor((tau + half) / period) - half;
}

}  // namespace

double ttd_objective(const SystemConfig& config, const SubcarrierGrid& grid, int n, double tau,
                     const BeamTarget& target, std::span<const double> digital_phases) {
  check_inputs(config, grid, target, digital_phases);
  check_group(config, n);
  const DelaySearch search(config, grid, target, digital_phases, 3);
  return search.group_objective(n, tau);
}

double ttd_update_line_search(const SystemConfig& config, const SubcarrierGrid& grid, int n,
                              const BeamTarget& target, std::span<const double> digital_phases,
                              const DesignOptions& options, std::optional<double> incumbent) {
  check_inputs(config, grid, target, digital_phases);
  check_group(config, n);
  options.validate(config);
  const DelaySearch search(config, grid, target, digital_phases, options.grid_size);
  return search.search({n}, {incumbent}).front();
}

std::vector<double> phase_unwrap(std::span<const double> seq) {
  std::vector<double> out(seq.begin(), seq.end());
  for (size_t i = 1; i < out.size(); ++i) {
    const double turns = std::round((out[i - 1] - seq[i]) / kTwoPi);
    out[i] = seq[i] + kTwoPi * turns;
  }
  return out;
}

double ttd_update_wls(const SystemConfig& config, const SubcarrierGrid& grid, int n,
                      const BeamTarget& target, std::span<const double> digital_phases) {
  check_inputs(config, grid, target, digital_phases);
  check_group(config, n);
  const int K = grid.size();

  // For each antenna, phi_m is the weighted mean of 2 pi f_k tau + c_mk;
  // substituting it back leaves a scalar quadratic in tau whose minimizer is
  //   tau = -sum w (f - fbar)(c - cbar) / (2 pi sum w (f - fbar)^2).
  double cross = 0.0;
  double spread = 0.0;
  double weight_total = 0.0;
  std::vector<double> c;
  std::vector<double> f;
  std::vector<double> w;
  for (int m0 : config.groups()[static_cast<size_t>(n)]) {
    c.clear();
    f.clear();
    w.clear();
    for (int p = 0; p < K; ++p) {
      const cdouble d = target.directions()(m0, p);
      const double weight = target.weights()[static_cast<size_t>(p)] * std::abs(d);
      if (weight <= 0.0) continue;
      c.push_back(std::arg(d) - digital_phases[static_cast<size_t>(p)]);
      f.push_back(grid.offset_at(p));
      w.push_back(weight);
    }
    if (w.empty()) continue;
    const std::vector<double> cu = phase_unwrap(c);
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    double fbar = 0.0, cbar = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
      fbar += w[i] * f[i];
      cbar += w[i] * cu[i];
    }
    fbar /= wsum;
    cbar /= wsum;
    for (size_t i = 0; i < w.size(); ++i) {
      cross += w[i] * (f[i] - fbar) * (cu[i] - cbar);
      spread += w[i] * (f[i] - fbar) * (f[i] - fbar);
    }
    weight_total += wsum;
  }
  if (weight_total <= 0.0) {
    throw std::invalid_argument("ttd_update_wls: all weights vanish for TTD " + std::to_string(n));
  }
  // A single weighted subcarrier leaves tau unconstrained.
  double tau = spread > 0.0 ? -cross / (kTwoPi * spread) : 0.0;
  const double period = static_cast<double>(K) / config.bandwidth();
  tau = wrap_delay(tau, period);
  const double h = config.half_delay_range();
  return std::clamp(tau, -h, h);
}

PhaseUpdate ps_update(const SystemConfig& config, const SubcarrierGrid& grid, int m0, double tau,
                      const BeamTarget& target, std::span<const double> digital_phases) {
  check_inputs(config, grid, target, digital_phases);
  if (m0 < 0 || m0 >= config.num_antennas()) throw std::out_of_range("antenna index out of range");
  cdouble acc = 0.0;
  double scale = 0.0;
  for (int p = 0; p < grid.size(); ++p) {
    const double w = target.weights()[static_cast<size_t>(p)];
    if (w == 0.0) continue;
    const cdouble d = target.directions()(m0, p);
    acc += w * d * std::polar(1.0, kTwoPi * grid.frequency_at(p) * tau - digital_phases[static_cast<size_t>(p)]);
    scale += w * std::abs(d);
  }
  if (!(std::abs(acc) > 1e-13 * scale)) return {0.0, true};
  return {wrap_phase(std::arg(acc)), false};
}

PhaseUpdate digital_phase_update(const SystemConfig& config, const SubcarrierGrid& grid, int k,
                                 std::span<const double> delays, std::span<const double> phases,
                                 const BeamTarget& target) {
  if (static_cast<int>(delays.size()) != config.num_ttds() ||
      static_cast<int>(phases.size()) != config.num_antennas()) {
    throw std::invalid_argument("digital_phase_update: analog settings do not match config");
  }
  const int p = grid.position(k);
  const double f = grid.frequency_at(p);
  cdouble acc = 0.0;
  double scale = 0.0;
  for (int m0 = 0; m0 < config.num_antennas(); ++m0) {
    const cdouble d = target.directions()(m0, p);
    const double tau = delays[static_cast<size_t>(config.ttd_of(m0))];
    acc += d * std::polar(1.0, kTwoPi * f * tau - phases[static_cast<size_t>(m0)]);
    scale += std::abs(d);
  }
  if (!(std::abs(acc) > 1e-13 * scale)) return {0.0, true};
  return {wrap_phase(std::arg(acc)), false};
}

std::pair<std::vector<double>, double> center_delays(const SystemConfig& config,
                                                     std::span<const double> delays) {
  if (delays.empty()) return {{}, 0.0};
  const auto [lo, hi] = std::minmax_element(delays.begin(), delays.end());
  const double mean = std::accumulate(delays.begin(), delays.end(), 0.0) / delays.size();
  const double h = config.half_delay_range();
  const double offset = std::max(std::min(mean, h + *lo), *hi - h);
  std::vector<double> out(delays.begin(), delays.end());
  for (double& t : out) t -= offset;
  return {std::move(out), offset};
}

JptaBeamformer shift_nonnegative(const JptaBeamformer& bf, const SubcarrierGrid& grid) {
  JptaBeamformer out = bf;
  if (out.delays.empty()) return out;
  const double lo = *std::min_element(out.delays.begin(), out.delays.end());
  if (lo == 0.0) return out;
  for (double& t : out.delays) t -= lo;
  // Floating subtraction may leave the minimum at -0.0 or a tiny negative.
  for (double& t : out.delays) t = std::max(t, 0.0);
  for (size_t p = 0; p < out.alpha.size(); ++p) {
    out.alpha[p] *= std::polar(1.0, -kTwoPi * grid.frequency_at(static_cast<int>(p)) * lo);
  }
  return out;
}

namespace {

std::vector<double> digital_phases_of(const JptaBeamformer& bf) {
  std::vector<double> a(bf.alpha.size());
  for (size_t p = 0; p < a.size(); ++p) a[p] = std::arg(bf.alpha[p]);
  return a;
}

// One aligned digital-phase pass over every subcarrier; returns the number of degenerate sums.
int update_digital_phases(const SystemConfig& config, const SubcarrierGrid& grid,
                          const BeamTarget& target, std::span<const double> delays,
                          std::span<const double> phases, std::vector<double>& out) {
  int degenerate = 0;
  for (int p = 0; p < grid.size(); ++p) {
    const PhaseUpdate u =
        digital_phase_update(config, grid, grid.indices()[static_cast<size_t>(p)], delays, phases, target);
    out[static_cast<size_t>(p)] = u.phase;
    degenerate += u.degenerate ? 1 : 0;
  }
  return degenerate;
}

std::vector<cdouble> combine(const std::vector<double>& magnitudes, const std::vector<double>& angles) {
  std::vector<cdouble> alpha(magnitudes.size());
  for (size_t p = 0; p < alpha.size(); ++p) alpha[p] = std::polar(magnitudes[p], angles[p]);
  return alpha;
}

}  // namespace

JptaBeamformer quantize_delays(const SystemConfig& config, const SubcarrierGrid& grid,
                               const JptaBeamformer& bf, const BeamTarget& target,
                               std::span<const double> discrete_set) {
  if (discrete_set.empty()) throw std::invalid_argument("quantize_delays: empty delay set");
  if (!std::is_sorted(discrete_set.begin(), discrete_set.end())) {
    throw std::invalid_argument("quantize_delays: delay set must be sorted");
  }
  JptaBeamformer out = bf;
  for (double& t : out.delays) {
    const auto it = std::lower_bound(discrete_set.begin(), discrete_set.end(), t);
    if (it == discrete_set.begin()) {
      t = *it;
    } else if (it == discrete_set.end()) {
      t = discrete_set.back();
    } else {
      const double above = *it, below = *(it - 1);
      t = (above - t < t - below) ? above : below;
    }
  }
  std::vector<double> angles = digital_phases_of(out);
  for (int m0 = 0; m0 < config.num_antennas(); ++m0) {
    out.phases[static_cast<size_t>(m0)] =
        ps_update(config, grid, m0, out.delays[static_cast<size_t>(config.ttd_of(m0))], target, angles).phase;
  }
  update_digital_phases(config, grid, target, out.delays, out.phases, angles);
  std::vector<double> mags(out.alpha.size());
  for (size_t p = 0; p < mags.size(); ++p) mags[p] = std::abs(out.alpha[p]);
  out.alpha = combine(mags, angles);
  return out;
}

DesignResult design_jpta(const SystemConfig& config, const SubcarrierGrid& grid,
                         const BeamTarget& target, const DesignOptions& options) {
  options.validate(config);
  const int M = config.num_antennas();
  const int N = config.num_ttds();
  const int K = grid.size();
  if (target.num_antennas() != M || target.num_subcarriers() != K) {
    throw std::invalid_argument("design_jpta: target dimensions do not match the system config");
  }

  DesignResult result;
  const std::vector<double> magnitudes = digital_power_allocation(target);
  std::vector<double> angles(static_cast<size_t>(K), 0.0);
  if (options.random_init_seed) {
    std::mt19937_64 rng(*options.random_init_seed);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (double& a : angles) a = u(rng);
  }
  std::vector<double> delays(static_cast<size_t>(N), 0.0);
  std::vector<double> phases(static_cast<size_t>(M), 0.0);
  std::vector<int> all_groups(static_cast<size_t>(N));
  std::iota(all_groups.begin(), all_groups.end(), 0);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (options.ttd_update == TtdUpdate::kLineSearch) {
      std::vector<std::optional<double>> incumbents(static_cast<size_t>(N));
      if (iter > 0) {
        for (int n = 0; n < N; ++n) incumbents[static_cast<size_t>(n)] = delays[static_cast<size_t>(n)];
      }
      const DelaySearch search(config, grid, target, angles, options.grid_size);
      delays = search.search(all_groups, incumbents);
    } else {
      for (int n = 0; n < N; ++n) delays[static_cast<size_t>(n)] = ttd_update_wls(config, grid, n, target, angles);
    }
    for (int m0 = 0; m0 < M; ++m0) {
      const PhaseUpdate u =
          ps_update(config, grid, m0, delays[static_cast<size_t>(config.ttd_of(m0))], target, angles);
      phases[static_cast<size_t>(m0)] = u.phase;
      result.degenerate_updates += u.degenerate ? 1 : 0;
    }

    auto [centered, offset] = center_delays(config, delays);
    delays = std::move(centered);
    for (int p = 0; p < K; ++p) {
      angles[static_cast<size_t>(p)] = wrap_phase(angles[static_cast<size_t>(p)] - kTwoPi * grid.frequency_at(p) * offset);
    }

    result.degenerate_updates += update_digital_phases(config, grid, target, delays, phases, angles);

    JptaBeamformer current{delays, phases, combine(magnitudes, angles)};
    const double objective = analog_objective(target, effective_beam_set(config, grid, current), angles);
    if (!std::isfinite(objective)) throw NumericalError("design_jpta: non-finite objective");
    result.objective_trace.push_back(objective);
    result.iterations = iter + 1;
    if (options.on_iteration) options.on_iteration(iter + 1, current);
    if (options.convergence_epsilon && iter > 0) {
      const double gain = objective - result.objective_trace[result.objective_trace.size() - 2];
      if (gain < *options.convergence_epsilon) break;
    }
  }

  result.beamformer = JptaBeamformer{delays, phases, combine(magnitudes, angles)};
  if (options.enforce_nonnegative_delays || !options.discrete_delays.empty()) {
    result.beamformer = shift_nonnegative(result.beamformer, grid);
  }
  if (!options.discrete_delays.empty()) {
    result.beamformer = quantize_delays(config, grid, result.beamformer, target, options.discrete_delays);
  }
  return result;
}

}  // namespace jpta
