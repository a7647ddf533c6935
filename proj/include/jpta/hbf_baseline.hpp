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

#ifndef JPTA_HBF_BASELINE_HPP
#define JPTA_HBF_BASELINE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jpta/array_model.hpp"
#include "jpta/beam_targets.hpp"

namespace jpta {

enum class HbfStructure { kFullyConnected, kPartiallyConnected };

// Frequency-flat analog matrix F_RF (M x N_RF) with per-subcarrier digital
// vectors F_BB (N_RF x K).
struct HbfBeamformer {
  Eigen::MatrixXcd analog;
  Eigen::MatrixXcd digital;
  HbfStructure structure = HbfStructure::kFullyConnected;
  int rf_chains = 0;
  std::uint64_t seed = 0;
  // |B - F_RF F_BB|_F of the returned fit, before power normalization.
  double residual = 0.0;
  // Residual after every alternation iteration of the winning run.
  std::vector<double> residual_trace;
};

struct HbfOptions {
  int iters = 50;
  double relative_tolerance = 1e-8;
  std::uint64_t seed = 1;
  int restarts = 5;
  // Power the final F_RF F_BB is scaled to; defaults to |B|_F^2.
  std::optional<double> power_budget;
  // Starting analog matrix; replaces the random start of the first restart.
  std::optional<Eigen::MatrixXcd> initial_analog;
};

// Columns b_k in ascending subcarrier order.
Eigen::MatrixXcd stack_target(const BeamTarget& target);

// Phase-extraction alternating minimization for the fully-connected
// structure. The digital step uses the scaled semi-unitary factor, which makes
// the phase-extraction analog step exact; the returned fit re-solves F_BB by
// unconstrained least squares. Best residual over the restarts wins.
HbfBeamformer pe_altmin_fc(const Eigen::MatrixXcd& target_matrix, int rf_chains,
                           const HbfOptions& options = {});

// Alternating minimization for the partially-connected structure: antennas
// (n-1)M/N_RF < m <= nM/N_RF feed chain n. Both half-steps are exact.
HbfBeamformer altmin_pc(const Eigen::MatrixXcd& target_matrix, int rf_chains,
                        const HbfOptions& options = {});

HbfBeamformer design_hbf(HbfStructure structure, const Eigen::MatrixXcd& target_matrix,
                         int rf_chains, const HbfOptions& options = {});

// F_RF f_BB,k normalized to unit norm per subcarrier (zero columns stay 0).
Eigen::MatrixXcd hbf_beam_set(const HbfBeamformer& hbf);

// One design per entry of rf_chains (ascending). Each point also tries the
// previous point's analog matrix extended by random columns (FC) or split
// into finer blocks (PC, when the chain count divides), keeping whichever
// candidate fits the target best.
// One point of sweep_rf_chains: a fresh design at rf_chains, plus the warm
// start from previous (the best design at the preceding, smaller count) when
// given. point is the sweep position; it seeds the padding columns.
HbfBeamformer sweep_step(HbfStructure structure, const BeamTarget& target, int rf_chains,
                         const HbfBeamformer* previous, std::size_t point,
                         const HbfOptions& options = {});

std::vector<HbfBeamformer> sweep_rf_chains(HbfStructure structure, const BeamTarget& target,
                                           const std::vector<int>& rf_chains,
                                           const HbfOptions& options = {});

struct RfChainBound {
  int fully_connected = 1;
  int partially_connected = 1;
};

// Minimum RF chains for the rainbow beam: r = ceil((M/2) |sin(theta0 +
// dtheta/2) f_max/f0 - sin(theta0 - dtheta/2) f_min/f0|), at least 1; the
// partially-connected count is the next power of two.
RfChainBound min_rf_chains(const SystemConfig& config, const SubcarrierGrid& grid, double theta0,
                           double delta_theta);

// Columns of a steering-family matrix are g(Omega) vectors; g(Omega1) and
// g(Omega2) are orthogonal when Omega1 - Omega2 is a nonzero multiple of 2/M.
// Counts the representatives Omega_min + 2j/M inside the covered range.
int orthogonal_column_count(const Eigen::MatrixXcd& target_matrix, int num_antennas);

// g(Omega) = [1, e^{j pi Omega}, ..., e^{j pi Omega (M-1)}].
Eigen::VectorXcd spatial_frequency_vector(double omega, int num_antennas);

// Singular values above rel_tol * sigma_max.
int numerical_rank(const Eigen::MatrixXcd& matrix, double rel_tol = 1e-6);

}  // namespace jpta

#endif  // JPTA_HBF_BASELINE_HPP
