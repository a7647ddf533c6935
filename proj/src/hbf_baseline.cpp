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

#include "jpta/hbf_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "jpta/errors.hpp"
#include "jpta/metrics.hpp"

namespace jpta {

Eigen::MatrixXcd stack_target(const BeamTarget& target) { return target.beams(); }

namespace {

Eigen::MatrixXcd random_phases(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  Eigen::MatrixXcd f(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) f(r, c) = std::polar(1.0, u(rng));
  }
  return f;
}

// Entry-wise e^{j arg x}; entries with x = 0 keep the previous phase.
void extract_phases(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& analog) {
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      if (std::abs(x(r, c)) > 0.0) analog(r, c) = x(r, c) / std::abs(x(r, c));
    }
  }
}

int block_size(int num_antennas, int rf_chains) { return num_antennas / rf_chains; }

// Zeroes every entry outside antenna block n of column n.
void apply_block_mask(Eigen::MatrixXcd& analog, int rf_chains) {
  const int L = block_size(static_cast<int>(analog.rows()), rf_chains);
  for (int n = 0; n < rf_chains; ++n) {
    for (int m0 = 0; m0 < analog.rows(); ++m0) {
      if (m0 / L != n) analog(m0, n) = 0.0;
    }
  }
}

void normalize_power(HbfBeamformer& hbf, double power_budget) {
  const double norm = (hbf.analog * hbf.digital).norm();
  if (norm > 0.0) hbf.digital *= std::sqrt(power_budget) / norm;
}

// A semi-unitary Q (Q Q^H = I) maximizing Re tr(a^H Q) for a wide matrix a:
// U V^H from a = U S V^H. The row-space part comes from the small Gram matrix
// a a^H; directions with vanishing singular values get a fixed orthonormal
// complement, which leaves the maximum unchanged.
Eigen::MatrixXcd polar_factor(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index K = a.cols();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a * a.adjoint());
  if (eig.info() != Eigen::Success) throw NumericalError("HBF: eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const Eigen::MatrixXcd& u = eig.eigenvectors();
  const double top = lambda[n - 1];
  Eigen::Index r = 0;
  while (r < n && top > 0.0 && lambda[n - 1 - r] > 1e-10 * top) ++r;

  const Eigen::MatrixXcd u_r = u.rightCols(r);
  Eigen::MatrixXcd v_r = a.adjoint() * u_r;  // K x r
  for (Eigen::Index i = 0; i < r; ++i) v_r.col(i) /= std::sqrt(lambda[n - r + i]);
  Eigen::MatrixXcd q = u_r * v_r.adjoint();
  if (r == n) return q;

  Eigen::MatrixXcd fill = random_phases(static_cast<int>(K), static_cast<int>(n - r), 0x5eedu);
  for (int pass = 0; pass < 2; ++pass) fill -= v_r * (v_r.adjoint() * fill);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(fill);
  const Eigen::MatrixXcd v_0 = qr.householderQ() * Eigen::MatrixXcd::Identity(K, n - r);
  q += u.leftCols(n - r) * v_0.adjoint();
  return q;
}

bool converged(const std::vector<double>& trace, double rel_tol) {
  if (trace.size() < 2) return false;
  const double prev = trace[trace.size() - 2];
  const double cur = trace.back();
  return prev <= 0.0 || (prev - cur) <= rel_tol * prev;
}

HbfBeamformer run_fc(const Eigen::MatrixXcd& B, int rf_chains, Eigen::MatrixXcd analog,
                     const HbfOptions& options) {
  HbfBeamformer hbf;
  hbf.structure = HbfStructure::kFullyConnected;
  hbf.rf_chains = rf_chains;
  Eigen::MatrixXcd digital(rf_chains, B.cols());
  for (int it = 0; it < options.iters; ++it) {
    // Digital step: F_BB = s Q with Q Q^H = I maximizing Re tr(B^H F_RF Q).
    const Eigen::MatrixXcd q = polar_factor(analog.adjoint() * B);
    const Eigen::MatrixXcd fq = analog * q;
    const double denom = fq.squaredNorm();
    const double scale = denom > 0.0 ? (B.cwiseProduct(fq.conjugate())).sum().real() / denom : 0.0;
    digital = scale * q;
    // Analog step: with F_BB F_BB^H proportional to I the fit reduces to
    // maximizing Re tr(F_RF^H B F_BB^H), solved entry-wise by phase extraction.
    extract_phases(B * digital.adjoint(), analog);
    hbf.residual_trace.push_back((B - analog * digital).norm());
    if (!std::isfinite(hbf.residual_trace.back())) throw NumericalError("PE-AltMin diverged");
    if (converged(hbf.residual_trace, options.relative_tolerance)) break;
  }
  // Unconstrained least-squares digital factor for the final analog matrix.
  hbf.analog = std::move(analog);
  hbf.digital = hbf.analog.completeOrthogonalDecomposition().solve(B);
  hbf.residual = (B - hbf.analog * hbf.digital).norm();
  return hbf;
}

HbfBeamformer run_pc(const Eigen::MatrixXcd& B, int rf_chains, Eigen::MatrixXcd analog,
                     const HbfOptions& options) {
  HbfBeamformer hbf;
  hbf.structure = HbfStructure::kPartiallyConnected;
  hbf.rf_chains = rf_chains;
  apply_block_mask(analog, rf_chains);
  const double L = block_size(static_cast<int>(B.rows()), rf_chains);
  Eigen::MatrixXcd digital(rf_chains, B.cols());
  for (int it = 0; it < options.iters; ++it) {
    // Columns of F_RF are orthogonal with squared norm L.
    digital = analog.adjoint() * B / L;
    Eigen::MatrixXcd cross = B * digital.adjoint();
    apply_block_mask(cross, rf_chains);
    Eigen::MatrixXcd next = analog;
    extract_phases(cross, next);
    apply_block_mask(next, rf_chains);
    analog = std::move(next);
    hbf.residual_trace.push_back((B - analog * digital).norm());
    if (!std::isfinite(hbf.residual_trace.back())) throw NumericalError("PC alternation diverged");
    if (converged(hbf.residual_trace, options.relative_tolerance)) break;
  }
  hbf.analog = std::move(analog);
  hbf.digital = hbf.analog.adjoint() * B / L;
  hbf.residual = (B - hbf.analog * hbf.digital).norm();
  return hbf;
}

template <typename Run>
HbfBeamformer best_of_restarts(const Eigen::MatrixXcd& B, int rf_chains, const HbfOptions& options,
                               Run run) {
  if (options.iters < 1) throw std::invalid_argument("HBF: iters must be >= 1");
  if (options.restarts < 1) throw std::invalid_argument("HBF: restarts must be >= 1");
  HbfBeamformer best;
  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    const std::uint64_t seed = options.seed + static_cast<std::uint64_t>(r);
    Eigen::MatrixXcd start = (r == 0 && options.initial_analog)
                                 ? *options.initial_analog
                                 : random_phases(static_cast<int>(B.rows()), rf_chains, seed);
    if (start.rows() != B.rows() || start.cols() != rf_chains) {
      throw std::invalid_argument("HBF: initial analog matrix must be M x N_RF");
    }
    HbfBeamformer candidate = run(B, rf_chains, std::move(start), options);
    candidate.seed = seed;
    if (!have || candidate.residual < best.residual) {
      best = std::move(candidate);
      have = true;
    }
  }
  normalize_power(best, options.power_budget.value_or(B.squaredNorm()));
  return best;
}

}  // namespace

HbfBeamformer pe_altmin_fc(const Eigen::MatrixXcd& target_matrix, int rf_chains,
                           const HbfOptions& options) {
  const int M = static_cast<int>(target_matrix.rows());
  if (rf_chains < 1 || rf_chains > M) {
    throw std::invalid_argument("pe_altmin_fc: need 1 <= N_RF <= M (N_RF=" + std::to_string(rf_chains) + ")");
  }
  return best_of_restarts(target_matrix, rf_chains, options, run_fc);
}

HbfBeamformer altmin_pc(const Eigen::MatrixXcd& target_matrix, int rf_chains,
                        const HbfOptions& options) {
  const int M = static_cast<int>(target_matrix.rows());
  if (rf_chains < 1 || rf_chains > M || M % rf_chains != 0) {
    throw std::invalid_argument("altmin_pc: N_RF must divide M (N_RF=" + std::to_string(rf_chains) +
                                ", M=" + std::to_string(M) + ")");
  }
  return best_of_restarts(target_matrix, rf_chains, options, run_pc);
}

HbfBeamformer design_hbf(HbfStructure structure, const Eigen::MatrixXcd& target_matrix,
                         int rf_chains, const HbfOptions& options) {
  return structure == HbfStructure::kFullyConnected ? pe_altmin_fc(target_matrix, rf_chains, options)
                                                    : altmin_pc(target_matrix, rf_chains, options);
}

Eigen::MatrixXcd hbf_beam_set(const HbfBeamformer& hbf) {
  return normalize_columns(hbf.analog * hbf.digital);
}

namespace {

double hbf_fit(const BeamTarget& target, const HbfBeamformer& hbf) {
  const std::vector<double> match = per_subcarrier_match(target, hbf_beam_set(hbf));
  double num = 0.0;
  for (size_t p = 0; p < match.size(); ++p) num += target.weights()[p] * match[p];
  return num / target.weight_sum();
}

// Least-squares digital factor for a fixed analog matrix, power-normalized.
HbfBeamformer with_ls_digital(const Eigen::MatrixXcd& B, Eigen::MatrixXcd analog,
                              HbfStructure structure, double power) {
  HbfBeamformer hbf;
  hbf.structure = structure;
  hbf.rf_chains = static_cast<int>(analog.cols());
  hbf.analog = std::move(analog);
  hbf.digital = hbf.analog.completeOrthogonalDecomposition().solve(B);
  hbf.residual = (B - hbf.analog * hbf.digital).norm();
  normalize_power(hbf, power);
  return hbf;
}

}  // namespace

HbfBeamformer sweep_step(HbfStructure structure, const BeamTarget& target, int n_rf,
                         const HbfBeamformer* previous, std::size_t point, const HbfOptions& options) {
  const Eigen::MatrixXcd B = stack_target(target);
  const int M = static_cast<int>(B.rows());
  const double power = options.power_budget.value_or(B.squaredNorm());
  HbfOptions opts = options;
  opts.power_budget = power;
  opts.initial_analog.reset();
  HbfBeamformer best = design_hbf(structure, B, n_rf, opts);
  double best_fit = hbf_fit(target, best);
  if (previous == nullptr || previous->rf_chains >= n_rf) return best;

  const HbfBeamformer& prev = *previous;
  std::optional<Eigen::MatrixXcd> warm;
  if (structure == HbfStructure::kFullyConnected) {
    Eigen::MatrixXcd padded(M, n_rf);
    padded.leftCols(prev.rf_chains) = prev.analog;
    padded.rightCols(n_rf - prev.rf_chains) =
        random_phases(M, n_rf - prev.rf_chains, options.seed + 7919u * (point + 1));
    warm = std::move(padded);
  } else if (n_rf % prev.rf_chains == 0 && M % n_rf == 0) {
    // Split every block into n_rf / prev chains; the old columns stay in the span.
    Eigen::MatrixXcd split = Eigen::MatrixXcd::Zero(M, n_rf);
    const int L = M / n_rf;
    for (int m0 = 0; m0 < M; ++m0) split(m0, m0 / L) = prev.analog(m0, m0 / (M / prev.rf_chains));
    warm = std::move(split);
  }
  if (!warm) return best;
  HbfBeamformer direct = with_ls_digital(B, *warm, structure, power);
  const double direct_fit = hbf_fit(target, direct);
  if (direct_fit > best_fit) {
    best = std::move(direct);
    best_fit = direct_fit;
  }
  opts.initial_analog = std::move(*warm);
  opts.restarts = 1;
  HbfBeamformer refined = design_hbf(structure, B, n_rf, opts);
  if (hbf_fit(target, refined) > best_fit) best = std::move(refined);
  return best;
}

std::vector<HbfBeamformer> sweep_rf_chains(HbfStructure structure, const BeamTarget& target,
                                           const std::vector<int>& rf_chains,
                                           const HbfOptions& options) {
  if (!std::is_sorted(rf_chains.begin(), rf_chains.end())) {
    throw std::invalid_argument("sweep_rf_chains: chain counts must be ascending");
  }
  std::vector<HbfBeamformer> out;
  for (size_t i = 0; i < rf_chains.size(); ++i) {
    out.push_back(sweep_step(structure, target, rf_chains[i], out.empty() ? nullptr : &out.back(), i, options));
  }
  return out;
}

RfChainBound min_rf_chains(const SystemConfig& config, const SubcarrierGrid& grid, double theta0,
                           double delta_theta) {
  if (!(std::abs(theta0) + std::abs(delta_theta) / 2 <= kPi / 2 + 1e-12)) {
    throw std::invalid_argument("min_rf_chains: sweep outside [-pi/2, pi/2]");
  }
  const double f0 = config.carrier_freq();
  const double span = std::abs(std::sin(theta0 + delta_theta / 2) * grid.f_max() / f0 -
                               std::sin(theta0 - delta_theta / 2) * grid.f_min() / f0);
  const int r = std::max(1, static_cast<int>(std::ceil(config.num_antennas() / 2.0 * span - 1e-12)));
  int pc = 1;
  while (pc < r) pc *= 2;
  return {r, pc};
}

Eigen::VectorXcd spatial_frequency_vector(double omega, int num_antennas) {
  Eigen::VectorXcd g(num_antennas);
  for (int m0 = 0; m0 < num_antennas; ++m0) g[m0] = std::polar(1.0, kPi * omega * m0);
  return g;
}

int orthogonal_column_count(const Eigen::MatrixXcd& target_matrix, int num_antennas) {
  if (num_antennas < 2 || target_matrix.rows() != num_antennas) return 1;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index p = 0; p < target_matrix.cols(); ++p) {
    const auto col = target_matrix.col(p);
    if (col.norm() == 0.0) continue;
    // Average phase increment between neighbouring antennas.
    const cdouble inc = col.head(num_antennas - 1).dot(col.tail(num_antennas - 1));
    const double omega = std::arg(inc) / kPi;
    lo = std::min(lo, omega);
    hi = std::max(hi, omega);
  }
  if (!(hi >= lo)) return 0;
  const double spacing = 2.0 / num_antennas;
  const int count = static_cast<int>(std::floor((hi - lo) / spacing + 1e-9)) + 1;

  // The representatives are exactly orthogonal; keep the check explicit.
  std::vector<Eigen::VectorXcd> reps;
  for (int j = 0; j < count; ++j) reps.push_back(spatial_frequency_vector(lo + j * spacing, num_antennas));
  for (int a = 0; a < count; ++a) {
    for (int b = a + 1; b < count; ++b) {
      if (std::abs(reps[static_cast<size_t>(a)].dot(reps[static_cast<size_t>(b)])) > 1e-8 * num_antennas) {
        throw NumericalError("orthogonal_column_count: representatives not orthogonal");
      }
    }
  }
  return count;
}

int numerical_rank(const Eigen::MatrixXcd& matrix, double rel_tol) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(matrix);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s[i] > rel_tol * s[0] ? 1 : 0;
  return rank;
}

}  // namespace jpta
