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

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "jpta/design.hpp"
#include "jpta/metrics.hpp"
#include "oracles.hpp"

using namespace jpta;

namespace {

struct Instance {
  SystemConfig cfg;
  SubcarrierGrid grid;
  BeamTarget target;
  JptaBeamformer bf;
};

// Random target (Gaussian columns, random weights, one zero column when K > 2)
// and random JPTA settings.
Instance random_instance(oracle::Gen& gen) {
  const int N = gen.integer(1, 3);
  const int M = N * gen.integer(1, 3);
  const int K = gen.integer(1, 12);
  auto cfg = SystemConfig::make(M, N, 100e9, 10e9, K, 8, 1e6);
  auto grid = build_grid(cfg);
  Eigen::MatrixXcd b(M, K);
  for (int p = 0; p < K; ++p)
    for (int m = 0; m < M; ++m) b(m, p) = gen.complex_normal();
  if (K > 2) b.col(1).setZero();
  std::vector<double> w(static_cast<size_t>(K));
  for (double& x : w) x = gen.uniform(0.1, 2.0);
  auto target = BeamTarget::from_columns(b, w, 1e6);
  JptaBeamformer bf;
  for (int n = 0; n < N; ++n) bf.delays.push_back(gen.uniform(0, 0.8e-9));
  for (int m = 0; m < M; ++m) bf.phases.push_back(gen.uniform(-kPi, kPi));
  for (int p = 0; p < K; ++p) bf.alpha.push_back(std::polar(gen.uniform(0, 3), gen.uniform(-kPi, kPi)));
  return {cfg, grid, target, bf};
}

std::vector<std::vector<oracle::cd>> columns(const Eigen::MatrixXcd& x) {
  std::vector<std::vector<oracle::cd>> out;
  for (Eigen::Index p = 0; p < x.cols(); ++p) {
    out.emplace_back(x.col(p).data(), x.col(p).data() + x.rows());
  }
  return out;
}

std::vector<std::vector<oracle::cd>> oracle_beams(const Instance& in) {
  std::vector<std::vector<oracle::cd>> w;
  for (int k : in.grid.indices()) {
    w.push_back(oracle::effective(in.cfg.num_antennas(), in.cfg.num_ttds(), in.grid.frequency(k),
                                  in.bf.delays, in.bf.phases));
  }
  return w;
}

std::vector<double> alpha_phases(const JptaBeamformer& bf) {
  std::vector<double> out;
  for (auto a : bf.alpha) out.push_back(std::arg(a));
  return out;
}

}  // namespace

TEST_CASE("objective_tilde matches direct summation") {
  oracle::Gen gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(gen);
    const auto b = columns(in.target.beams());
    const auto w = oracle_beams(in);
    double ref = 0;
    for (size_t k = 0; k < b.size(); ++k) {
      const double nb = oracle::norm2(b[k]);
      const double gap = nb - std::abs(in.bf.alpha[k]);
      double beam_gap = 0;
      if (nb > 0) {
        const auto rot = std::polar(1.0, std::arg(in.bf.alpha[k]));
        for (size_t m = 0; m < b[k].size(); ++m) beam_gap += std::norm(b[k][m] / nb - w[k][m] * rot);
      }
      ref += gap * gap + in.target.weights()[k] * beam_gap;
    }
    ref /= double(b.size());
    CHECK(objective_tilde(in.target, in.bf, in.cfg, in.grid) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("objective_tilde expansion with matched power") {
  oracle::Gen gen(22);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = random_instance(gen);
    for (size_t p = 0; p < in.bf.alpha.size(); ++p) {
      in.bf.alpha[p] = std::polar(in.target.norms()[static_cast<Eigen::Index>(p)], std::arg(in.bf.alpha[p]));
    }
    const auto beams = effective_beam_set(in.cfg, in.grid, in.bf);
    double expect = 0;
    for (int p = 0; p < in.target.num_subcarriers(); ++p) {
      const double w = in.target.weights()[static_cast<size_t>(p)];
      if (w == 0) continue;
      const auto inner = in.target.directions().col(p).dot(beams.col(p));
      expect += w * 2 * (1 - (std::polar(1.0, std::arg(in.bf.alpha[static_cast<size_t>(p)])) * inner).real());
    }
    expect /= in.target.num_subcarriers();
    CHECK(objective_tilde(in.target, in.bf, in.cfg, in.grid) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("objective_tilde scalar perfect fit is zero") {
  const auto cfg = SystemConfig::make(1, 1, 100e9, 10e9, 4, 1, 4);
  const auto grid = build_grid(cfg);
  Eigen::MatrixXcd b(1, 4);
  b << std::polar(1.0, 0.3), std::polar(1.0, 0.3), std::polar(1.0, 0.3), std::polar(1.0, 0.3);
  const auto t = BeamTarget::from_columns(b, WeightScheme::kUniform, 4);
  JptaBeamformer bf{{0.0}, {0.3}, {1.0, 1.0, 1.0, 1.0}};
  CHECK(objective_tilde(t, bf, cfg, grid) < 1e-30);
}

TEST_CASE("analog objective and fit agree with the reference") {
  oracle::Gen gen(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_instance(gen);
    const auto b = columns(in.target.beams());
    const auto w = oracle_beams(in);
    const auto ph = alpha_phases(in.bf);
    CHECK(analog_objective(in.target, in.bf, in.cfg, in.grid) ==
          doctest::Approx(oracle::analog(b, w, in.target.weights(), ph)).epsilon(1e-10));
    const auto beams = effective_beam_set(in.cfg, in.grid, in.bf);
    const double f = fit_objective(in.target, beams);
    CHECK(f == doctest::Approx(oracle::fit(b, w, in.target.weights())).epsilon(1e-10));
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    CHECK(analog_objective(in.target, beams, ph) <= in.target.weight_sum() * (1 + 1e-12));
  }
}

TEST_CASE("analog objective after digital alignment equals weighted match") {
  oracle::Gen gen(24);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = random_instance(gen);
    for (int k : in.grid.indices()) {
      const auto upd =
          digital_phase_update(in.cfg, in.grid, k, in.bf.delays, in.bf.phases, in.target);
      in.bf.alpha[static_cast<size_t>(in.grid.position(k))] = std::polar(1.0, upd.phase);
    }
    const auto beams = effective_beam_set(in.cfg, in.grid, in.bf);
    const auto match = per_subcarrier_match(in.target, beams);
    double expect = 0;
    for (size_t p = 0; p < match.size(); ++p) expect += in.target.weights()[p] * match[p];
    CHECK(analog_objective(in.target, in.bf, in.cfg, in.grid) ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("fit objective: perfect, phase-rotated, orthogonal") {
  oracle::Gen gen(25);
  const auto in = random_instance(gen);
  Eigen::MatrixXcd w = in.target.directions();
  for (int p = 0; p < w.cols(); ++p) {
    if (w.col(p).norm() == 0) w(0, p) = 1.0;  // zero-weight column; any unit vector
  }
  CHECK(fit_objective(in.target, w) == doctest::Approx(1.0).epsilon(1e-14));
  for (int p = 0; p < w.cols(); ++p) w.col(p) *= std::polar(1.0, gen.uniform(-kPi, kPi));
  CHECK(fit_objective(in.target, w) == doctest::Approx(1.0).epsilon(1e-14));

  Eigen::MatrixXcd b(2, 3);
  b << 1, 1, 1, 1, -1, 1;
  const auto t = BeamTarget::from_columns(b, WeightScheme::kUniform, 10);
  Eigen::MatrixXcd o(2, 3);
  o << 1, 1, 1, -1, 1, -1;
  CHECK(fit_objective(t, o / std::sqrt(2.0)) < 1e-15);

  CHECK_THROWS_AS(fit_objective(t, o), std::invalid_argument);
  CHECK_THROWS_AS(fit_objective(t, Eigen::MatrixXcd::Ones(2, 2)), std::invalid_argument);
}

TEST_CASE("fit objective equals one exactly when every weighted beam is aligned") {
  oracle::Gen gen(26);
  for (int trial = 0; trial < 100; ++trial) {
    const int M = gen.integer(2, 5);
    const int K = gen.integer(2, 6);
    Eigen::MatrixXcd b(M, K);
    for (int p = 0; p < K; ++p)
      for (int m = 0; m < M; ++m) b(m, p) = gen.complex_normal();
    const auto t = BeamTarget::from_columns(b, WeightScheme::kUniform, 1e6);
    Eigen::MatrixXcd w = t.directions();
    for (int p = 0; p < K; ++p) w.col(p) *= std::polar(1.0, gen.uniform(-kPi, kPi));
    CHECK(fit_objective(t, w) == doctest::Approx(1.0).epsilon(1e-13));
    // Misalign one subcarrier by a component orthogonal to its target.
    const int bad = gen.integer(0, K - 1);
    Eigen::VectorXcd perp = Eigen::VectorXcd::Zero(M);
    for (int m = 0; m < M; ++m) perp[m] = gen.complex_normal();
    perp -= t.directions().col(bad) * t.directions().col(bad).dot(perp);
    perp.normalize();
    const double eps = gen.uniform(0.05, 1.0);
    w.col(bad) = (std::cos(eps) * t.directions().col(bad) + std::sin(eps) * perp);
    CHECK(fit_objective(t, w) < 1.0 - 1e-6);
  }
}

TEST_CASE("fit objective is invariant under a common delay shift") {
  oracle::Gen gen(27);
  for (int trial = 0; trial < 200; ++trial) {
    auto in = random_instance(gen);
    const double before = fit_objective(in.target, effective_beam_set(in.cfg, in.grid, in.bf));
    const double c = gen.uniform(-2e-9, 2e-9);
    for (double& t : in.bf.delays) t += c;
    const double after = fit_objective(in.target, effective_beam_set(in.cfg, in.grid, in.bf));
    CHECK(std::abs(before - after) < 1e-12);
  }
}

TEST_CASE("normalize_columns and reports") {
  Eigen::MatrixXcd x(2, 3);
  x << 3, 0, 1, 4, 0, cdouble(0, 1);
  const auto n = normalize_columns(x);
  CHECK(n.col(0).norm() == doctest::Approx(1.0));
  CHECK(n.col(1).norm() == 0.0);
  CHECK(n(1, 0) == cdouble(0.8, 0));

  oracle::Gen gen(28);
  const auto in = random_instance(gen);
  const auto report = make_fit_report(in.target, in.cfg, in.grid, in.bf, {0.5, 0.7});
  CHECK(report.convergence_trace.size() == 2);
  CHECK(report.per_subcarrier_match.size() == static_cast<size_t>(in.grid.size()));
  for (double m : report.per_subcarrier_match) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0 + 1e-12);
  }
  CHECK(report.f_obj == doctest::Approx(fit_objective(in.target, effective_beam_set(in.cfg, in.grid, in.bf))));
  CHECK(report.f_tilde_obj == doctest::Approx(objective_tilde(in.target, in.bf, in.cfg, in.grid)));
}
