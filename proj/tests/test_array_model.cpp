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

#include "jpta/array_model.hpp"
#include "oracles.hpp"

using namespace jpta;

namespace {

SystemConfig reference_config(int K, int N = 64) { return SystemConfig::make(64, N, 100e9, 10e9, K, 64, K); }

}  // namespace

TEST_CASE("grid frequencies at the published band plan") {
  const auto cfg = reference_config(2048);
  const auto grid = build_grid(cfg);
  CHECK(grid.size() == 2048);
  CHECK(grid.first_index() == -1024);
  CHECK(grid.last_index() == 1023);
  CHECK(grid.frequency(-1024) == doctest::Approx(95e9).epsilon(1e-15));
  CHECK(grid.frequency(0) == 100e9);
  CHECK(grid.frequency(1023) == doctest::Approx(104.9951171875e9).epsilon(1e-15));
}

TEST_CASE("grid with one subcarrier holds only the carrier") {
  const auto cfg = SystemConfig::make(4, 1, 28e9, 1e9, 1, 1, 1);
  const auto grid = build_grid(cfg);
  REQUIRE(grid.size() == 1);
  CHECK(grid.indices()[0] == 0);
  CHECK(grid.frequency(0) == 28e9);
}

TEST_CASE("grid K=4 small example") {
  const auto cfg = SystemConfig::make(2, 1, 10, 4, 4, 1, 4);
  const auto grid = build_grid(cfg);
  CHECK(grid.indices() == std::vector<int>{-2, -1, 0, 1});
  CHECK(grid.frequencies() == std::vector<double>{8, 9, 10, 11});
}

TEST_CASE("grid indices agree with the reference for odd and even K") {
  for (int K = 1; K <= 17; ++K) {
    const auto cfg = SystemConfig::make(2, 1, 10, 4, K, 1, K);
    const auto grid = build_grid(cfg);
    CHECK(grid.indices() == oracle::subcarrier_indices(K));
    CHECK(grid.contains(0));
  }
  const auto grid = build_grid(SystemConfig::make(2, 1, 10, 4, 4, 1, 4));
  CHECK_THROWS_AS(grid.position(2), std::out_of_range);
  CHECK_THROWS_AS(grid.position(-3), std::out_of_range);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(SystemConfig::make(0, 1, 10, 4, 4, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::make(4, 5, 10, 4, 4, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::make(6, 4, 10, 4, 4, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::make(4, 2, 10, 0, 4, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::make(4, 2, 2, 4, 4, 1, 1), std::invalid_argument);  // f0 <= W/2
  CHECK_THROWS_AS(SystemConfig::make(4, 2, 10, 4, 4, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::make(4, 2, 10, 4, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::make(4, 2, 10, 4, 4, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::with_mapping(3, {{0, 1}, {1, 2}}, 10, 4, 4, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::with_mapping(3, {{0}, {2}}, 10, 4, 4, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::with_mapping(3, {{0, 1, 2}, {}}, 10, 4, 4, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(SystemConfig::with_mapping(3, {{0, 3}, {1, 2}}, 10, 4, 4, 1, 1),
                  std::invalid_argument);

  const auto cfg = SystemConfig::make(8, 4, 10, 4, 4, 2, 4);
  CHECK(cfg.groups()[1] == std::vector<int>{2, 3});
  CHECK(cfg.ttd_of(5) == 2);
  CHECK(cfg.half_delay_range() == doctest::Approx(0.25));
  CHECK(cfg.max_delay() == doctest::Approx(0.5));

  const auto odd = SystemConfig::with_mapping(3, {{2, 0}, {1}}, 10, 4, 4, 1, 1);
  CHECK(odd.ttd_of(0) == 0);
  CHECK(odd.ttd_of(1) == 1);
}

TEST_CASE("steering angle range") {
  CHECK_NOTHROW(SteeringAngle::from_degrees(90));
  CHECK_NOTHROW(SteeringAngle::from_degrees(-90));
  CHECK_THROWS_AS(SteeringAngle::from_degrees(95), std::invalid_argument);
  CHECK(SteeringAngle::from_degrees(30).radians() == doctest::Approx(kPi / 6));
}

TEST_CASE("wrap_phase lands in [-pi, pi)") {
  CHECK(wrap_phase(kPi) == doctest::Approx(-kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(-kPi));
  CHECK(wrap_phase(3 * kPi + 0.5) == doctest::Approx(-kPi + 0.5));
  oracle::Gen gen(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = gen.uniform(-100, 100);
    const double y = wrap_phase(x);
    CHECK(y >= -kPi);
    CHECK(y < kPi);
    const double turns = (x - y) / kTwoPi;
    CHECK(std::abs(turns - std::round(turns)) < 1e-9);
  }
}

TEST_CASE("array response examples") {
  const auto cfg = SystemConfig::make(4, 1, 100e9, 10e9, 8, 1, 8);
  const auto grid = build_grid(cfg);
  for (int k : grid.indices()) {
    const auto a = array_response(cfg, grid, k, SteeringAngle(0));
    for (int m = 0; m < 4; ++m) CHECK(std::abs(a[m] - cdouble(1, 0)) < 1e-15);
  }
  const auto two = SystemConfig::make(2, 1, 100e9, 10e9, 8, 1, 8);
  const auto a2 = array_response(two, build_grid(two), 0, SteeringAngle(kPi / 2));
  CHECK(std::abs(a2[0] - cdouble(1, 0)) < 1e-15);
  CHECK(std::abs(a2[1] - cdouble(-1, 0)) < 1e-15);

  // K=8, k=K/4 sits at f0 + W/4.
  const auto a = array_response(cfg, grid, 2, SteeringAngle(kPi / 6));
  for (int m = 1; m <= 4; ++m) {
    const double expected = (m - 1) * kPi * 0.5 * (1 + 10e9 / (4 * 100e9));
    CHECK(std::abs(a[m - 1] - std::polar(1.0, expected)) < 1e-12);
  }
  CHECK_THROWS_AS(array_response(cfg, grid, 4, SteeringAngle(0)), std::out_of_range);
}

TEST_CASE("array response is unit modulus and matches the reference") {
  oracle::Gen gen(3);
  const auto cfg = reference_config(64);
  const auto grid = build_grid(cfg);
  for (int t = 0; t < 200; ++t) {
    const int k = gen.integer(grid.first_index(), grid.last_index());
    const double theta = gen.uniform(-kPi / 2, kPi / 2);
    const auto a = array_response(cfg, grid, k, SteeringAngle(theta));
    const auto ref = oracle::response(64, oracle::freq(k, 100e9, 10e9, 64), 100e9, theta);
    for (int m = 0; m < 64; ++m) {
      CHECK(std::abs(std::abs(a[m]) - 1.0) < 1e-12);
      CHECK(std::abs(a[m] - ref[static_cast<size_t>(m)]) < 1e-11);
    }
  }
}

TEST_CASE("effective beamformer") {
  SUBCASE("identity settings") {
    const auto cfg = SystemConfig::make(4, 2, 100e9, 10e9, 8, 4, 8);
    const auto grid = build_grid(cfg);
    JptaBeamformer bf{{0, 0}, {0, 0, 0, 0}, {}};
    for (int k : grid.indices()) {
      const auto w = effective_beamformer(cfg, grid, bf, k);
      for (int m = 0; m < 4; ++m) CHECK(std::abs(w[m] - cdouble(0.5, 0)) < 1e-15);
    }
  }
  SUBCASE("scalar case") {
    const auto cfg = SystemConfig::make(1, 1, 100e9, 10e9, 8, 4, 8);
    const auto grid = build_grid(cfg);
    const double t = 0.13e-9, p = 0.7;
    JptaBeamformer bf{{t}, {p}, {}};
    for (int k : grid.indices()) {
      const auto w = effective_beamformer(cfg, grid, bf, k);
      CHECK(std::abs(w[0] - std::polar(1.0, p - kTwoPi * grid.frequency(k) * t)) < 1e-12);
    }
  }
  SUBCASE("dimension mismatch") {
    const auto cfg = SystemConfig::make(4, 2, 100e9, 10e9, 8, 4, 8);
    const auto grid = build_grid(cfg);
    CHECK_THROWS_AS(effective_beamformer(cfg, grid, JptaBeamformer{{0}, {0, 0, 0, 0}, {}}, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(effective_beamformer(cfg, grid, JptaBeamformer{{0, 0}, {0, 0}, {}}, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("effective beamformer: unit norm, reference agreement, common-delay invariance") {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int N = 1 << gen.integer(0, 3);
    const int M = N * gen.integer(1, 4);
    const int K = gen.integer(1, 32);
    const auto cfg = SystemConfig::make(M, N, 100e9, 10e9, K, 8, K);
    const auto grid = build_grid(cfg);
    JptaBeamformer bf;
    for (int n = 0; n < N; ++n) bf.delays.push_back(gen.uniform(-1e-9, 1e-9));
    for (int m = 0; m < M; ++m) bf.phases.push_back(gen.uniform(-kPi, kPi));
    JptaBeamformer shifted = bf;
    const double c = gen.uniform(-1e-9, 1e-9);
    for (double& t : shifted.delays) t += c;

    const double theta = gen.uniform(-kPi / 2, kPi / 2);
    for (int k : grid.indices()) {
      const auto w = effective_beamformer(cfg, grid, bf, k);
      CHECK(std::abs(w.norm() - 1.0) < 1e-12);
      const auto ref = oracle::effective(M, N, grid.frequency(k), bf.delays, bf.phases);
      for (int m = 0; m < M; ++m) CHECK(std::abs(w[m] - ref[static_cast<size_t>(m)]) < 1e-9);
      const double g1 = array_gain(cfg, grid, w, k, SteeringAngle(theta));
      const double g2 =
          array_gain(cfg, grid, effective_beamformer(cfg, grid, shifted, k), k, SteeringAngle(theta));
      CHECK(std::abs(g1 - g2) < 1e-10 * M);
      CHECK(g1 <= M * (1 + 1e-12));
    }
  }
}

TEST_CASE("array gain") {
  const auto cfg = reference_config(16);
  const auto grid = build_grid(cfg);
  const auto theta = SteeringAngle(0.3);
  const auto a = array_response(cfg, grid, 3, theta);
  const double g = array_gain(cfg, grid, a / 8.0, 3, theta);
  CHECK(g == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(gain_to_db(g) == doctest::Approx(18.0618).epsilon(1e-5));

  // a_k(0) is all ones; an alternating-sign vector is orthogonal to it.
  Eigen::VectorXcd w(64);
  for (int m = 0; m < 64; ++m) w[m] = (m % 2 ? -1.0 : 1.0) / 8.0;
  CHECK(array_gain(cfg, grid, w, 0, SteeringAngle(0)) < 1e-28);
  CHECK_THROWS_AS(array_gain(cfg, grid, Eigen::VectorXcd::Ones(3), 0, theta), std::invalid_argument);

  oracle::Gen gen(9);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXcd v(64);
    for (int m = 0; m < 64; ++m) v[m] = gen.complex_normal();
    v.normalize();
    const int k = gen.integer(-8, 7);
    CHECK(array_gain(cfg, grid, v, k, SteeringAngle(gen.uniform(-1.5, 1.5))) <= 64 * (1 + 1e-12));
  }
}

TEST_CASE("gain map") {
  SUBCASE("single subcarrier and angle") {
    const auto cfg = SystemConfig::make(8, 1, 100e9, 10e9, 1, 1, 1);
    const auto grid = build_grid(cfg);
    Eigen::MatrixXcd beams = Eigen::MatrixXcd::Ones(8, 1) / std::sqrt(8.0);
    beams(3, 0) = cdouble(0, 1) / std::sqrt(8.0);
    const std::vector<double> thetas{0.4};
    const auto map = gain_map(cfg, grid, beams, thetas);
    REQUIRE(map.rows() == 1);
    REQUIRE(map.cols() == 1);
    CHECK(map(0, 0) == doctest::Approx(array_gain(cfg, grid, beams.col(0), 0, SteeringAngle(0.4))));
    CHECK_THROWS_AS(gain_map(cfg, grid, beams, std::vector<double>{}), std::invalid_argument);
  }
  SUBCASE("matched set peaks at the steering angle") {
    const auto cfg = reference_config(16);
    const auto grid = build_grid(cfg);
    const double theta0 = 30 * kPi / 180;
    Eigen::MatrixXcd beams(64, 16);
    for (int p = 0; p < 16; ++p) {
      beams.col(p) = array_response(cfg, grid, grid.indices()[p], SteeringAngle(theta0)) / 8.0;
    }
    const auto thetas = default_theta_grid();
    CHECK(thetas.size() == 181);
    const auto map = gain_map(cfg, grid, beams, thetas);
    for (int p = 0; p < 16; ++p) {
      Eigen::Index best;
      map.row(p).maxCoeff(&best);
      CHECK(best == 120);  // -90 + 120 = 30 degrees
      for (size_t t = 0; t < thetas.size(); t += 17) {
        CHECK(map(p, static_cast<Eigen::Index>(t)) ==
              doctest::Approx(array_gain(cfg, grid, beams.col(p), grid.indices()[p],
                                         SteeringAngle(thetas[t])))
                  .epsilon(1e-10));
      }
    }
  }
  SUBCASE("frequency-flat steering squints at the band edges") {
    const auto cfg = reference_config(16);
    const auto grid = build_grid(cfg);
    const double theta0 = kPi / 6;
    const Eigen::VectorXcd w = array_response_at(64, 100e9, 100e9, theta0) / 8.0;
    const double g_mid = array_gain(cfg, grid, w, 0, SteeringAngle(theta0));
    const double g_lo = array_gain(cfg, grid, w, grid.first_index(), SteeringAngle(theta0));
    const double g_hi = array_gain(cfg, grid, w, grid.last_index(), SteeringAngle(theta0));
    CHECK(g_mid == doctest::Approx(64.0));
    CHECK(g_lo < g_mid - 1);
    CHECK(g_hi < g_mid - 1);
  }
}

TEST_CASE("gain_to_db floor") {
  CHECK(gain_to_db(0.0) == -100.0);
  CHECK(gain_to_db(1e-12) == -100.0);
  CHECK(gain_to_db(10.0) == doctest::Approx(10.0));
}
