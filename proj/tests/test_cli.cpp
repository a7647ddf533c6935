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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "jpta/config.hpp"
#include "jpta/design.hpp"
#include "jpta/errors.hpp"
#include "jpta/experiment.hpp"
#include "jpta/io.hpp"
#include "jpta/metrics.hpp"
#include "jpta/reproduce.hpp"
#include "oracles.hpp"

using namespace jpta;
using namespace jpta::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("jpta_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig small_config(const std::string& target_json, const std::string& algorithm_json,
                              const std::string& extra = "") {
  return parse_config(R"({"system": {"M": 8, "N": 4, "K": 32, "kappa": 8}, "target": )" + target_json +
                      R"(, "algorithm": )" + algorithm_json + extra + "}");
}

}  // namespace

TEST_CASE("angles parse from numbers and degree strings") {
  CHECK(parse_angle_deg(30, "x") == 30.0);
  CHECK(parse_angle_deg("-45deg", "x") == -45.0);
  CHECK(parse_angle_deg(" 12.5 deg ", "x") == 12.5);
  CHECK(parse_angle_deg("90", "x") == 90.0);
  CHECK_THROWS_AS(parse_angle_deg("95deg", "x"), ConfigError);
  CHECK_THROWS_AS(parse_angle_deg("abc", "x"), ConfigError);
  CHECK_THROWS_AS(parse_angle_deg("30rad", "x"), ConfigError);
  CHECK_THROWS_AS(parse_angle_deg(nlohmann::json::array(), "x"), ConfigError);
}

TEST_CASE("malformed angle is reported with its line and field name") {
  const std::string text =
      "{\n"
      "  \"system\": {\"M\": 8, \"N\": 8, \"K\": 16},\n"
      "  \"target\": {\"behavior\": 2,\n"
      "    \"theta1_deg\": -45,\n"
      "    \"theta2_deg\": \"95deg\"},\n"
      "  \"algorithm\": {\"jpta\": {}}\n"
      "}\n";
  const std::string msg = error_of(text);
  CHECK(msg.find("cfg.json:5:") == 0);
  CHECK(msg.find("target.theta2_deg") != std::string::npos);
  CHECK(msg.find("95") != std::string::npos);
}

TEST_CASE("config validation names the offending field") {
  const std::string base = R"("target": {"behavior": 1}, "algorithm": {"jpta": {}})";
  CHECK(error_of(R"({"system": {"M": 8, "N": 3}, )" + base + "}").find("system.N") != std::string::npos);
  CHECK(error_of(R"({"system": {"W_ghz": -1}, )" + base + "}").find("system.W_ghz") != std::string::npos);
  CHECK(error_of(R"({"system": {"kappa": -1}, )" + base + "}").find("system.kappa") != std::string::npos);
  CHECK(error_of(R"({"sytem": {}, )" + base + "}").find("sytem: unknown key") != std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 1}})").find("missing \"algorithm\"") != std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 5}, "algorithm": {"jpta": {}}})").find("target.behavior") !=
        std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 1}, "algorithm": {"jpta": {}, "hbf": {}}})").find("exactly one") !=
        std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 1}, "algorithm": {"jpta": {"variant": "newton"}}})")
            .find("algorithm.jpta.variant") != std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 1}, "algorithms": [{"jpta": {}}, {"hbf": {"structure": "pc", "n_rf": 3}}]})")
            .find("algorithms[1].hbf.n_rf") != std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 1, "theta0_deg": 60, "delta_theta_deg": 90}, "algorithm": {"jpta": {}}})")
            .find("target.delta_theta_deg") != std::string::npos);
  CHECK(error_of(R"({"target": {"behavior": 1}, "algorithm": {"jpta": {}}, "sweep": {"parameter": "N", "values": [3]}})")
            .find("sweep.values[0]") != std::string::npos);
  CHECK(error_of("{\n\"target\": {\"behavior\": 1},\n\"algorithm\": [}").find("cfg.json:3:") == 0);
}

TEST_CASE("the resolved config echo parses back to itself") {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    ExperimentConfig c;
    c.name = "trial" + std::to_string(trial);
    c.seed = static_cast<std::uint64_t>(gen.integer(0, 1000));
    c.system.M = 16;
    c.system.N = 1 << gen.integer(0, 4);
    c.system.K = gen.integer(1, 64);
    c.system.kappa = gen.uniform(0.0, 20.0);
    const int behavior = gen.integer(1, 3);
    c.target.kind = static_cast<TargetKind>(behavior - 1);
    c.target.theta0_deg = gen.uniform(-40.0, 40.0);
    c.target.delta_theta_deg = gen.uniform(-80.0, 80.0);
    c.target.theta1_deg = gen.uniform(-90.0, 90.0);
    c.target.theta2_deg = gen.uniform(-90.0, 90.0);
    c.target.angles_deg = {gen.uniform(-90.0, 90.0)};
    AlgorithmBlock a;
    a.kind = static_cast<AlgorithmKind>(gen.integer(0, 2));
    if (a.kind == AlgorithmKind::kHeuristic && behavior == 3) a.kind = AlgorithmKind::kJpta;
    a.variant = gen.integer(0, 1) ? TtdUpdate::kWls : TtdUpdate::kLineSearch;
    a.max_iter = gen.integer(1, 30);
    if (gen.integer(0, 1)) a.epsilon = gen.uniform(1e-9, 1e-3);
    a.structure = gen.integer(0, 1) ? HbfStructure::kPartiallyConnected : HbfStructure::kFullyConnected;
    a.n_rf = 1 << gen.integer(0, 4);
    c.algorithms = {a};
    if (gen.integer(0, 1)) c.sweep = SweepBlock{SweepParameter::kKappa, {0.0, gen.uniform(1.0, 5.0)}};
    const std::string once = echo(c);
    CHECK(echo(parse_config(once)) == once);
  }
}

TEST_CASE("design output is byte-identical across runs and round-trips F_obj") {
  const fs::path dir = scratch_dir("design");
  ExperimentConfig c = small_config(R"({"behavior": 1, "theta0_deg": 10, "delta_theta_deg": 40})",
                                    R"({"jpta": {"variant": "line_search"}})");
  c.output.dir = (dir / "a").string();
  c.output.gain_map = true;
  const DesignOutputs first = run_design(c);
  const std::string bf1 = slurp(first.beamformer_path);
  const std::string rep1 = slurp(first.report_path);
  const std::string gm1 = slurp(first.gain_map_path);
  const DesignOutputs second = run_design(c);
  CHECK(slurp(second.beamformer_path) == bf1);
  CHECK(slurp(second.report_path) == rep1);
  CHECK(slurp(second.gain_map_path) == gm1);

  CHECK(std::abs(refit_beamformer_file(first.beamformer_path) - first.result.report.f_obj) < 1e-9);
  std::ifstream rep(first.report_path);
  const FitReport parsed = read_fit_report(rep);
  CHECK(parsed.f_obj == first.result.report.f_obj);
  CHECK(parsed.f_tilde_obj == first.result.report.f_tilde_obj);
  CHECK(parsed.convergence_trace == first.result.report.convergence_trace);
  CHECK(parsed.per_subcarrier_match.size() == 32);
  CHECK(parsed.metadata.at("algorithm") == "jpta-ls");
}

TEST_CASE("hybrid and heuristic designs round-trip through their files") {
  const fs::path dir = scratch_dir("hybrid");
  for (const std::string alg : {R"({"hbf": {"structure": "fc", "n_rf": 3}})", R"({"hbf": {"structure": "pc", "n_rf": 4}})",
                                R"({"heuristic": {}})"}) {
    ExperimentConfig c = small_config(R"({"behavior": 2, "theta1_deg": -30, "theta2_deg": 20})", alg);
    c.output.dir = (dir / "x").string();
    const DesignOutputs out = run_design(c);
    CHECK(std::abs(refit_beamformer_file(out.beamformer_path) - out.result.report.f_obj) < 1e-9);
  }
}

TEST_CASE("gain-map from a stored beamformer matches the design's map") {
  const fs::path dir = scratch_dir("gainmap");
  ExperimentConfig c = small_config(R"({"behavior": 1, "theta0_deg": 0, "delta_theta_deg": 60})", R"({"jpta": {}})");
  c.output.dir = dir.string();
  c.output.gain_map = true;
  c.output.theta_step_deg = 5.0;
  const DesignOutputs out = run_design(c);
  const std::string again = gain_map_from_file(out.beamformer_path, (dir / "again.csv").string(), 5.0, false);
  std::ifstream a(out.gain_map_path), b(again);
  const GainMapData da = read_gain_map(a);
  const GainMapData db = read_gain_map(b);
  REQUIRE(da.gain_linear.rows() == 32);
  REQUIRE(da.gain_linear.cols() == 37);
  CHECK((da.gain_linear - db.gain_linear).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(da.k.front() == -16);
  CHECK(da.k.back() == 15);
}

TEST_CASE("behavior-2 gain map switches its peak angle at k = 0") {
  const fs::path dir = scratch_dir("b2map");
  ExperimentConfig c = parse_config(R"({"system": {"M": 64, "N": 64, "K": 256, "kappa": 64},
      "target": {"behavior": 2, "theta1_deg": -45, "theta2_deg": 30},
      "algorithm": {"jpta": {}}, "output": {"gain_map": true}})");
  c.output.dir = dir.string();
  const DesignOutputs out = run_design(c);
  std::ifstream in(out.gain_map_path);
  const GainMapData g = read_gain_map(in);
  // Post-hoc scan: nearest target angle of every row's argmax. The lobe hands
  // over gradually, so the single switch may sit within two subcarriers of 0.
  int wrong = 0;
  int switches = 0;
  int switch_at = 0;
  bool prev_first = true;
  for (Eigen::Index r = 0; r < g.gain_linear.rows(); ++r) {
    Eigen::Index best = 0;
    g.gain_linear.row(r).maxCoeff(&best);
    const double theta = g.theta_deg[static_cast<size_t>(best)];
    const bool first = std::abs(theta + 45.0) < std::abs(theta - 30.0);
    if (r > 0 && first != prev_first) {
      ++switches;
      switch_at = g.k[static_cast<size_t>(r)];
    }
    prev_first = first;
    const int k = g.k[static_cast<size_t>(r)];
    if (std::abs(k) > 2) wrong += (first != (k < 0)) ? 1 : 0;
  }
  CHECK(wrong == 0);
  CHECK(switches == 1);
  CHECK(std::abs(switch_at) <= 2);
}

TEST_CASE("sweep output is independent of the worker count") {
  ExperimentConfig c = small_config(R"({"behavior": 1, "theta0_deg": 20, "delta_theta_deg": 30})", R"({"jpta": {}})",
                                    R"(, "sweep": {"parameter": "kappa", "values": [8, 0, 2, 4]})");
  c.algorithms.clear();
  for (const std::string alg : {R"({"jpta": {}})", R"({"jpta": {"variant": "wls"}})", R"({"heuristic": {}})",
                                R"({"hbf": {"n_rf": 2}})"}) {
    c.algorithms.push_back(small_config(R"({"behavior": 1})", alg).algorithms.front());
  }
  const auto serial = run_sweep(c, 1);
  const auto parallel = run_sweep(c, 3);
  std::ostringstream a, b;
  write_records(a, preamble(c), serial, false);
  write_records(b, preamble(c), parallel, false);
  CHECK(a.str() == b.str());
  REQUIRE(serial.size() == 16);
  // Sorted by value, then by config order; hybrid rows repeat (independent of kappa).
  CHECK(serial[0].value == 0.0);
  CHECK(serial[0].algorithm == "jpta-ls");
  CHECK(serial[3].algorithm == "hbf-fc");
  CHECK(serial[15].value == 8.0);
  CHECK(serial[3].f_obj == serial[15].f_obj);
  std::istringstream back(a.str());
  const auto reread = read_records(back);
  REQUIRE(reread.size() == serial.size());
  for (size_t i = 0; i < serial.size(); ++i) CHECK(reread[i].f_obj == serial[i].f_obj);
}

TEST_CASE("max-iter sweep rows equal separate designs") {
  ExperimentConfig c = small_config(R"({"behavior": 1, "theta0_deg": 20, "delta_theta_deg": 50})",
                                    R"({"jpta": {}})", R"(, "sweep": {"parameter": "max_iter", "values": [1, 3, 7]})");
  const auto rows = run_sweep(c, 1);
  REQUIRE(rows.size() == 3);
  for (const ResultRecord& r : rows) {
    ExperimentConfig single = c;
    single.sweep.reset();
    single.algorithms.front().max_iter = static_cast<int>(r.value);
    const Instance inst = make_instance(single);
    const RunResult direct = run_algorithm(inst, single, single.algorithms.front());
    CHECK(std::abs(direct.report.f_obj - r.f_obj) < 1e-12);
    CHECK(std::abs(direct.report.f_tilde_obj - r.f_tilde_obj) < 1e-12);
    CHECK(direct.iterations == r.iterations);
  }
}

TEST_CASE("N sweep, behavior 1: line-search F_obj is non-decreasing in N") {
  ExperimentConfig c = parse_config(R"({"system": {"M": 64, "K": 256, "kappa": 64},
      "target": {"behavior": 1, "theta0_deg": 30, "delta_theta_deg": 45},
      "algorithms": [{"jpta": {}}], "sweep": {"parameter": "N", "values": [1, 2, 4, 8, 16, 32, 64]}})");
  const auto rows = run_sweep(c, 1);
  REQUIRE(rows.size() == 7);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].f_obj >= rows[i - 1].f_obj);
}

TEST_CASE("kappa sweep, behavior 2: F_obj is flat within 1% once kappa >= 3") {
  ExperimentConfig c = parse_config(R"({"system": {"M": 64, "N": 64, "K": 256},
      "target": {"behavior": 2, "theta1_deg": -45, "theta2_deg": 30},
      "algorithms": [{"jpta": {}}], "sweep": {"parameter": "kappa", "values": [3, 4, 8, 16, 32, 64]}})");
  const auto rows = run_sweep(c, 1);
  double lo = 1.0, hi = 0.0;
  for (const ResultRecord& r : rows) {
    lo = std::min(lo, r.f_obj);
    hi = std::max(hi, r.f_obj);
  }
  CHECK((hi - lo) / hi < 0.01);
}

TEST_CASE("RF-chain sweep is warm started and never loses fit") {
  ExperimentConfig c = small_config(R"({"behavior": 1, "theta0_deg": 0, "delta_theta_deg": 90})",
                                    R"({"hbf": {"structure": "fc", "restarts": 2}})",
                                    R"(, "sweep": {"parameter": "n_rf", "values": [1, 2, 3, 4, 6, 8]})");
  const auto rows = run_sweep(c, 1);
  REQUIRE(rows.size() == 6);
  for (size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].f_obj >= rows[i - 1].f_obj - 1e-12);
  CHECK(rows.back().f_obj > 0.999);
}

TEST_CASE("matching objective equals the JPTA objective_tilde") {
  oracle::Gen gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemConfig cfg = SystemConfig::make(8, 4, 100e9, 10e9, 16, gen.uniform(0.0, 8.0), 16);
    const SubcarrierGrid grid = build_grid(cfg);
    const BeamTarget t = behavior2_target(cfg, grid, gen.uniform(-1.2, 1.2), gen.uniform(-1.2, 1.2));
    const DesignResult d = design_jpta(cfg, grid, t);
    Eigen::MatrixXcd x = effective_beam_set(cfg, grid, d.beamformer);
    for (Eigen::Index p = 0; p < x.cols(); ++p) x.col(p) *= d.beamformer.alpha[static_cast<size_t>(p)];
    CHECK(std::abs(matching_objective(t, x) - objective_tilde(t, d.beamformer, cfg, grid)) < 1e-10);
  }
}

TEST_CASE("discrete delay sets load in ns and drive quantized designs") {
  const fs::path dir = scratch_dir("discrete");
  {
    std::ofstream f(dir / "set.txt");
    f << "# delays in ns\n0 0.1 0.2\n0.3 0.4   # tail\n0.5 0.6 0.7 0.8\n";
  }
  const auto set = read_discrete_set((dir / "set.txt").string());
  REQUIRE(set.size() == 9);
  CHECK(std::abs(set[8] - 0.8e-9) < 1e-20);
  ExperimentConfig c = small_config(R"({"behavior": 1, "theta0_deg": 10, "delta_theta_deg": 40})",
                                    R"({"jpta": {"discrete_set_file": "set.txt"}})");
  c.base_dir = dir.string();
  const Instance inst = make_instance(c);
  const RunResult r = run_algorithm(inst, c, c.algorithms.front());
  for (double tau : r.jpta->delays) {
    CHECK(std::any_of(set.begin(), set.end(), [&](double s) { return std::abs(s - tau) < 1e-18; }));
  }
  {
    std::ofstream f(dir / "bad.txt");
    f << "0.1 zero\n";
  }
  CHECK_THROWS_AS(read_discrete_set((dir / "bad.txt").string()), ConfigError);
}

TEST_CASE("worker pool covers every index and propagates failures") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(parallel_for(50, 3,
                               [&](size_t i) {
                                 ++ran;
                                 if (i == 7) throw NumericalError("boom");
                               }),
                  NumericalError);
}

TEST_CASE("beamformer file reader rejects malformed input") {
  std::istringstream missing("[config]\n{}\n[delays_ns]\n1\n");
  CHECK_THROWS_AS(read_beamformer(missing), FormatError);
  std::istringstream garbage("[config]\n{}\n[delays_ns]\nabc\n[phases_rad]\n[alpha_re_im]\n");
  CHECK_THROWS_AS(read_beamformer(garbage), FormatError);
  std::istringstream ok("[config]\n{}\n[delays_ns]\n1.5\n[phases_rad]\n-0.25\n[alpha_re_im]\n1,-2\n");
  const BeamformerFile f = read_beamformer(ok);
  CHECK(f.beamformer.delays.at(0) == doctest::Approx(1.5e-9));
  CHECK(f.beamformer.alpha.at(0) == cdouble(1, -2));
}

TEST_CASE("exact formatting reads back bit for bit") {
  oracle::Gen gen(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = gen.normal() * std::pow(10.0, gen.integer(-12, 12));
    CHECK(std::stod(format_exact(x)) == x);
  }
}

TEST_CASE("percentile interpolates and crossover finds the first reaching count") {
  CHECK(percentile({1, 2, 3, 4, 5}, 50) == 3.0);
  CHECK(percentile({5, 1, 3}, 0) == 1.0);
  CHECK(percentile({1, 2}, 10) == doctest::Approx(1.1));
  CHECK(crossover_chains({1, 2, 4}, {0.1, 0.5, 0.9}, 0.5) == 2);
  CHECK(crossover_chains({1, 2, 4}, {0.1, 0.2, 0.3}, 0.5) == 0);
}

TEST_CASE("unknown figure ids are config errors") {
  ReproduceOptions o;
  o.out_dir = scratch_dir("repro").string();
  CHECK_THROWS_AS(reproduce("fig3", o), ConfigError);
  CHECK(figure_ids().size() == 7);
}
