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

#include "jpta/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "jpta/design.hpp"
#include "jpta/errors.hpp"
#include "jpta/heuristics.hpp"

namespace jpta::cli {

namespace {

constexpr double kDeg = kPi / 180.0;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string resolve(const ExperimentConfig& e, const std::string& file) {
  const std::filesystem::path p(file);
  return p.is_relative() ? (std::filesystem::path(e.base_dir) / p).string() : file;
}

// Equal-width bands: the b-th band starts at position round(b K / B).
std::vector<int> equal_band_edges(const SubcarrierGrid& grid, size_t bands) {
  std::vector<int> edges;
  for (size_t b = 1; b < bands; ++b) {
    const auto pos = static_cast<int>(std::lround(static_cast<double>(b) * grid.size() / bands));
    edges.push_back(grid.first_index() + pos);
  }
  return edges;
}

DesignOptions design_options(const ExperimentConfig& e, const AlgorithmBlock& a) {
  DesignOptions o;
  o.ttd_update = a.variant;
  o.max_iter = a.max_iter;
  o.grid_size = a.grid;
  o.enforce_nonnegative_delays = a.nonnegative;
  o.convergence_epsilon = a.epsilon;
  o.random_init_seed = a.init_seed;
  if (!a.discrete_set_file.empty()) o.discrete_delays = read_discrete_set(resolve(e, a.discrete_set_file));
  return o;
}

HbfOptions hbf_options(const ExperimentConfig& e, const AlgorithmBlock& a, const Instance& inst) {
  HbfOptions o;
  o.iters = a.iters;
  o.seed = a.seed.value_or(e.seed);
  o.restarts = a.restarts;
  o.power_budget = inst.config.total_power();
  return o;
}

void fill_report(RunResult& r, const Instance& inst, const ExperimentConfig& e,
                 const Eigen::MatrixXcd& transmitted, std::vector<double> trace) {
  r.beams = normalize_columns(transmitted);
  r.report.f_obj = fit_objective(inst.target, r.beams);
  r.report.f_tilde_obj = matching_objective(inst.target, transmitted);
  r.report.per_subcarrier_match = per_subcarrier_match(inst.target, r.beams);
  r.report.convergence_trace = std::move(trace);
  r.report.metadata["algorithm"] = r.algorithm;
  r.report.metadata["experiment"] = e.name;
  r.report.metadata["seed"] = std::to_string(r.seed);
  if (!std::isfinite(r.report.f_obj) || !std::isfinite(r.report.f_tilde_obj)) {
    throw NumericalError(r.algorithm + ": non-finite fit");
  }
}

Eigen::MatrixXcd transmitted_jpta(const Instance& inst, const JptaBeamformer& bf) {
  Eigen::MatrixXcd x = effective_beam_set(inst.config, inst.grid, bf);
  for (Eigen::Index p = 0; p < x.cols(); ++p) x.col(p) *= bf.alpha[static_cast<size_t>(p)];
  return x;
}

ExperimentConfig with_value(const ExperimentConfig& e, SweepParameter p, double v) {
  ExperimentConfig c = e;
  switch (p) {
    case SweepParameter::kN:
      c.system.N = static_cast<int>(v);
      break;
    case SweepParameter::kKappa:
      c.system.kappa = v;
      break;
    case SweepParameter::kMaxIter:
      for (AlgorithmBlock& a : c.algorithms) a.max_iter = static_cast<int>(v);
      break;
    case SweepParameter::kNrf:
      for (AlgorithmBlock& a : c.algorithms) a.n_rf = static_cast<int>(v);
      break;
  }
  return c;
}

bool depends_on(const AlgorithmBlock& a, SweepParameter p) {
  switch (p) {
    case SweepParameter::kN:
    case SweepParameter::kKappa:
      return a.kind != AlgorithmKind::kHbf;
    case SweepParameter::kMaxIter:
      return a.kind == AlgorithmKind::kJpta;
    case SweepParameter::kNrf:
      return a.kind == AlgorithmKind::kHbf;
  }
  return true;
}

ResultRecord record_of(const ExperimentConfig& e, const RunResult& r, const std::string& param, double value) {
  ResultRecord rec;
  rec.experiment = e.name;
  rec.algorithm = r.algorithm;
  rec.parameter = param;
  rec.value = value;
  rec.f_obj = r.report.f_obj;
  rec.f_tilde_obj = r.report.f_tilde_obj;
  rec.iterations = r.iterations;
  rec.seed = r.seed;
  if (e.output.timing) rec.wall_time_s = r.wall_time_s;
  return rec;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

ExperimentConfig config_from_echo(const std::string& json_text, const std::string& source) {
  return parse_config(json_text, source + " [config]");
}

}  // namespace

Instance make_instance(const ExperimentConfig& e) {
  const SystemBlock& s = e.system;
  std::optional<SystemConfig> config;
  try {
    config = SystemConfig::make(s.M, s.N, s.f0_ghz * 1e9, s.W_ghz * 1e9, s.K, s.kappa, s.power());
  } catch (const std::invalid_argument& err) {
    throw ConfigError("system: " + std::string(err.what()));
  }
  SubcarrierGrid grid(*config);
  const TargetBlock& t = e.target;
  try {
    switch (t.kind) {
      case TargetKind::kBehavior1:
        return {*config, grid, behavior1_target(*config, grid, t.theta0_deg * kDeg, t.delta_theta_deg * kDeg, t.weights)};
      case TargetKind::kBehavior2:
        return {*config, grid, behavior2_target(*config, grid, t.theta1_deg * kDeg, t.theta2_deg * kDeg, t.weights)};
      case TargetKind::kBehavior3: {
        std::vector<double> angles;
        for (double a : t.angles_deg) angles.push_back(a * kDeg);
        const std::vector<int> edges = t.band_edges.empty() ? equal_band_edges(grid, angles.size()) : t.band_edges;
        return {*config, grid, multi_angle_target(*config, grid, edges, angles, t.weights)};
      }
      case TargetKind::kCustom: {
        CustomTargetOptions opts;
        opts.rescale = t.rescale;
        opts.scheme = t.weights;
        return {*config, grid, custom_target(*config, grid, resolve(e, t.file), opts)};
      }
    }
  } catch (const std::invalid_argument& err) {
    throw ConfigError("target: " + std::string(err.what()));
  } catch (const FormatError& err) {
    throw ConfigError("target.file: " + std::string(err.what()));
  }
  throw ConfigError("target: unknown behavior");
}

double matching_objective(const BeamTarget& target, const Eigen::MatrixXcd& transmitted) {
  const int K = target.num_subcarriers();
  double total = 0.0;
  for (int p = 0; p < K; ++p) {
    const double n = transmitted.col(p).norm();
    const double gap = target.norms()[p] - n;
    Eigen::VectorXcd diff = target.directions().col(p);
    if (n > 0.0) diff -= transmitted.col(p) / n;
    total += gap * gap + target.weights()[static_cast<size_t>(p)] * diff.squaredNorm();
  }
  return total / K;
}

std::vector<double> read_discrete_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open discrete delay set");
  std::vector<double> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string w;
    while (words >> w) {
      try {
        size_t used = 0;
        const double ns = std::stod(w, &used);
        if (used != w.size() || !std::isfinite(ns)) throw std::invalid_argument(w);
        out.push_back(ns * 1e-9);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(n) + ": \"" + w + "\" is not a delay in ns");
      }
    }
  }
  if (out.empty()) throw ConfigError(path + ": discrete delay set is empty");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

RunResult run_algorithm(const Instance& inst, const ExperimentConfig& e, const AlgorithmBlock& a) {
  RunResult r;
  r.algorithm = a.label();
  const auto start = std::chrono::steady_clock::now();
  switch (a.kind) {
    case AlgorithmKind::kJpta: {
      DesignOptions opts;
      try {
        opts = design_options(e, a);
        opts.validate(inst.config);
      } catch (const std::invalid_argument& err) {
        throw ConfigError("algorithm.jpta: " + std::string(err.what()));
      }
      r.seed = a.init_seed.value_or(e.seed);
      DesignResult d = design_jpta(inst.config, inst.grid, inst.target, opts);
      r.wall_time_s = seconds_since(start);
      r.iterations = d.iterations;
      fill_report(r, inst, e, transmitted_jpta(inst, d.beamformer), d.objective_trace);
      r.report.metadata["degenerate_updates"] = std::to_string(d.degenerate_updates);
      r.jpta = std::move(d.beamformer);
      break;
    }
    case AlgorithmKind::kHeuristic: {
      HeuristicOptions opts;
      opts.strict_verbatim = a.strict_verbatim;
      const TargetBlock& t = e.target;
      HeuristicDesign h;
      try {
        h = t.kind == TargetKind::kBehavior1
                ? heuristic_behavior1(inst.config, inst.grid, t.theta0_deg * kDeg, t.delta_theta_deg * kDeg, opts)
                : heuristic_behavior2(inst.config, inst.grid, t.theta1_deg * kDeg, t.theta2_deg * kDeg, opts);
      } catch (const std::invalid_argument& err) {
        throw ConfigError("algorithm.heuristic: " + std::string(err.what()));
      }
      r.wall_time_s = seconds_since(start);
      r.seed = e.seed;
      fill_report(r, inst, e, transmitted_jpta(inst, h.beamformer), {});
      r.report.metadata["degenerate_phases"] = std::to_string(h.degenerate_phases);
      r.jpta = std::move(h.beamformer);
      break;
    }
    case AlgorithmKind::kHbf: {
      HbfBeamformer h;
      try {
        h = design_hbf(a.structure, stack_target(inst.target), a.n_rf, hbf_options(e, a, inst));
      } catch (const std::invalid_argument& err) {
        throw ConfigError("algorithm.hbf: " + std::string(err.what()));
      }
      r.wall_time_s = seconds_since(start);
      r.seed = h.seed;
      r.iterations = static_cast<int>(h.residual_trace.size());
      fill_report(r, inst, e, h.analog * h.digital, h.residual_trace);
      r.report.metadata["n_rf"] = std::to_string(h.rf_chains);
      r.hbf = std::move(h);
      break;
    }
  }
  return r;
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& e, int jobs) {
  const std::string param = e.sweep ? sweep_parameter_name(e.sweep->parameter) : "";
  std::vector<double> values = e.sweep ? e.sweep->values : std::vector<double>{0.0};
  std::sort(values.begin(), values.end());
  if (e.sweep && e.sweep->parameter == SweepParameter::kNrf) {
    for (const AlgorithmBlock& a : e.algorithms) {
      if (a.kind != AlgorithmKind::kHbf || a.structure != HbfStructure::kPartiallyConnected) continue;
      for (double v : values) {
        if (e.system.M % static_cast<int>(v) != 0) {
          throw ConfigError("sweep.values: n_rf=" + std::to_string(static_cast<int>(v)) +
                            " does not divide M=" + std::to_string(e.system.M) + " (hbf pc)");
        }
      }
    }
  }
  // Validate every sweep point's instance before spending time on designs.
  for (double v : values) {
    make_instance(e.sweep ? with_value(e, e.sweep->parameter, v) : e);
  }

  // A task fills the records of one algorithm for a contiguous set of values.
  struct Task {
    size_t algorithm;
    std::vector<size_t> value_slots;
  };
  std::vector<Task> tasks;
  for (size_t ai = 0; ai < e.algorithms.size(); ++ai) {
    const AlgorithmBlock& a = e.algorithms[ai];
    const bool grouped =
        e.sweep && (!depends_on(a, e.sweep->parameter) ||
                    (e.sweep->parameter == SweepParameter::kMaxIter && a.discrete_set_file.empty()) ||
                    e.sweep->parameter == SweepParameter::kNrf);
    if (grouped) {
      Task t{ai, {}};
      for (size_t vi = 0; vi < values.size(); ++vi) t.value_slots.push_back(vi);
      tasks.push_back(std::move(t));
    } else {
      for (size_t vi = 0; vi < values.size(); ++vi) tasks.push_back({ai, {vi}});
    }
  }

  const size_t A = e.algorithms.size();
  std::vector<ResultRecord> slots(A * values.size());
  parallel_for(tasks.size(), jobs, [&](size_t ti) {
    const Task& task = tasks[ti];
    const AlgorithmBlock& a = e.algorithms[task.algorithm];
    auto put = [&](size_t vi, ResultRecord rec) { slots[vi * A + task.algorithm] = std::move(rec); };

    if (task.value_slots.size() == 1 || !e.sweep) {
      const size_t vi = task.value_slots.front();
      const ExperimentConfig c = e.sweep ? with_value(e, e.sweep->parameter, values[vi]) : e;
      const Instance inst = make_instance(c);
      put(vi, record_of(c, run_algorithm(inst, c, c.algorithms[task.algorithm]), param, values[vi]));
      return;
    }
    const SweepParameter p = e.sweep->parameter;
    if (!depends_on(a, p)) {
      // Independent of the swept value: one run, repeated as a flat reference.
      const ExperimentConfig c = with_value(e, p, values.front());
      const Instance inst = make_instance(c);
      const RunResult r = run_algorithm(inst, c, c.algorithms[task.algorithm]);
      for (size_t vi : task.value_slots) put(vi, record_of(c, r, param, values[vi]));
      return;
    }
    if (p == SweepParameter::kMaxIter) {
      // Iteration i of a longer run equals a run with max_iter = i.
      const Instance inst = make_instance(e);
      DesignOptions opts = design_options(e, a);
      opts.max_iter = static_cast<int>(values.back());
      std::map<int, size_t> wanted;
      for (size_t vi : task.value_slots) wanted[static_cast<int>(values[vi])] = vi;
      const auto start = std::chrono::steady_clock::now();
      std::vector<double> trace;
      auto emit = [&](int iter, const JptaBeamformer& bf, size_t vi) {
        RunResult r;
        r.algorithm = a.label();
        r.seed = a.init_seed.value_or(e.seed);
        r.iterations = iter;
        r.wall_time_s = seconds_since(start);
        fill_report(r, inst, e, transmitted_jpta(inst, bf), trace);
        put(vi, record_of(e, r, param, values[vi]));
      };
      JptaBeamformer last;
      int done = 0;
      opts.on_iteration = [&](int iter, const JptaBeamformer& bf) {
        trace.push_back(analog_objective(inst.target, bf, inst.config, inst.grid));
        done = iter;
        last = bf;
        auto it = wanted.find(iter);
        if (it != wanted.end()) emit(iter, bf, it->second);
      };
      design_jpta(inst.config, inst.grid, inst.target, opts);
      // Early convergence: larger budgets reproduce the final iterate.
      for (const auto& [iter, vi] : wanted) {
        if (iter > done) emit(done, last, vi);
      }
      return;
    }
    // n_rf: warm-started hybrid sweep in ascending chain count.
    const Instance inst = make_instance(e);
    const HbfOptions opts = hbf_options(e, a, inst);
    std::optional<HbfBeamformer> prev;
    for (size_t vi : task.value_slots) {
      const auto start = std::chrono::steady_clock::now();
      RunResult r;
      r.algorithm = a.label();
      HbfBeamformer h = sweep_step(a.structure, inst.target, static_cast<int>(values[vi]),
                                   prev ? &*prev : nullptr, vi, opts);
      r.wall_time_s = seconds_since(start);
      r.seed = h.seed;
      r.iterations = static_cast<int>(h.residual_trace.size());
      fill_report(r, inst, e, h.analog * h.digital, h.residual_trace);
      put(vi, record_of(e, r, param, values[vi]));
      prev = std::move(h);
    }
  });
  return slots;
}

std::vector<double> theta_grid(double step_deg) {
  std::vector<double> out;
  const int steps = static_cast<int>(std::floor(180.0 / step_deg + 1e-9));
  for (int i = 0; i <= steps; ++i) out.push_back((-90.0 + i * step_deg) * kDeg);
  if (std::abs(out.back() - 90.0 * kDeg) > 1e-12) out.push_back(90.0 * kDeg);
  return out;
}

Eigen::MatrixXd beam_gain_map(const Instance& inst, const Eigen::MatrixXcd& beams, const std::vector<double>& thetas) {
  return gain_map(inst.config, inst.grid, beams, thetas);
}

std::vector<std::string> preamble(const ExperimentConfig& e, const std::vector<std::string>& notes) {
  std::vector<std::string> lines;
  lines.push_back("experiment: " + e.name);
  for (const std::string& n : notes) lines.push_back(n);
  lines.push_back("config: " + echo(e));
  return lines;
}

DesignOutputs run_design(const ExperimentConfig& e, const std::vector<std::string>& notes) {
  if (e.algorithms.size() != 1) throw ConfigError("design: exactly one algorithm block required");
  if (e.sweep) throw ConfigError("design: config has a sweep block; use the sweep subcommand");
  const Instance inst = make_instance(e);
  DesignOutputs out;
  out.result = run_algorithm(inst, e, e.algorithms.front());
  ensure_dir(e.output.dir);
  const std::filesystem::path dir(e.output.dir);
  const std::string config_json = echo(e);

  if (out.result.hbf) {
    out.beamformer_path = (dir / "hbf_beamformer.txt").string();
    auto f = open_out(out.beamformer_path);
    write_hbf(f, config_json, *out.result.hbf);
  } else {
    out.beamformer_path = (dir / "beamformer.txt").string();
    auto f = open_out(out.beamformer_path);
    write_beamformer(f, config_json, *out.result.jpta);
  }
  FitReport report = out.result.report;
  if (e.output.timing) report.metadata["wall_time_s"] = std::to_string(out.result.wall_time_s);
  out.report_path = (dir / "fit_report.csv").string();
  {
    auto f = open_out(out.report_path);
    write_fit_report(f, preamble(e, notes), report, inst.grid.indices());
  }
  if (e.output.gain_map) {
    out.gain_map_path = (dir / "gain_map.csv").string();
    const std::vector<double> thetas = theta_grid(e.output.theta_step_deg);
    auto f = open_out(out.gain_map_path);
    write_gain_map(f, preamble(e, notes), inst.grid, beam_gain_map(inst, out.result.beams, thetas), thetas);
  }
  return out;
}

std::string write_sweep(const ExperimentConfig& e, const std::vector<ResultRecord>& records,
                        const std::string& file_name, const std::vector<std::string>& notes) {
  ensure_dir(e.output.dir);
  const std::string path = (std::filesystem::path(e.output.dir) / file_name).string();
  auto f = open_out(path);
  write_records(f, preamble(e, notes), records, e.output.timing);
  return path;
}

namespace {

// Effective unit-norm beams stored in a JPTA or hybrid beamformer file.
struct StoredDesign {
  ExperimentConfig config;
  Eigen::MatrixXcd beams;
};

StoredDesign load_stored(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open beamformer file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const bool hybrid = text.find("[analog_re_im]") != std::string::npos;
  std::istringstream stream(text);
  StoredDesign s;
  if (hybrid) {
    const HbfFile f = read_hbf(stream);
    s.config = config_from_echo(f.config_json, path);
    s.beams = normalize_columns(f.hbf.analog * f.hbf.digital);
  } else {
    const BeamformerFile f = read_beamformer(stream);
    s.config = config_from_echo(f.config_json, path);
    const Instance inst = make_instance(s.config);
    if (static_cast<int>(f.beamformer.delays.size()) != inst.config.num_ttds() ||
        static_cast<int>(f.beamformer.phases.size()) != inst.config.num_antennas() ||
        static_cast<int>(f.beamformer.alpha.size()) != inst.grid.size()) {
      throw FormatError(path + ": section sizes do not match the echoed config");
    }
    s.beams = effective_beam_set(inst.config, inst.grid, f.beamformer);
  }
  return s;
}

}  // namespace

double refit_beamformer_file(const std::string& path) {
  const StoredDesign s = load_stored(path);
  const Instance inst = make_instance(s.config);
  if (s.beams.rows() != inst.target.num_antennas() || s.beams.cols() != inst.target.num_subcarriers()) {
    throw FormatError(path + ": beamformer shape does not match the echoed config");
  }
  return fit_objective(inst.target, s.beams);
}

std::string gain_map_from_file(const std::string& beamformer_path, const std::string& out_path,
                               double theta_step_deg, bool ideal) {
  const StoredDesign s = load_stored(beamformer_path);
  const Instance inst = make_instance(s.config);
  const Eigen::MatrixXcd beams = ideal ? inst.target.directions() : s.beams;
  const std::vector<double> thetas = theta_grid(theta_step_deg);
  const auto parent = std::filesystem::path(out_path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  auto f = open_out(out_path);
  write_gain_map(f, preamble(s.config, {std::string("source: ") + (ideal ? "target of " : "") + beamformer_path}),
                 inst.grid, beam_gain_map(inst, beams, thetas), thetas);
  return out_path;
}

}  // namespace jpta::cli
