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

#include "jpta/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "jpta/design.hpp"
#include "jpta/experiment.hpp"
#include "jpta/io.hpp"

namespace jpta::cli {

namespace {

const char* kFastWarning = "warning: --fast substitutes K=256 for K=2048; values are qualitative";

struct Writer {
  std::string dir;
  std::vector<std::string> notes;
  std::vector<std::string> written;

  std::ofstream open(const std::string& name) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    written.push_back(path);
    return out;
  }
};

Writer make_writer(const std::string& figure, const ReproduceOptions& o, const std::string& description) {
  Writer w;
  w.dir = (std::filesystem::path(o.out_dir) / figure).string();
  std::filesystem::create_directories(w.dir);
  w.notes.push_back("figure: " + figure);
  if (o.fast) w.notes.push_back(kFastWarning);
  std::ofstream meta = w.open("metadata.txt");
  meta << "figure: " << figure << "\n" << "preset: " << description << "\n";
  meta << "K: " << (o.fast ? 256 : 2048) << "\n" << "seed: " << o.seed << "\n";
  if (o.fast) meta << kFastWarning << "\n";
  return w;
}

AlgorithmBlock jpta_block(TtdUpdate variant) {
  AlgorithmBlock a;
  a.kind = AlgorithmKind::kJpta;
  a.variant = variant;
  return a;
}

AlgorithmBlock heuristic_block() {
  AlgorithmBlock a;
  a.kind = AlgorithmKind::kHeuristic;
  return a;
}

AlgorithmBlock hbf_block(HbfStructure s, int n_rf) {
  AlgorithmBlock a;
  a.kind = AlgorithmKind::kHbf;
  a.structure = s;
  a.n_rf = n_rf;
  return a;
}

void write_gain(Writer& w, const std::string& name, const ExperimentConfig& e, const Instance& inst,
                const Eigen::MatrixXcd& beams, const ReproduceOptions& o) {
  const std::vector<double> thetas = theta_grid(o.theta_step_deg);
  auto out = w.open(name);
  write_gain_map(out, preamble(e, w.notes), inst.grid, beam_gain_map(inst, beams, thetas), thetas);
}

void write_summary(Writer& w, const ExperimentConfig& e, const std::vector<ResultRecord>& rows) {
  auto out = w.open("summary.csv");
  write_records(out, preamble(e, w.notes), rows, e.output.timing);
}

ResultRecord summary_row(const std::string& experiment, const RunResult& r, bool timing) {
  ResultRecord rec;
  rec.experiment = experiment;
  rec.algorithm = r.algorithm;
  rec.f_obj = r.report.f_obj;
  rec.f_tilde_obj = r.report.f_tilde_obj;
  rec.iterations = r.iterations;
  rec.seed = r.seed;
  if (timing) rec.wall_time_s = r.wall_time_s;
  return rec;
}

std::vector<std::string> fig4(const ReproduceOptions& o) {
  Writer w = make_writer("fig4", o, "array gain of ideal and JPTA (line search, N=64, kappa=64) beams, behaviors 1 and 2");
  std::vector<ResultRecord> rows;
  std::vector<ExperimentConfig> cfgs{reference_experiment(1, o), reference_experiment(2, o)};
  std::vector<RunResult> results(2);
  parallel_for(2, o.jobs, [&](size_t b) {
    results[b] = run_algorithm(make_instance(cfgs[b]), cfgs[b], cfgs[b].algorithms.front());
  });
  for (size_t b = 0; b < 2; ++b) {
    const Instance inst = make_instance(cfgs[b]);
    const std::string tag = "b" + std::to_string(b + 1);
    write_gain(w, "gain_ideal_" + tag + ".csv", cfgs[b], inst, inst.target.directions(), o);
    write_gain(w, "gain_jpta_" + tag + ".csv", cfgs[b], inst, results[b].beams, o);
    rows.push_back(summary_row(cfgs[b].name, results[b], o.timing));
  }
  write_summary(w, cfgs[0], rows);
  return w.written;
}

std::vector<std::string> sweep_figure(const std::string& figure, const ReproduceOptions& o, SweepParameter p,
                                      std::vector<double> values, const std::string& description) {
  Writer w = make_writer(figure, o, description);
  for (int b = 1; b <= 2; ++b) {
    ExperimentConfig e = reference_experiment(b, o);
    e.name = figure + "_b" + std::to_string(b);
    e.algorithms = {jpta_block(TtdUpdate::kLineSearch), jpta_block(TtdUpdate::kWls), heuristic_block()};
    e.sweep = SweepBlock{p, values};
    const std::vector<ResultRecord> rows = run_sweep(e, o.jobs);
    auto out = w.open(e.name + ".csv");
    write_records(out, preamble(e, w.notes), rows, o.timing);
  }
  return w.written;
}

std::vector<std::string> fig7(const ReproduceOptions& o) {
  std::ostringstream desc;
  desc << o.convergence_draws << " draws per behavior; kappa ~ U[1,64], N ~ U{1,2,4,...,64}; behavior 1: "
       << "theta0 ~ U[-45,45] deg, delta_theta ~ U[0,90] deg; behavior 2: theta1, theta2 ~ U[-60,60] deg; "
       << "ratio F_obj(i)/F_obj(30), i=1..30";
  Writer w = make_writer("fig7", o, desc.str());
  constexpr int kIters = 30;
  const std::vector<int> n_choices{1, 2, 4, 8, 16, 32, 64};
  for (int b = 1; b <= 2; ++b) {
    ExperimentConfig base = reference_experiment(b, o);
    base.algorithms.front().max_iter = kIters;
    std::vector<ExperimentConfig> draws;
    std::mt19937_64 rng(o.seed * 1000003u + static_cast<std::uint64_t>(b));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d = 0; d < o.convergence_draws; ++d) {
      ExperimentConfig e = base;
      e.name = "fig7_b" + std::to_string(b) + "_draw" + std::to_string(d);
      e.system.kappa = 1.0 + 63.0 * u(rng);
      e.system.N = n_choices[std::min<size_t>(n_choices.size() - 1, static_cast<size_t>(u(rng) * n_choices.size()))];
      if (b == 1) {
        e.target.theta0_deg = -45.0 + 90.0 * u(rng);
        e.target.delta_theta_deg = 90.0 * u(rng);
      } else {
        e.target.theta1_deg = -60.0 + 120.0 * u(rng);
        e.target.theta2_deg = -60.0 + 120.0 * u(rng);
      }
      draws.push_back(std::move(e));
    }
    std::vector<std::vector<double>> f(draws.size());
    parallel_for(draws.size(), o.jobs, [&](size_t d) {
      const Instance inst = make_instance(draws[d]);
      DesignOptions opts;
      opts.max_iter = kIters;
      opts.on_iteration = [&](int, const JptaBeamformer& bf) {
        f[d].push_back(fit_objective(inst.target, effective_beam_set(inst.config, inst.grid, bf)));
      };
      design_jpta(inst.config, inst.grid, inst.target, opts);
    });

    const std::string tag = "b" + std::to_string(b);
    {
      auto out = w.open("fig7_" + tag + "_draws.csv");
      for (const std::string& line : preamble(base, w.notes)) out << "# " << line << "\n";
      out << "draw,kappa,N,angle1_deg,angle2_deg,iteration,f_obj\n";
      for (size_t d = 0; d < draws.size(); ++d) {
        const TargetBlock& t = draws[d].target;
        const double a1 = b == 1 ? t.theta0_deg : t.theta1_deg;
        const double a2 = b == 1 ? t.delta_theta_deg : t.theta2_deg;
        for (size_t i = 0; i < f[d].size(); ++i) {
          out << d << "," << format_exact(draws[d].system.kappa) << "," << draws[d].system.N << ","
              << format_exact(a1) << "," << format_exact(a2) << "," << (i + 1) << "," << format_exact(f[d][i]) << "\n";
        }
      }
    }
    auto out = w.open("fig7_" + tag + ".csv");
    for (const std::string& line : preamble(base, w.notes)) out << "# " << line << "\n";
    out << "iteration,mean,p10,p90\n";
    for (int i = 0; i < kIters; ++i) {
      std::vector<double> ratios;
      for (const auto& series : f) {
        if (series.back() > 0.0) ratios.push_back(series[static_cast<size_t>(i)] / series.back());
      }
      double mean = 0.0;
      for (double r : ratios) mean += r;
      mean /= static_cast<double>(std::max<size_t>(1, ratios.size()));
      out << (i + 1) << "," << format_exact(mean) << "," << format_exact(percentile(ratios, 10.0)) << ","
          << format_exact(percentile(ratios, 90.0)) << "\n";
    }
  }
  return w.written;
}

std::vector<std::string> fig8(const ReproduceOptions& o) {
  Writer w = make_writer("fig8", o,
                         "F_obj vs RF chains for HBF-FC (PE-AltMin) and HBF-PC against JPTA (1 RF chain, N=64); "
                         "scenarios b1a (30, 45), b1b (0, 120), b2 (-45, 30) deg");
  struct Scenario {
    std::string tag;
    int behavior;
    double a1, a2;
  };
  const std::vector<Scenario> scenarios{{"b1a", 1, 30.0, 45.0}, {"b1b", 1, 0.0, 120.0}, {"b2", 2, -45.0, 30.0}};
  const std::vector<double> fc_chains{1, 2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24, 26, 28, 30, 32, 40, 48, 56, 64};
  const std::vector<double> pc_chains{1, 2, 4, 8, 16, 32, 64};

  auto cross = w.open("crossover.csv");
  std::vector<std::string> cross_lines;
  for (const Scenario& s : scenarios) {
    ExperimentConfig e = reference_experiment(s.behavior, o);
    e.name = "fig8_" + s.tag;
    if (s.behavior == 1) {
      e.target.theta0_deg = s.a1;
      e.target.delta_theta_deg = s.a2;
    } else {
      e.target.theta1_deg = s.a1;
      e.target.theta2_deg = s.a2;
    }
    ExperimentConfig fc = e;
    fc.algorithms = {hbf_block(HbfStructure::kFullyConnected, 1), jpta_block(TtdUpdate::kLineSearch)};
    fc.sweep = SweepBlock{SweepParameter::kNrf, fc_chains};
    ExperimentConfig pc = e;
    pc.algorithms = {hbf_block(HbfStructure::kPartiallyConnected, 1)};
    pc.sweep = SweepBlock{SweepParameter::kNrf, pc_chains};

    std::vector<ResultRecord> rows = run_sweep(fc, o.jobs);
    const std::vector<ResultRecord> pc_rows = run_sweep(pc, o.jobs);
    double reference = 0.0;
    std::vector<int> fc_n, pc_n;
    std::vector<double> fc_f, pc_f;
    for (const ResultRecord& r : rows) {
      if (r.algorithm == "jpta-ls") reference = r.f_obj;
      if (r.algorithm == "hbf-fc") {
        fc_n.push_back(static_cast<int>(r.value));
        fc_f.push_back(r.f_obj);
      }
    }
    for (const ResultRecord& r : pc_rows) {
      pc_n.push_back(static_cast<int>(r.value));
      pc_f.push_back(r.f_obj);
    }
    rows.insert(rows.end(), pc_rows.begin(), pc_rows.end());
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRecord& a, const ResultRecord& b) { return a.value < b.value; });
    auto out = w.open(e.name + ".csv");
    write_records(out, preamble(fc, w.notes), rows, o.timing);
    cross_lines.push_back(s.tag + ",hbf-fc," + format_exact(reference) + "," +
                          std::to_string(crossover_chains(fc_n, fc_f, reference)));
    cross_lines.push_back(s.tag + ",hbf-pc," + format_exact(reference) + "," +
                          std::to_string(crossover_chains(pc_n, pc_f, reference)));
  }
  for (const std::string& n : w.notes) cross << "# " << n << "\n";
  cross << "# min_chains: smallest swept chain count with F_obj >= the JPTA reference (0: none)\n";
  cross << "scenario,structure,jpta_reference_f_obj,min_chains\n";
  for (const std::string& line : cross_lines) cross << line << "\n";
  return w.written;
}

std::vector<std::string> fig9(const ReproduceOptions& o) {
  Writer w = make_writer("fig9", o, "array gain of HBF-FC (N_RF=22 behavior 1, N_RF=2 behavior 2) and HBF-PC (N_RF=32, both)");
  struct Case {
    std::string name;
    int behavior;
    HbfStructure structure;
    int n_rf;
  };
  const std::vector<Case> cases{{"gain_hbf_fc22_b1.csv", 1, HbfStructure::kFullyConnected, 22},
                                {"gain_hbf_fc2_b2.csv", 2, HbfStructure::kFullyConnected, 2},
                                {"gain_hbf_pc32_b1.csv", 1, HbfStructure::kPartiallyConnected, 32},
                                {"gain_hbf_pc32_b2.csv", 2, HbfStructure::kPartiallyConnected, 32}};
  std::vector<ExperimentConfig> cfgs;
  for (const Case& c : cases) {
    ExperimentConfig e = reference_experiment(c.behavior, o);
    e.name = "fig9_" + c.name.substr(5, c.name.size() - 9);
    e.algorithms = {hbf_block(c.structure, c.n_rf)};
    cfgs.push_back(std::move(e));
  }
  std::vector<RunResult> results(cases.size());
  parallel_for(cases.size(), o.jobs, [&](size_t i) {
    results[i] = run_algorithm(make_instance(cfgs[i]), cfgs[i], cfgs[i].algorithms.front());
  });
  std::vector<ResultRecord> rows;
  for (size_t i = 0; i < cases.size(); ++i) {
    write_gain(w, cases[i].name, cfgs[i], make_instance(cfgs[i]), results[i].beams, o);
    ResultRecord r = summary_row(cfgs[i].name, results[i], o.timing);
    r.parameter = "n_rf";
    r.value = cases[i].n_rf;
    rows.push_back(r);
  }
  write_summary(w, cfgs[0], rows);
  return w.written;
}

std::vector<std::string> fig11(const ReproduceOptions& o) {
  Writer w = make_writer("fig11", o,
                         "behavior 3: three equal bands steered to -45, 0, 30 deg; JPTA line search, N=64, kappa=64. "
                         "Frequency-dependent beamwidth (behavior 4) has no closed-form target: supply it as a "
                         "custom target file to the design subcommand");
  ExperimentConfig e = reference_experiment(1, o);
  e.name = "fig11_b3";
  e.target = TargetBlock{};
  e.target.kind = TargetKind::kBehavior3;
  e.target.angles_deg = {-45.0, 0.0, 30.0};
  const Instance inst = make_instance(e);
  const RunResult r = run_algorithm(inst, e, e.algorithms.front());
  write_gain(w, "gain_ideal_b3.csv", e, inst, inst.target.directions(), o);
  write_gain(w, "gain_jpta_b3.csv", e, inst, r.beams, o);
  write_summary(w, e, {summary_row(e.name, r, o.timing)});
  return w.written;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig11"};
  return ids;
}

ExperimentConfig reference_experiment(int behavior, const ReproduceOptions& o) {
  ExperimentConfig e;
  e.name = "reference_b" + std::to_string(behavior);
  e.seed = o.seed;
  e.system.K = o.fast ? 256 : 2048;
  e.target.kind = behavior == 1 ? TargetKind::kBehavior1 : TargetKind::kBehavior2;
  e.algorithms = {jpta_block(TtdUpdate::kLineSearch)};
  e.output.dir = o.out_dir;
  e.output.timing = o.timing;
  e.output.theta_step_deg = o.theta_step_deg;
  return e;
}

std::vector<std::string> reproduce(const std::string& figure, const ReproduceOptions& o) {
  if (figure == "fig4") return fig4(o);
  if (figure == "fig5") {
    return sweep_figure("fig5", o, SweepParameter::kN, {1, 2, 4, 8, 16, 32, 64},
                        "F_obj vs number of TTDs N, kappa=64; line search, wLS and closed-form heuristic");
  }
  if (figure == "fig6") {
    return sweep_figure("fig6", o, SweepParameter::kKappa,
                        {0, 1, 2, 3, 4, 6, 8, 12, 16, 20, 24, 28, 32, 40, 48, 56, 64},
                        "F_obj vs TTD range kappa, N=64; line search, wLS and closed-form heuristic");
  }
  if (figure == "fig7") return fig7(o);
  if (figure == "fig8") return fig8(o);
  if (figure == "fig9") return fig9(o);
  if (figure == "fig11") return fig11(o);
  std::string known;
  for (const std::string& id : figure_ids()) known += (known.empty() ? "" : ", ") + id;
  throw ConfigError("unknown figure id \"" + figure + "\" (known: " + known + ")");
}

int crossover_chains(const std::vector<int>& chains, const std::vector<double>& f_obj, double reference) {
  for (size_t i = 0; i < chains.size(); ++i) {
    if (f_obj[i] >= reference) return chains[i];
  }
  return 0;
}

double percentile(std::vector<double> data, double q) {
  if (data.empty()) return std::nan("");
  std::sort(data.begin(), data.end());
  const double pos = q / 100.0 * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, data.size() - 1);
  return data[lo] + (pos - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

}  // namespace jpta::cli
