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

#include "jpta/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "jpta/errors.hpp"

namespace jpta::cli {

namespace {

std::string g12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

double to_double(const std::string& s, const std::string& where) {
  double x = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) throw FormatError(where + ": \"" + s + "\" is not a number");
  return x;
}

cdouble to_complex(const std::string& s, const std::string& where) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw FormatError(where + ": expected \"re,im\", got \"" + s + "\"");
  return {to_double(s.substr(0, comma), where), to_double(s.substr(comma + 1), where)};
}

std::uint64_t to_seed(const std::string& s, const std::string& where) {
  std::uint64_t x = 0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) throw FormatError(where + ": \"" + s + "\" is not a seed");
  return x;
}

std::string complex_text(cdouble z) { return g12(z.real()) + "," + g12(z.imag()); }

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Section name -> nonblank, non-comment lines, with the line number of each.
struct Sections {
  std::map<std::string, std::vector<std::pair<int, std::string>>> body;
  std::vector<std::string> order;
};

Sections read_sections(std::istream& in, const std::string& kind) {
  Sections s;
  std::string line;
  std::string current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = strip(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = t.substr(1, t.size() - 2);
      if (s.body.count(current)) throw FormatError(kind + " line " + std::to_string(n) + ": duplicate section [" + current + "]");
      s.body[current];
      s.order.push_back(current);
      continue;
    }
    if (current.empty()) throw FormatError(kind + " line " + std::to_string(n) + ": data before the first section");
    s.body[current].emplace_back(n, t);
  }
  return s;
}

const std::vector<std::pair<int, std::string>>& section(const Sections& s, const std::string& name,
                                                        const std::string& kind) {
  auto it = s.body.find(name);
  if (it == s.body.end()) throw FormatError(kind + ": missing section [" + name + "]");
  return it->second;
}

std::string where(const std::string& kind, int line) { return kind + " line " + std::to_string(line); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) out.push_back(part);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

void write_preamble(std::ostream& out, const std::vector<std::string>& preamble) {
  for (const std::string& line : preamble) out << "# " << line << "\n";
}

}  // namespace

std::string format_exact(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : g12(x);
}

void write_beamformer(std::ostream& out, const std::string& config_json, const JptaBeamformer& bf) {
  out << "# JPTA beamformer: delays, phase shifts and per-subcarrier digital weights\n";
  out << "[config]\n" << config_json << "\n";
  out << "[delays_ns]\n";
  for (double tau : bf.delays) out << g12(tau * 1e9) << "\n";
  out << "[phases_rad]\n";
  for (double phi : bf.phases) out << g12(phi) << "\n";
  out << "[alpha_re_im]\n";
  for (cdouble a : bf.alpha) out << complex_text(a) << "\n";
}

BeamformerFile read_beamformer(std::istream& in) {
  const std::string kind = "beamformer file";
  const Sections s = read_sections(in, kind);
  BeamformerFile f;
  const auto& config = section(s, "config", kind);
  if (config.size() != 1) throw FormatError(kind + ": [config] must hold exactly one line");
  f.config_json = config.front().second;
  for (const auto& [n, t] : section(s, "delays_ns", kind)) f.beamformer.delays.push_back(to_double(t, where(kind, n)) * 1e-9);
  for (const auto& [n, t] : section(s, "phases_rad", kind)) f.beamformer.phases.push_back(to_double(t, where(kind, n)));
  for (const auto& [n, t] : section(s, "alpha_re_im", kind)) f.beamformer.alpha.push_back(to_complex(t, where(kind, n)));
  return f;
}

void write_hbf(std::ostream& out, const std::string& config_json, const HbfBeamformer& hbf) {
  out << "# hybrid beamformer: analog matrix F_RF and digital matrix F_BB\n";
  out << "[config]\n" << config_json << "\n";
  out << "[structure]\n" << (hbf.structure == HbfStructure::kFullyConnected ? "fc" : "pc") << "\n";
  out << "[seed]\n" << hbf.seed << "\n";
  out << "[analog_re_im]\n";
  for (Eigen::Index r = 0; r < hbf.analog.rows(); ++r) {
    for (Eigen::Index c = 0; c < hbf.analog.cols(); ++c) out << (c ? " " : "") << complex_text(hbf.analog(r, c));
    out << "\n";
  }
  out << "[digital_re_im]\n";
  for (Eigen::Index k = 0; k < hbf.digital.cols(); ++k) {
    for (Eigen::Index c = 0; c < hbf.digital.rows(); ++c) out << (c ? " " : "") << complex_text(hbf.digital(c, k));
    out << "\n";
  }
}

HbfFile read_hbf(std::istream& in) {
  const std::string kind = "hbf file";
  const Sections s = read_sections(in, kind);
  HbfFile f;
  const auto& config = section(s, "config", kind);
  if (config.size() != 1) throw FormatError(kind + ": [config] must hold exactly one line");
  f.config_json = config.front().second;
  const auto& st = section(s, "structure", kind);
  if (st.size() != 1 || (st[0].second != "fc" && st[0].second != "pc")) {
    throw FormatError(kind + ": [structure] must be fc or pc");
  }
  f.hbf.structure = st[0].second == "fc" ? HbfStructure::kFullyConnected : HbfStructure::kPartiallyConnected;
  if (s.body.count("seed") && !s.body.at("seed").empty()) {
    f.hbf.seed = to_seed(s.body.at("seed")[0].second, kind);
  }
  auto matrix = [&](const std::string& name) {
    const auto& rows = section(s, name, kind);
    std::vector<std::vector<cdouble>> values;
    for (const auto& [n, t] : rows) {
      std::vector<cdouble> row;
      std::istringstream words(t);
      std::string w;
      while (words >> w) row.push_back(to_complex(w, where(kind, n)));
      if (!values.empty() && row.size() != values.front().size()) {
        throw FormatError(where(kind, n) + ": ragged row in [" + name + "]");
      }
      values.push_back(std::move(row));
    }
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(values.size()),
                       values.empty() ? 0 : static_cast<Eigen::Index>(values.front().size()));
    for (size_t r = 0; r < values.size(); ++r) {
      for (size_t c = 0; c < values[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r][c];
    }
    return m;
  };
  f.hbf.analog = matrix("analog_re_im");
  f.hbf.digital = matrix("digital_re_im").transpose();
  if (f.hbf.analog.cols() != f.hbf.digital.rows()) {
    throw FormatError(kind + ": analog and digital matrices disagree on the RF chain count");
  }
  f.hbf.rf_chains = static_cast<int>(f.hbf.analog.cols());
  return f;
}

void write_fit_report(std::ostream& out, const std::vector<std::string>& preamble,
                      const FitReport& report, const std::vector<int>& subcarrier_indices) {
  write_preamble(out, preamble);
  out << "record,key,value\n";
  for (const auto& [key, value] : report.metadata) out << "meta," << key << "," << value << "\n";
  out << "summary,f_obj," << format_exact(report.f_obj) << "\n";
  out << "summary,f_tilde_obj," << format_exact(report.f_tilde_obj) << "\n";
  out << "summary,iterations," << report.convergence_trace.size() << "\n";
  for (size_t i = 0; i < report.convergence_trace.size(); ++i) {
    out << "trace," << (i + 1) << "," << format_exact(report.convergence_trace[i]) << "\n";
  }
  for (size_t p = 0; p < report.per_subcarrier_match.size(); ++p) {
    out << "match," << subcarrier_indices.at(p) << "," << format_exact(report.per_subcarrier_match[p]) << "\n";
  }
}

FitReport read_fit_report(std::istream& in) {
  FitReport report;
  std::string line;
  int n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++n;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "record,key,value") throw FormatError("fit report line " + std::to_string(n) + ": bad header");
      header = true;
      continue;
    }
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw FormatError("fit report line " + std::to_string(n) + ": expected three fields");
    }
    const std::string record = line.substr(0, first);
    const std::string key = line.substr(first + 1, second - first - 1);
    const std::string value = line.substr(second + 1);
    const std::string at = "fit report line " + std::to_string(n);
    if (record == "meta") {
      report.metadata[key] = value;
    } else if (record == "summary" && key == "f_obj") {
      report.f_obj = to_double(value, at);
    } else if (record == "summary" && key == "f_tilde_obj") {
      report.f_tilde_obj = to_double(value, at);
    } else if (record == "trace") {
      report.convergence_trace.push_back(to_double(value, at));
    } else if (record == "match") {
      report.per_subcarrier_match.push_back(to_double(value, at));
    }
  }
  if (!header) throw FormatError("fit report: empty file");
  return report;
}

void write_gain_map(std::ostream& out, const std::vector<std::string>& preamble,
                    const SubcarrierGrid& grid, const Eigen::MatrixXd& gains,
                    const std::vector<double>& thetas) {
  write_preamble(out, preamble);
  out << "k,f_hz,theta_deg,gain_linear,gain_db\n";
  for (int p = 0; p < grid.size(); ++p) {
    const std::string head = std::to_string(grid.indices()[static_cast<size_t>(p)]) + "," + g12(grid.frequency_at(p)) + ",";
    for (size_t t = 0; t < thetas.size(); ++t) {
      const double g = gains(p, static_cast<Eigen::Index>(t));
      out << head << g12(thetas[t] * 180.0 / kPi) << "," << g12(g) << "," << g12(gain_to_db(g)) << "\n";
    }
  }
}

GainMapData read_gain_map(std::istream& in) {
  std::string line;
  bool header = false;
  std::vector<std::vector<double>> rows;
  GainMapData data;
  std::map<double, size_t> theta_pos;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "k,f_hz,theta_deg,gain_linear,gain_db") throw FormatError("gain map: bad header");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 5) throw FormatError("gain map line " + std::to_string(n) + ": expected five fields");
    const std::string at = "gain map line " + std::to_string(n);
    const int k = static_cast<int>(to_double(f[0], at));
    const double theta = to_double(f[2], at);
    if (data.k.empty() || data.k.back() != k) {
      data.k.push_back(k);
      rows.emplace_back();
    }
    if (!theta_pos.count(theta)) {
      theta_pos[theta] = data.theta_deg.size();
      data.theta_deg.push_back(theta);
    }
    rows.back().push_back(to_double(f[3], at));
  }
  data.gain_linear.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.theta_deg.size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != data.theta_deg.size()) throw FormatError("gain map: rows differ in angle count");
    for (size_t t = 0; t < rows[r].size(); ++t) data.gain_linear(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = rows[r][t];
  }
  return data;
}

void write_records(std::ostream& out, const std::vector<std::string>& preamble,
                   const std::vector<ResultRecord>& records, bool with_timing) {
  write_preamble(out, preamble);
  out << "experiment,algorithm,parameter,value,f_obj,f_tilde_obj,iterations,seed";
  if (with_timing) out << ",wall_time_s";
  out << "\n";
  for (const ResultRecord& r : records) {
    out << r.experiment << "," << r.algorithm << "," << r.parameter << "," << format_exact(r.value) << ","
        << format_exact(r.f_obj) << "," << format_exact(r.f_tilde_obj) << "," << r.iterations << "," << r.seed;
    if (with_timing) out << "," << (r.wall_time_s ? g12(*r.wall_time_s) : "");
    out << "\n";
  }
}

std::vector<ResultRecord> read_records(std::istream& in) {
  std::vector<ResultRecord> out;
  std::string line;
  bool header = false;
  bool timing = false;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      timing = line.find("wall_time_s") != std::string::npos;
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    const std::string at = "sweep csv line " + std::to_string(n);
    if (f.size() != (timing ? 9u : 8u)) throw FormatError(at + ": wrong field count");
    ResultRecord r;
    r.experiment = f[0];
    r.algorithm = f[1];
    r.parameter = f[2];
    r.value = to_double(f[3], at);
    r.f_obj = to_double(f[4], at);
    r.f_tilde_obj = to_double(f[5], at);
    r.iterations = static_cast<int>(to_double(f[6], at));
    r.seed = to_seed(f[7], at);
    if (timing && !f[8].empty()) r.wall_time_s = to_double(f[8], at);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace jpta::cli
