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

#ifndef JPTA_IO_HPP
#define JPTA_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jpta/array_model.hpp"
#include "jpta/hbf_baseline.hpp"
#include "jpta/metrics.hpp"

namespace jpta::cli {

// Plain-text beamformer file. Sections, in order:
//   [config]      one line: the fully resolved experiment config (JSON)
//   [delays_ns]   one delay per line, TTD order
//   [phases_rad]  one phase per line, antenna order
//   [alpha_re_im] "re,im" per line, ascending subcarrier index
// Numbers use 12 significant digits. Lines starting with '#' are comments.
struct BeamformerFile {
  std::string config_json;
  JptaBeamformer beamformer;
};

void write_beamformer(std::ostream& out, const std::string& config_json, const JptaBeamformer& bf);
BeamformerFile read_beamformer(std::istream& in);

// Hybrid baseline file: [config], [structure] ("fc"|"pc"), [analog_re_im]
// (M rows of N_RF "re,im" pairs) and [digital_re_im] (K rows of N_RF pairs,
// ascending subcarrier index).
struct HbfFile {
  std::string config_json;
  HbfBeamformer hbf;
};

void write_hbf(std::ostream& out, const std::string& config_json, const HbfBeamformer& hbf);
HbfFile read_hbf(std::istream& in);

// "record,key,value" rows: summary fields, one trace row per iteration and
// one match row per subcarrier index. Preceded by '#' comment lines.
void write_fit_report(std::ostream& out, const std::vector<std::string>& preamble,
                      const FitReport& report, const std::vector<int>& subcarrier_indices);
FitReport read_fit_report(std::istream& in);

// Header "k,f_hz,theta_deg,gain_linear,gain_db", row-major by k then theta.
// gains is K x T, thetas in radians.
void write_gain_map(std::ostream& out, const std::vector<std::string>& preamble,
                    const SubcarrierGrid& grid, const Eigen::MatrixXd& gains,
                    const std::vector<double>& thetas);

struct GainMapData {
  std::vector<int> k;
  std::vector<double> theta_deg;  // distinct angles, in file order
  Eigen::MatrixXd gain_linear;    // K x T
};
GainMapData read_gain_map(std::istream& in);

// One row of an aggregated sweep.
struct ResultRecord {
  std::string experiment;
  std::string algorithm;
  std::string parameter;  // empty for single designs
  double value = 0.0;
  double f_obj = 0.0;
  double f_tilde_obj = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::optional<double> wall_time_s;
};

// Header "experiment,algorithm,parameter,value,f_obj,f_tilde_obj,iterations,seed"
// plus ",wall_time_s" when with_timing.
void write_records(std::ostream& out, const std::vector<std::string>& preamble,
                   const std::vector<ResultRecord>& records, bool with_timing);
std::vector<ResultRecord> read_records(std::istream& in);

// Shortest text that reads back to the same double.
std::string format_exact(double x);

}  // namespace jpta::cli

#endif  // JPTA_IO_HPP
