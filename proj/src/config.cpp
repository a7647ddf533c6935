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

#include "jpta/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace jpta::cli {

using nlohmann::json;

namespace {

// Line of every value in the raw text, keyed by JSON pointer ("/target/theta1_deg").
// Only used to anchor error messages; syntax errors are left to the parser.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : text_(text) {
    skip();
    value("");
  }

  int line_of(const std::string& pointer) const {
    std::string p = pointer;
    while (true) {
      auto it = lines_.find(p);
      if (it != lines_.end()) return it->second;
      const auto slash = p.rfind('/');
      if (slash == std::string::npos || p.empty()) return 0;
      p = p.substr(0, slash);
    }
  }

 private:
  void advance() {
    if (pos_ < text_.size() && text_[pos_] == '\n') ++line_;
    ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        advance();
        advance();
        while (!at_end() && !(peek() == '*' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) advance();
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string string_token() {
    std::string out;
    advance();  // opening quote
    while (!at_end() && peek() != '"') {
      if (peek() == '\\') {
        advance();
        if (!at_end()) out += peek();
      } else {
        out += peek();
      }
      advance();
    }
    advance();
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out += c;
      }
    }
    return out;
  }

  void value(const std::string& path) {
    if (at_end() || ++depth_ > 256) return;
    lines_.emplace(path, line_);
    const char c = peek();
    if (c == '{') {
      advance();
      skip();
      while (!at_end() && peek() != '}') {
        if (peek() != '"') return;
        const std::string key = string_token();
        skip();
        if (peek() != ':') return;
        advance();
        skip();
        value(path + "/" + escape(key));
        skip();
        if (peek() == ',') {
          advance();
          skip();
        }
      }
      advance();
    } else if (c == '[') {
      advance();
      skip();
      int i = 0;
      while (!at_end() && peek() != ']') {
        value(path + "/" + std::to_string(i++));
        skip();
        if (peek() == ',') {
          advance();
          skip();
        }
      }
      advance();
    } else if (c == '"') {
      string_token();
    } else {
      while (!at_end() && std::string(",]} \t\r\n/").find(peek()) == std::string::npos) advance();
    }
    --depth_;
  }

  const std::string& text_;
  size_t pos_ = 0;
  int line_ = 1;
  int depth_ = 0;
  std::map<std::string, int> lines_;
};

// Walks the parsed document and raises errors anchored at the offending field.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : index_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    std::ostringstream os;
    os << source_;
    const int line = index_.line_of(pointer);
    if (line > 0) os << ":" << line;
    os << ": " << field_name(pointer) << ": " << message;
    throw ConfigError(os.str());
  }

  // "/algorithms/0/jpta/max_iter" -> "algorithms[0].jpta.max_iter".
  static std::string field_name(const std::string& pointer) {
    if (pointer.empty()) return "<root>";
    std::string out;
    std::istringstream in(pointer.substr(1));
    std::string part;
    while (std::getline(in, part, '/')) {
      if (!part.empty() && std::all_of(part.begin(), part.end(), ::isdigit)) {
        out += "[" + part + "]";
      } else {
        out += (out.empty() ? "" : ".") + part;
      }
    }
    return out;
  }

  void only_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(ptr, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [key, _] : obj.items()) {
      if (!allowed.count(key)) fail(ptr + "/" + key, "unknown key");
    }
  }

  double number(const json& v, const std::string& ptr) const {
    if (!v.is_number()) fail(ptr, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ptr, "must be finite");
    return x;
  }

  double positive(const json& v, const std::string& ptr) const {
    const double x = number(v, ptr);
    if (!(x > 0.0)) fail(ptr, "must be positive");
    return x;
  }

  int integer(const json& v, const std::string& ptr, int lo, int hi = 1 << 30) const {
    if (!v.is_number_integer()) fail(ptr, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi) {
      fail(ptr, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(x));
    }
    return static_cast<int>(x);
  }

  std::uint64_t seed(const json& v, const std::string& ptr) const {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(ptr, "expected a nonnegative integer seed");
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::string& ptr) const {
    if (!v.is_boolean()) fail(ptr, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& ptr) const {
    if (!v.is_string()) fail(ptr, "expected a string");
    return v.get<std::string>();
  }

  double angle(const json& v, const std::string& ptr) const {
    try {
      return parse_angle_deg(v, "");
    } catch (const ConfigError& e) {
      fail(ptr, e.what());
    }
  }

 private:
  LineIndex index_;
  std::string source_;
};

WeightScheme parse_weights(const Reader& r, const json& v, const std::string& ptr) {
  const std::string s = r.string(v, ptr);
  if (s == "uniform") return WeightScheme::kUniform;
  if (s == "power") return WeightScheme::kPower;
  if (s == "saturating") return WeightScheme::kSaturating;
  r.fail(ptr, "expected \"uniform\", \"power\" or \"saturating\", got \"" + s + "\"");
}

const char* weights_name(WeightScheme w) {
  switch (w) {
    case WeightScheme::kPower:
      return "power";
    case WeightScheme::kSaturating:
      return "saturating";
    default:
      return "uniform";
  }
}

SystemBlock parse_system(const Reader& r, const json& j, const std::string& ptr) {
  r.only_keys(j, ptr, {"M", "N", "f0_ghz", "W_ghz", "K", "kappa", "p_sum"});
  SystemBlock s;
  if (j.contains("M")) s.M = r.integer(j["M"], ptr + "/M", 1, 1 << 16);
  if (j.contains("N")) s.N = r.integer(j["N"], ptr + "/N", 1, 1 << 16);
  if (j.contains("f0_ghz")) s.f0_ghz = r.positive(j["f0_ghz"], ptr + "/f0_ghz");
  if (j.contains("W_ghz")) s.W_ghz = r.positive(j["W_ghz"], ptr + "/W_ghz");
  if (j.contains("K")) s.K = r.integer(j["K"], ptr + "/K", 1, 1 << 20);
  if (j.contains("kappa")) {
    s.kappa = r.number(j["kappa"], ptr + "/kappa");
    if (s.kappa < 0.0) r.fail(ptr + "/kappa", "must be nonnegative");
  }
  if (j.contains("p_sum")) s.p_sum = r.positive(j["p_sum"], ptr + "/p_sum");
  if (s.N > s.M) r.fail(ptr + "/N", "more TTDs than antennas");
  if (s.M % s.N != 0) r.fail(ptr + "/N", "must divide M=" + std::to_string(s.M));
  if (!(s.W_ghz < 2.0 * s.f0_ghz)) r.fail(ptr + "/W_ghz", "band reaches zero frequency (need W < 2 f0)");
  return s;
}

TargetBlock parse_target(const Reader& r, const json& j, const std::string& ptr, const SystemBlock& sys) {
  r.only_keys(j, ptr, {"behavior", "theta0_deg", "delta_theta_deg", "theta1_deg", "theta2_deg",
                       "band_edges", "angles_deg", "file", "rescale", "weights"});
  TargetBlock t;
  if (!j.contains("behavior")) r.fail(ptr, "missing \"behavior\" (1, 2, 3 or \"custom\")");
  const json& b = j["behavior"];
  if (b.is_string() && b.get<std::string>() == "custom") {
    t.kind = TargetKind::kCustom;
  } else if (b.is_number_integer() && b.get<int>() >= 1 && b.get<int>() <= 3) {
    t.kind = static_cast<TargetKind>(b.get<int>() - 1);
  } else {
    r.fail(ptr + "/behavior", "expected 1, 2, 3 or \"custom\"");
  }
  if (j.contains("theta0_deg")) t.theta0_deg = r.angle(j["theta0_deg"], ptr + "/theta0_deg");
  if (j.contains("delta_theta_deg")) {
    const std::string p = ptr + "/delta_theta_deg";
    if (j["delta_theta_deg"].is_string()) {
      t.delta_theta_deg = r.angle(j["delta_theta_deg"], p);
    } else {
      t.delta_theta_deg = r.number(j["delta_theta_deg"], p);
    }
    if (std::abs(t.delta_theta_deg) > 180.0) r.fail(p, "sweep width must lie in [-180, 180] deg");
  }
  if (j.contains("theta1_deg")) t.theta1_deg = r.angle(j["theta1_deg"], ptr + "/theta1_deg");
  if (j.contains("theta2_deg")) t.theta2_deg = r.angle(j["theta2_deg"], ptr + "/theta2_deg");
  if (t.kind == TargetKind::kBehavior1 &&
      std::abs(t.theta0_deg) + std::abs(t.delta_theta_deg) / 2.0 > 90.0 + 1e-9) {
    r.fail(ptr + "/delta_theta_deg", "sweep theta0 +- delta_theta/2 leaves [-90, 90] deg");
  }
  if (j.contains("angles_deg")) {
    const json& a = j["angles_deg"];
    if (!a.is_array() || a.empty()) r.fail(ptr + "/angles_deg", "expected a nonempty list of angles");
    for (size_t i = 0; i < a.size(); ++i) {
      t.angles_deg.push_back(r.angle(a[i], ptr + "/angles_deg/" + std::to_string(i)));
    }
  }
  if (j.contains("band_edges")) {
    const json& e = j["band_edges"];
    if (!e.is_array()) r.fail(ptr + "/band_edges", "expected a list of subcarrier indices");
    for (size_t i = 0; i < e.size(); ++i) {
      t.band_edges.push_back(r.integer(e[i], ptr + "/band_edges/" + std::to_string(i), -(1 << 20)));
    }
  }
  if (t.kind == TargetKind::kBehavior3) {
    if (t.angles_deg.empty()) r.fail(ptr + "/angles_deg", "behavior 3 needs angles_deg");
    if (!t.band_edges.empty() && t.band_edges.size() + 1 != t.angles_deg.size()) {
      r.fail(ptr + "/band_edges", "needs one entry fewer than angles_deg");
    }
    if (t.band_edges.empty() && static_cast<int>(t.angles_deg.size()) > sys.K) {
      r.fail(ptr + "/angles_deg", "more bands than subcarriers");
    }
  }
  if (j.contains("file")) t.file = r.string(j["file"], ptr + "/file");
  if (t.kind == TargetKind::kCustom && t.file.empty()) r.fail(ptr + "/file", "custom target needs a file");
  if (j.contains("rescale")) t.rescale = r.boolean(j["rescale"], ptr + "/rescale");
  if (j.contains("weights")) t.weights = parse_weights(r, j["weights"], ptr + "/weights");
  return t;
}

AlgorithmBlock parse_algorithm(const Reader& r, const json& j, const std::string& ptr) {
  if (!j.is_object()) r.fail(ptr, "expected an object with one of \"jpta\", \"heuristic\", \"hbf\"");
  if (j.size() != 1) r.fail(ptr, "exactly one of \"jpta\", \"heuristic\", \"hbf\" per entry");
  AlgorithmBlock a;
  const std::string kind = j.begin().key();
  const json& b = j.begin().value();
  const std::string p = ptr + "/" + kind;
  if (kind == "jpta") {
    a.kind = AlgorithmKind::kJpta;
    r.only_keys(b, p, {"variant", "max_iter", "grid", "discrete_set_file", "nonnegative", "epsilon", "init_seed"});
    if (b.contains("variant")) {
      const std::string v = r.string(b["variant"], p + "/variant");
      if (v == "line_search") {
        a.variant = TtdUpdate::kLineSearch;
      } else if (v == "wls") {
        a.variant = TtdUpdate::kWls;
      } else {
        r.fail(p + "/variant", "expected \"line_search\" or \"wls\", got \"" + v + "\"");
      }
    }
    if (b.contains("max_iter")) a.max_iter = r.integer(b["max_iter"], p + "/max_iter", 1, 100000);
    if (b.contains("grid")) a.grid = r.integer(b["grid"], p + "/grid", 2, 1 << 24);
    if (b.contains("discrete_set_file")) a.discrete_set_file = r.string(b["discrete_set_file"], p + "/discrete_set_file");
    if (b.contains("nonnegative")) a.nonnegative = r.boolean(b["nonnegative"], p + "/nonnegative");
    if (b.contains("epsilon")) a.epsilon = r.positive(b["epsilon"], p + "/epsilon");
    if (b.contains("init_seed")) a.init_seed = r.seed(b["init_seed"], p + "/init_seed");
  } else if (kind == "heuristic") {
    a.kind = AlgorithmKind::kHeuristic;
    r.only_keys(b, p, {"strict_verbatim"});
    if (b.contains("strict_verbatim")) a.strict_verbatim = r.boolean(b["strict_verbatim"], p + "/strict_verbatim");
  } else if (kind == "hbf") {
    a.kind = AlgorithmKind::kHbf;
    r.only_keys(b, p, {"structure", "n_rf", "iters", "seed", "restarts"});
    if (b.contains("structure")) {
      const std::string s = r.string(b["structure"], p + "/structure");
      if (s == "fc" || s == "fully_connected") {
        a.structure = HbfStructure::kFullyConnected;
      } else if (s == "pc" || s == "partially_connected") {
        a.structure = HbfStructure::kPartiallyConnected;
      } else {
        r.fail(p + "/structure", "expected \"fc\" or \"pc\", got \"" + s + "\"");
      }
    }
    if (b.contains("n_rf")) a.n_rf = r.integer(b["n_rf"], p + "/n_rf", 1);
    if (b.contains("iters")) a.iters = r.integer(b["iters"], p + "/iters", 1, 1000000);
    if (b.contains("seed")) a.seed = r.seed(b["seed"], p + "/seed");
    if (b.contains("restarts")) a.restarts = r.integer(b["restarts"], p + "/restarts", 1, 10000);
  } else {
    r.fail(p, "unknown algorithm; expected \"jpta\", \"heuristic\" or \"hbf\"");
  }
  return a;
}

SweepBlock parse_sweep(const Reader& r, const json& j, const std::string& ptr) {
  r.only_keys(j, ptr, {"parameter", "values"});
  SweepBlock s;
  if (!j.contains("parameter")) r.fail(ptr, "missing \"parameter\"");
  const std::string name = r.string(j["parameter"], ptr + "/parameter");
  if (name == "N") {
    s.parameter = SweepParameter::kN;
  } else if (name == "kappa") {
    s.parameter = SweepParameter::kKappa;
  } else if (name == "max_iter") {
    s.parameter = SweepParameter::kMaxIter;
  } else if (name == "n_rf") {
    s.parameter = SweepParameter::kNrf;
  } else {
    r.fail(ptr + "/parameter", "expected \"N\", \"kappa\", \"max_iter\" or \"n_rf\", got \"" + name + "\"");
  }
  if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) {
    r.fail(ptr + "/values", "expected a nonempty list");
  }
  const json& v = j["values"];
  for (size_t i = 0; i < v.size(); ++i) {
    const std::string p = ptr + "/values/" + std::to_string(i);
    if (s.parameter == SweepParameter::kKappa) {
      const double x = r.number(v[i], p);
      if (x < 0.0) r.fail(p, "kappa must be nonnegative");
      s.values.push_back(x);
    } else {
      s.values.push_back(r.integer(v[i], p, 1));
    }
  }
  std::vector<double> sorted = s.values;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    r.fail(ptr + "/values", "duplicate sweep value");
  }
  return s;
}

OutputBlock parse_output(const Reader& r, const json& j, const std::string& ptr) {
  r.only_keys(j, ptr, {"dir", "gain_map", "theta_step_deg", "timing"});
  OutputBlock o;
  if (j.contains("dir")) o.dir = r.string(j["dir"], ptr + "/dir");
  if (j.contains("gain_map")) o.gain_map = r.boolean(j["gain_map"], ptr + "/gain_map");
  if (j.contains("theta_step_deg")) {
    o.theta_step_deg = r.positive(j["theta_step_deg"], ptr + "/theta_step_deg");
    if (o.theta_step_deg > 180.0) r.fail(ptr + "/theta_step_deg", "must be at most 180");
  }
  if (j.contains("timing")) o.timing = r.boolean(j["timing"], ptr + "/timing");
  return o;
}

// Cross-block checks: sweep values against the system, algorithms against the target.
void check_consistency(const Reader& r, const ExperimentConfig& c, bool single_algorithm) {
  for (size_t i = 0; i < c.algorithms.size(); ++i) {
    const AlgorithmBlock& a = c.algorithms[i];
    const std::string p = single_algorithm ? std::string("/algorithm") : "/algorithms/" + std::to_string(i);
    if (a.kind == AlgorithmKind::kHeuristic && c.target.kind != TargetKind::kBehavior1 &&
        c.target.kind != TargetKind::kBehavior2) {
      r.fail(p, "heuristic designs exist for behaviors 1 and 2 only");
    }
    if (a.kind == AlgorithmKind::kHbf) {
      if (a.n_rf > c.system.M) r.fail(p + "/hbf/n_rf", "more RF chains than antennas");
      if (a.structure == HbfStructure::kPartiallyConnected && c.system.M % a.n_rf != 0) {
        r.fail(p + "/hbf/n_rf", "partially-connected needs n_rf to divide M=" + std::to_string(c.system.M));
      }
    }
  }
  if (!c.sweep) return;
  for (size_t i = 0; i < c.sweep->values.size(); ++i) {
    const std::string p = "/sweep/values/" + std::to_string(i);
    const double v = c.sweep->values[i];
    if (c.sweep->parameter == SweepParameter::kN) {
      const int n = static_cast<int>(v);
      if (n > c.system.M || c.system.M % n != 0) r.fail(p, "N must divide M=" + std::to_string(c.system.M));
    } else if (c.sweep->parameter == SweepParameter::kNrf && v > c.system.M) {
      r.fail(p, "more RF chains than antennas");
    }
  }
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string AlgorithmBlock::label() const {
  switch (kind) {
    case AlgorithmKind::kJpta:
      return variant == TtdUpdate::kWls ? "jpta-wls" : "jpta-ls";
    case AlgorithmKind::kHeuristic:
      return "heuristic";
    case AlgorithmKind::kHbf:
      return structure == HbfStructure::kFullyConnected ? "hbf-fc" : "hbf-pc";
  }
  return "unknown";
}

std::string sweep_parameter_name(SweepParameter p) {
  switch (p) {
    case SweepParameter::kN:
      return "N";
    case SweepParameter::kKappa:
      return "kappa";
    case SweepParameter::kMaxIter:
      return "max_iter";
    case SweepParameter::kNrf:
      return "n_rf";
  }
  return "unknown";
}

double parse_angle_deg(const json& value, const std::string& what) {
  const std::string prefix = what.empty() ? "" : what + ": ";
  double deg = 0.0;
  if (value.is_number()) {
    deg = value.get<double>();
  } else if (value.is_string()) {
    std::string s = trim(value.get<std::string>());
    if (s.size() >= 3 && s.compare(s.size() - 3, 3, "deg") == 0) s = trim(s.substr(0, s.size() - 3));
    size_t used = 0;
    try {
      deg = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size()) {
      throw ConfigError(prefix + "\"" + value.get<std::string>() + "\" is not an angle in degrees");
    }
  } else {
    throw ConfigError(prefix + "expected an angle in degrees");
  }
  if (!std::isfinite(deg) || deg < -90.0 || deg > 90.0) {
    std::ostringstream os;
    os << prefix << "angle " << deg << " deg outside [-90, 90]";
    throw ConfigError(os.str());
  }
  return deg;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    const size_t byte = std::min<size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
    std::string msg = e.what();
    const auto colon = msg.find("syntax error");
    if (colon != std::string::npos) msg = msg.substr(colon);
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  }
  const Reader r(text, source);
  r.only_keys(doc, "", {"name", "seed", "system", "target", "algorithm", "algorithms", "sweep", "output"});

  ExperimentConfig c;
  if (doc.contains("name")) c.name = r.string(doc["name"], "/name");
  if (doc.contains("seed")) c.seed = r.seed(doc["seed"], "/seed");
  if (doc.contains("system")) c.system = parse_system(r, doc["system"], "/system");
  if (!doc.contains("target")) r.fail("", "missing \"target\" block");
  c.target = parse_target(r, doc["target"], "/target", c.system);

  if (doc.contains("algorithm") && doc.contains("algorithms")) {
    r.fail("/algorithms", "give either \"algorithm\" or \"algorithms\", not both");
  }
  if (doc.contains("algorithm")) {
    c.algorithms.push_back(parse_algorithm(r, doc["algorithm"], "/algorithm"));
  } else if (doc.contains("algorithms")) {
    const json& list = doc["algorithms"];
    if (!list.is_array() || list.empty()) r.fail("/algorithms", "expected a nonempty list");
    for (size_t i = 0; i < list.size(); ++i) {
      c.algorithms.push_back(parse_algorithm(r, list[i], "/algorithms/" + std::to_string(i)));
    }
  } else {
    r.fail("", "missing \"algorithm\" block");
  }
  if (doc.contains("sweep")) c.sweep = parse_sweep(r, doc["sweep"], "/sweep");
  if (doc.contains("output")) c.output = parse_output(r, doc["output"], "/output");
  check_consistency(r, c, doc.contains("algorithm"));
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig c = parse_config(buf.str(), path);
  // Echoed configs must stay loadable from anywhere: anchor file names now.
  const auto parent = std::filesystem::absolute(path).parent_path();
  c.base_dir = parent.string();
  auto anchor = [&](std::string& file) {
    if (!file.empty() && std::filesystem::path(file).is_relative()) file = (parent / file).lexically_normal().string();
  };
  anchor(c.target.file);
  for (AlgorithmBlock& a : c.algorithms) anchor(a.discrete_set_file);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["system"] = {{"M", c.system.M},           {"N", c.system.N},  {"f0_ghz", c.system.f0_ghz},
                 {"W_ghz", c.system.W_ghz},   {"K", c.system.K},  {"kappa", c.system.kappa},
                 {"p_sum", c.system.power()}};
  json t;
  switch (c.target.kind) {
    case TargetKind::kBehavior1:
      t = {{"behavior", 1}, {"theta0_deg", c.target.theta0_deg}, {"delta_theta_deg", c.target.delta_theta_deg}};
      break;
    case TargetKind::kBehavior2:
      t = {{"behavior", 2}, {"theta1_deg", c.target.theta1_deg}, {"theta2_deg", c.target.theta2_deg}};
      break;
    case TargetKind::kBehavior3:
      t = {{"behavior", 3}, {"angles_deg", c.target.angles_deg}};
      if (!c.target.band_edges.empty()) t["band_edges"] = c.target.band_edges;
      break;
    case TargetKind::kCustom:
      t = {{"behavior", "custom"}, {"file", c.target.file}, {"rescale", c.target.rescale}};
      break;
  }
  t["weights"] = weights_name(c.target.weights);
  j["target"] = t;

  json algs = json::array();
  for (const AlgorithmBlock& a : c.algorithms) {
    json b;
    switch (a.kind) {
      case AlgorithmKind::kJpta:
        b = {{"variant", a.variant == TtdUpdate::kWls ? "wls" : "line_search"},
             {"max_iter", a.max_iter},
             {"grid", a.grid},
             {"nonnegative", a.nonnegative}};
        if (!a.discrete_set_file.empty()) b["discrete_set_file"] = a.discrete_set_file;
        if (a.epsilon) b["epsilon"] = *a.epsilon;
        if (a.init_seed) b["init_seed"] = *a.init_seed;
        algs.push_back({{"jpta", b}});
        break;
      case AlgorithmKind::kHeuristic:
        algs.push_back({{"heuristic", {{"strict_verbatim", a.strict_verbatim}}}});
        break;
      case AlgorithmKind::kHbf:
        b = {{"structure", a.structure == HbfStructure::kFullyConnected ? "fc" : "pc"},
             {"n_rf", a.n_rf},
             {"iters", a.iters},
             {"seed", a.seed.value_or(c.seed)},
             {"restarts", a.restarts}};
        algs.push_back({{"hbf", b}});
        break;
    }
  }
  j["algorithms"] = algs;
  if (c.sweep) {
    json values = json::array();
    for (double v : c.sweep->values) {
      if (c.sweep->parameter == SweepParameter::kKappa) {
        values.push_back(v);
      } else {
        values.push_back(static_cast<int>(v));
      }
    }
    j["sweep"] = {{"parameter", sweep_parameter_name(c.sweep->parameter)}, {"values", values}};
  }
  j["output"] = {{"dir", c.output.dir},
                 {"gain_map", c.output.gain_map},
                 {"theta_step_deg", c.output.theta_step_deg},
                 {"timing", c.output.timing}};
  return j;
}

std::string echo(const ExperimentConfig& config) { return to_json(config).dump(); }

}  // namespace jpta::cli
