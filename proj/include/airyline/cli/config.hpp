#pragma once

// Run configuration for the airymix command-line tool.
//
// A config file is one JSON object. Keys shared by every command:
//
//   command    string, required in files
//   seed       unsigned integer (default 20140101)
//   threads    unsigned integer (default: AIRYLINE_THREADS or hardware)
//   out        output path (default: stdout)
//   format     "csv" | "json" | "svg" (default csv; json for gibbs-check)
//   tolerance  { "tol", "min_nodes", "max_nodes", "max_dimension" }
//
// Intervals are written as
//
//   { "t": 0, "range": [-1, "inf"], "z": [0.5, 0] }
//
// and the remaining keys depend on the command (see `command_keys`). Unknown
// keys are rejected. Errors carry the field path and its line:column.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "airyline/errors.hpp"
#include "airyline/fredholm.hpp"
#include "airyline/kernels.hpp"
#include "airyline/parallel.hpp"
#include "airyline/quadrature.hpp"
#include "airyline/rng.hpp"

namespace airyline::cli {

using json = nlohmann::json;

struct TextLocation {
  std::size_t line = 0;
  std::size_t column = 0;
};

inline std::string to_string(const TextLocation& loc) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

namespace detail {

// Maps field paths such as "intervals[1].range" to where they start in the
// text. Runs only on text nlohmann::json has already accepted.
class PathLocator {
 public:
  explicit PathLocator(const std::string& text) : text_(text) {
    skip_ws();
    value("");
  }
  std::map<std::string, TextLocation> take() { return std::move(locations_); }

 private:
  TextLocation here() const { return {line_, col_}; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string string_token() {
    std::string out;
    advance();  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        advance();
      }
      out.push_back(text_[pos_]);
      advance();
    }
    advance();
    return out;
  }

  void value(const std::string& path) {
    if (!locations_.count(path)) locations_[path] = here();
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      advance();
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const TextLocation key_loc = here();
        const std::string key = string_token();
        const std::string child = path.empty() ? key : path + "." + key;
        locations_[child] = key_loc;
        skip_ws();
        advance();  // ':'
        skip_ws();
        value(child);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          advance();
          skip_ws();
        }
      }
      advance();
    } else if (c == '[') {
      advance();
      skip_ws();
      std::size_t index = 0;
      while (pos_ < text_.size() && text_[pos_] != ']') {
        value(path + "[" + std::to_string(index++) + "]");
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          advance();
          skip_ws();
        }
      }
      advance();
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
             text_[pos_] != ']' && text_[pos_] != '}') {
        advance();
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::map<std::string, TextLocation> locations_;
};

}  // namespace detail

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"airy",  "kernel",      "genfun",      "tw2",      "counts",
                                              "mixing", "trace-decay", "gibbs-check", "gue-edge", "golden"};
  return names;
}

/// Keys a config file may contain for `command`, beyond the shared ones.
inline std::set<std::string> command_keys(const std::string& command) {
  static const std::map<std::string, std::set<std::string>> table{
      {"airy", {"x"}},
      {"kernel", {"s", "x", "t", "y"}},
      {"genfun", {"intervals"}},
      {"tw2", {"from", "to", "step", "log_scale"}},
      {"counts", {"intervals", "target", "k_max"}},
      {"mixing", {"intervals", "shifts", "shifted_z", "log_scale"}},
      {"trace-decay", {"a", "side", "ys", "length", "nodes", "log_scale"}},
      {"gibbs-check", {"k", "grid", "samples", "window_curves", "window_range"}},
      {"gue-edge", {"n", "samples", "points"}},
      {"golden", {"files"}},
  };
  const auto it = table.find(command);
  if (it == table.end()) throw ParseError("unknown command '" + command + "'");
  return it->second;
}

struct RunConfig {
  std::string command;
  std::optional<std::string> out;
  std::string format;  // empty: the command's default
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = default_threads();
  FredholmOptions fredholm{};

  // airy / kernel
  double x = 0.0;
  double s = 0.0;
  double t = 0.0;
  double y = 0.0;

  // genfun / counts / mixing
  std::vector<IntervalSpec> intervals;
  IntervalHandle target{};
  std::size_t k_max = 20;
  std::vector<double> shifts{1, 2, 4, 8, 16};
  std::vector<std::complex<double>> shifted_z;

  // tw2
  double from = -6.0;
  double to = 3.0;
  double step = 0.1;
  bool log_scale = false;

  // trace-decay
  double a = -4.0;
  ProjectionSide side = ProjectionSide::positive;
  std::vector<double> ys{1, 2, 4, 8, 16};
  double length = 12.0;
  std::size_t nodes = 96;

  // gibbs-check
  std::size_t curves = 2;
  std::size_t grid = 64;
  std::size_t samples = 10000;
  std::optional<std::pair<std::size_t, std::size_t>> window_curves;  // 1-based, inclusive
  std::optional<std::pair<std::size_t, std::size_t>> window_range;   // grid indices

  // gue-edge
  std::size_t matrix_size = 400;
  std::size_t gue_samples = 200000;
  std::vector<double> points{-3, -2, -1, 0, 1};

  // golden
  std::vector<std::string> files;

  CountingConfig counting() const { return CountingConfig::from_intervals(intervals); }

  /// gibbs-check reports JSON by default, everything else CSV.
  std::string output_format() const {
    if (!format.empty()) return format;
    return command == "gibbs-check" ? "json" : "csv";
  }
};

namespace detail {

class ConfigReader {
 public:
  ConfigReader(const json& root, std::map<std::string, TextLocation> locations)
      : root_(root), locations_(std::move(locations)) {}

  std::string where(const std::string& path) const {
    const auto it = locations_.find(path);
    return it == locations_.end() ? std::string("config") : "config " + to_string(it->second);
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError(where(path) + ": field '" + path + "' " + what);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "must be finite");
    return d;
  }

  // A number or the string "inf" / "-inf".
  double extended_number(const json& v, const std::string& path) const {
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
      fail(path, "must be a number or \"inf\"");
    }
    return number(v, path);
  }

  std::uint64_t unsigned_integer(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& v, const std::string& path) const {
    if (!v.is_boolean()) fail(path, "must be true or false");
    return v.get<bool>();
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "must be a string");
    return v.get<std::string>();
  }

  std::complex<double> complex_number(const json& v, const std::string& path) const {
    if (v.is_number()) return {number(v, path), 0.0};
    if (!v.is_array() || v.size() != 2) fail(path, "must be [re, im]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  }

  std::vector<double> number_list(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::pair<std::size_t, std::size_t> index_pair(const json& v, const std::string& path) const {
    if (!v.is_array() || v.size() != 2) fail(path, "must be a two-element array");
    return {unsigned_integer(v[0], path + "[0]"), unsigned_integer(v[1], path + "[1]")};
  }

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.count(it.key())) {
        const std::string child = path.empty() ? it.key() : path + "." + it.key();
        throw ParseError(where(child) + ": unknown field '" + child + "'");
      }
    }
  }

  IntervalSpec interval(const json& v, const std::string& path) const {
    if (!v.is_object()) fail(path, "must be an object {t, range, z}");
    check_keys(v, path, {"t", "range", "z"});
    if (!v.contains("range")) fail(path + ".range", "is required");
    IntervalSpec spec;
    spec.time = v.contains("t") ? number(v["t"], path + ".t") : 0.0;
    const json& r = v["range"];
    if (!r.is_array() || r.size() != 2) fail(path + ".range", "must be [lower, upper|\"inf\"]");
    spec.lower = extended_number(r[0], path + ".range[0]");
    spec.upper = extended_number(r[1], path + ".range[1]");
    spec.weight_z = v.contains("z") ? complex_number(v["z"], path + ".z") : std::complex<double>{0.0, 0.0};
    try {
      spec.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(where(path) + ": " + path + ": " + e.what());
    }
    return spec;
  }

 private:
  const json& root_;
  std::map<std::string, TextLocation> locations_;
};

}  // namespace detail

/// Parses and validates a JSON run configuration. `command_override`, if
/// nonempty, supplies the command when the text has none and must agree with
/// it otherwise.
inline RunConfig parse_config(const std::string& text, const std::string& command_override = "") {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t limit = std::min(static_cast<std::size_t>(e.byte), text.size());
    for (std::size_t i = 0; i + 1 < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("config " + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  const detail::ConfigReader rd(root, detail::PathLocator(text).take());
  if (!root.is_object()) rd.fail("", "config must be a JSON object");

  RunConfig cfg;
  if (root.contains("command")) {
    cfg.command = rd.string(root["command"], "command");
    if (!command_override.empty() && command_override != cfg.command) {
      rd.fail("command", "is '" + cfg.command + "' but the '" + command_override + "' subcommand was invoked");
    }
  } else if (!command_override.empty()) {
    cfg.command = command_override;
  } else {
    throw ParseError("config: field 'command' is required");
  }
  std::set<std::string> allowed;
  try {
    allowed = command_keys(cfg.command);
  } catch (const ParseError&) {
    rd.fail("command", "names an unknown command '" + cfg.command + "'");
  }
  for (const char* k : {"command", "seed", "threads", "out", "format", "tolerance"}) allowed.insert(k);
  rd.check_keys(root, "", allowed);

  auto has = [&](const char* k) { return root.contains(k); };
  if (has("seed")) cfg.seed = rd.unsigned_integer(root["seed"], "seed");
  if (has("threads")) {
    cfg.threads = static_cast<unsigned>(rd.unsigned_integer(root["threads"], "threads"));
    if (cfg.threads == 0) rd.fail("threads", "must be at least 1");
  }
  if (has("out")) cfg.out = rd.string(root["out"], "out");
  if (has("format")) {
    cfg.format = rd.string(root["format"], "format");
    if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "svg") {
      rd.fail("format", "must be one of csv, json, svg");
    }
  }
  if (has("tolerance")) {
    const json& tol = root["tolerance"];
    if (!tol.is_object()) rd.fail("tolerance", "must be an object");
    rd.check_keys(tol, "tolerance", {"tol", "min_nodes", "max_nodes", "max_dimension"});
    if (tol.contains("tol")) cfg.fredholm.tol = rd.number(tol["tol"], "tolerance.tol");
    if (tol.contains("min_nodes")) cfg.fredholm.min_nodes = rd.unsigned_integer(tol["min_nodes"], "tolerance.min_nodes");
    if (tol.contains("max_nodes")) cfg.fredholm.max_nodes = rd.unsigned_integer(tol["max_nodes"], "tolerance.max_nodes");
    if (tol.contains("max_dimension")) {
      cfg.fredholm.max_dimension = rd.unsigned_integer(tol["max_dimension"], "tolerance.max_dimension");
    }
    try {
      airyline::detail::check_options(cfg.fredholm);
    } catch (const DomainError& e) {
      throw ConfigError(rd.where("tolerance") + ": tolerance: " + e.what());
    }
  }

  for (const char* k : {"x", "s", "t", "y", "from", "to", "step", "a", "length"}) {
    if (!has(k)) continue;
    const double v = rd.number(root[k], k);
    const std::string key = k;
    if (key == "x") cfg.x = v;
    if (key == "s") cfg.s = v;
    if (key == "t") cfg.t = v;
    if (key == "y") cfg.y = v;
    if (key == "from") cfg.from = v;
    if (key == "to") cfg.to = v;
    if (key == "step") cfg.step = v;
    if (key == "a") cfg.a = v;
    if (key == "length") cfg.length = v;
  }
  if (has("log_scale")) cfg.log_scale = rd.boolean(root["log_scale"], "log_scale");
  if (has("k_max")) cfg.k_max = rd.unsigned_integer(root["k_max"], "k_max");
  if (has("nodes")) cfg.nodes = rd.unsigned_integer(root["nodes"], "nodes");
  if (has("k")) cfg.curves = rd.unsigned_integer(root["k"], "k");
  if (has("grid")) cfg.grid = rd.unsigned_integer(root["grid"], "grid");
  if (has("n")) cfg.matrix_size = rd.unsigned_integer(root["n"], "n");
  if (has("samples")) {
    const std::size_t n = rd.unsigned_integer(root["samples"], "samples");
    cfg.samples = n;
    cfg.gue_samples = n;
  }
  if (has("shifts")) cfg.shifts = rd.number_list(root["shifts"], "shifts");
  if (has("ys")) cfg.ys = rd.number_list(root["ys"], "ys");
  if (has("points")) cfg.points = rd.number_list(root["points"], "points");
  if (has("side")) {
    const std::string side = rd.string(root["side"], "side");
    if (side == "pos" || side == "positive") {
      cfg.side = ProjectionSide::positive;
    } else if (side == "neg" || side == "negative") {
      cfg.side = ProjectionSide::negative;
    } else {
      rd.fail("side", "must be \"pos\" or \"neg\"");
    }
  }
  if (has("window_curves")) cfg.window_curves = rd.index_pair(root["window_curves"], "window_curves");
  if (has("window_range")) cfg.window_range = rd.index_pair(root["window_range"], "window_range");
  if (has("files")) {
    const json& f = root["files"];
    if (!f.is_array()) rd.fail("files", "must be an array of paths");
    for (std::size_t i = 0; i < f.size(); ++i) cfg.files.push_back(rd.string(f[i], "files[" + std::to_string(i) + "]"));
  }
  if (has("shifted_z")) {
    const json& z = root["shifted_z"];
    if (!z.is_array()) rd.fail("shifted_z", "must be an array of [re, im]");
    for (std::size_t i = 0; i < z.size(); ++i) {
      cfg.shifted_z.push_back(rd.complex_number(z[i], "shifted_z[" + std::to_string(i) + "]"));
    }
  }
  if (has("target")) {
    const json& tg = root["target"];
    if (!tg.is_object()) rd.fail("target", "must be {time_index, interval_index}");
    rd.check_keys(tg, "target", {"time_index", "interval_index"});
    if (tg.contains("time_index")) cfg.target.time_index = rd.unsigned_integer(tg["time_index"], "target.time_index");
    if (tg.contains("interval_index")) {
      cfg.target.interval_index = rd.unsigned_integer(tg["interval_index"], "target.interval_index");
    }
  }
  if (has("intervals")) {
    const json& iv = root["intervals"];
    if (!iv.is_array()) rd.fail("intervals", "must be an array of interval objects");
    for (std::size_t i = 0; i < iv.size(); ++i) {
      cfg.intervals.push_back(rd.interval(iv[i], "intervals[" + std::to_string(i) + "]"));
    }
    try {
      (void)cfg.counting();
    } catch (const ConfigError& e) {
      throw ConfigError(rd.where("intervals") + ": intervals: " + e.what());
    }
  }
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RunConfig load_config(const std::string& path, const std::string& command_override = "") {
  return parse_config(read_text_file(path), command_override);
}

}  // namespace airyline::cli
