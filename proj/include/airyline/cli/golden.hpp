#pragma once

// Golden-file regression runner.
//
// A golden file records reference values together with the tolerance they
// were generated for:
//
//   {
//     "name": "tracy-widom",
//     "tolerance": 1e-9,
//     "cases": [
//       { "label": "F2(-2)", "kind": "tw2", "params": {"from": -2, "to": -2},
//         "expected": [0.413224142507855] }
//     ]
//   }
//
// `kind` is a command name and `params` a config object for it (without the
// shared keys). Each case may carry its own "tolerance". The runner recomputes
// every value and reports the per-value drift.

#include <nlohmann/json.hpp>

#include <cmath>
#include <complex>
#include <fstream>
#include <string>
#include <vector>

#include "airyline/cli/commands.hpp"
#include "airyline/cli/config.hpp"
#include "airyline/cli/emit.hpp"
#include "airyline/errors.hpp"

namespace airyline::cli {

struct GoldenDiff {
  std::string file;
  std::string label;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  double drift() const { return std::fabs(actual - expected); }
  bool pass() const { return drift() <= tolerance; }
};

namespace detail {

// Flattens the numeric cells of a result (row-major, header order) into the
// comparison vector for a golden case.
inline std::vector<double> golden_values(const std::string& kind, const Result& r) {
  std::vector<double> out;
  auto column = [&](const std::string& name) {
    for (std::size_t c = 0; c < r.table.headers.size(); ++c)
      if (r.table.headers[c] == name) return c;
    throw NumericError("golden: result has no column '" + name + "'");
  };
  std::vector<std::size_t> cols;
  if (kind == "airy") cols = {column("ai"), column("ai_prime")};
  else if (kind == "kernel") cols = {column("value")};
  else if (kind == "genfun") cols = {column("value_re"), column("value_im")};
  else if (kind == "tw2") cols = {column("F2")};
  else if (kind == "counts") cols = {column("probability")};
  else if (kind == "mixing") cols = {column("R_re"), column("R_im")};
  else if (kind == "trace-decay") cols = {column("trace_norm")};
  else throw ParseError("golden: kind '" + kind + "' cannot be used in a golden file");
  for (const auto& row : r.table.rows)
    for (std::size_t c : cols)
      if (row[c].number) out.push_back(*row[c].number);
  return out;
}

inline Result golden_run_case(const std::string& kind, const nlohmann::json& params) {
  nlohmann::json cfg = params.is_null() ? nlohmann::json::object() : params;
  cfg["command"] = kind;
  cfg["threads"] = 1;
  const RunConfig rc = parse_config(cfg.dump());
  if (kind == "airy") return run_airy(rc);
  if (kind == "kernel") return run_kernel(rc);
  if (kind == "genfun") return run_genfun(rc);
  if (kind == "tw2") return run_tw2(rc);
  if (kind == "counts") return run_counts(rc);
  if (kind == "mixing") return run_mixing(rc);
  if (kind == "trace-decay") return run_trace_decay(rc);
  throw ParseError("golden: kind '" + kind + "' cannot be used in a golden file");
}

}  // namespace detail

/// Recomputes every case of a golden file. With `record` set, the file is
/// rewritten with the freshly computed values instead.
inline std::vector<GoldenDiff> run_golden_file(const std::string& path, bool record = false) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("golden file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("cases") || !doc["cases"].is_array() || !doc.contains("tolerance") ||
      !doc["tolerance"].is_number()) {
    throw ParseError("golden file '" + path + "' needs a numeric 'tolerance' and a 'cases' array");
  }
  const double file_tol = doc["tolerance"].get<double>();
  std::vector<GoldenDiff> diffs;
  for (auto& c : doc["cases"]) {
    if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) {
      throw ParseError("golden file '" + path + "': every case needs a string 'kind'");
    }
    const std::string kind = c["kind"].get<std::string>();
    const std::string label = c.value("label", kind);
    const double tol = c.contains("tolerance") ? c["tolerance"].get<double>() : file_tol;
    const nlohmann::json params = c.contains("params") ? nlohmann::json::parse(c["params"].dump()) : nlohmann::json();
    const std::vector<double> actual = detail::golden_values(kind, detail::golden_run_case(kind, params));
    if (record) {
      c["expected"] = actual;
      continue;
    }
    if (!c.contains("expected") || !c["expected"].is_array()) {
      throw ParseError("golden file '" + path + "': case '" + label + "' has no 'expected' array");
    }
    const auto expected = c["expected"].get<std::vector<double>>();
    if (expected.size() != actual.size()) {
      throw ParseError("golden file '" + path + "': case '" + label + "' expects " +
                       std::to_string(expected.size()) + " values, computed " + std::to_string(actual.size()));
    }
    for (std::size_t i = 0; i < actual.size(); ++i) {
      const std::string name = actual.size() == 1 ? label : label + "[" + std::to_string(i) + "]";
      diffs.push_back({path, name, expected[i], actual[i], tol});
    }
  }
  if (record) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot rewrite golden file '" + path + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("failed writing golden file '" + path + "'");
  }
  return diffs;
}

inline Result golden_report(const std::vector<GoldenDiff>& diffs) {
  Result r;
  r.table.headers = {"file", "label", "expected", "actual", "drift", "tolerance", "status"};
  for (const auto& d : diffs) {
    r.table.add({d.file, d.label, d.expected, d.actual, d.drift(), d.tolerance, d.pass() ? "ok" : "DRIFT"});
  }
  return r;
}

}  // namespace airyline::cli
