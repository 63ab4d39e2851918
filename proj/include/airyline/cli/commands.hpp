#pragma once

// Command implementations shared by the airymix binary and the tests. Each
// returns a Result; the caller decides where and how to emit it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "airyline/cli/config.hpp"
#include "airyline/cli/emit.hpp"
#include "airyline/ensembles.hpp"
#include "airyline/fredholm.hpp"
#include "airyline/gue.hpp"
#include "airyline/kernels.hpp"
#include "airyline/mixing.hpp"
#include "airyline/special_functions.hpp"
#include "airyline/stats.hpp"

namespace airyline::cli {

/// Complex numbers in a single CSV cell: the real part alone when the
/// imaginary part is zero, otherwise "re+imj".
inline Cell complex_cell(std::complex<double> z) {
  if (z.imag() == 0.0) return Cell(z.real());
  std::string s = format_number(z.real());
  s += z.imag() < 0 ? "-" : "+";
  s += format_number(std::fabs(z.imag())) + "j";
  return Cell(s);
}

inline FredholmOptions fredholm_options(const RunConfig& cfg) {
  FredholmOptions o = cfg.fredholm;
  o.threads = cfg.threads;
  return o;
}

inline Result run_airy(const RunConfig& cfg) {
  const AiryValue v = airy_ai(cfg.x);
  Result r;
  r.table.headers = {"x", "ai", "ai_prime"};
  r.table.add({cfg.x, v.ai, v.ai_prime});
  return r;
}

inline Result run_kernel(const RunConfig& cfg) {
  const KernelEstimate k = k2_ext_estimate(cfg.s, cfg.x, cfg.t, cfg.y);
  Result r;
  r.table.headers = {"s", "x", "t", "y", "value", "error_estimate"};
  r.table.add({cfg.s, cfg.x, cfg.t, cfg.y, k.value, k.error_estimate});
  return r;
}

inline Result run_genfun(const RunConfig& cfg) {
  const GenFunValue g = generating_function(cfg.counting(), fredholm_options(cfg));
  Result r;
  r.table.headers = {"value_re", "value_im", "error_estimate", "nodes_used"};
  r.table.add({g.value.real(), g.value.imag(), g.error_estimate, g.nodes_used});
  return r;
}

inline std::vector<double> tw2_grid(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw ConfigError("tw2: need from <= to and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  if (count > 100000) throw ConfigError("tw2: more than 1e5 grid points requested");
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = from + static_cast<double>(i) * step;
  return s;
}

inline Result run_tw2(const RunConfig& cfg) {
  const std::vector<double> s = tw2_grid(cfg.from, cfg.to, cfg.step);
  std::vector<double> f(s.size());
  FredholmOptions opts = fredholm_options(cfg);
  opts.threads = 1;
  parallel_for(s.size(), cfg.threads, [&](std::size_t i) { f[i] = tracy_widom_f2(s[i], opts); });
  Result r;
  r.table.headers = {"s", "F2"};
  for (std::size_t i = 0; i < s.size(); ++i) r.table.add({s[i], f[i]});
  r.plot = {"Tracy-Widom GUE distribution", 0, {1}, false, cfg.log_scale};
  return r;
}

inline Result run_counts(const RunConfig& cfg) {
  const std::vector<double> p = count_distribution(cfg.counting(), cfg.target, cfg.k_max, fredholm_options(cfg));
  Result r;
  r.table.headers = {"k", "probability"};
  for (std::size_t k = 0; k < p.size(); ++k) r.table.add({k, p[k]});
  r.plot = {"Count distribution", 0, {1}, false, false};
  return r;
}

inline Result run_mixing(const RunConfig& cfg) {
  MixingExperiment exp{cfg.counting(), cfg.shifts, cfg.shifted_z};
  const MixingSweep sweep = mixing_sweep(exp, fredholm_options(cfg));
  Result r;
  r.table.headers = {"T", "R_re", "R_im", "abs_R", "det_joint", "det_left", "det_right"};
  for (const MixingPoint& p : sweep.points) {
    r.table.add({p.shift, p.remainder.real(), p.remainder.imag(), std::abs(p.remainder), complex_cell(p.det_joint),
                 complex_cell(p.det_left), complex_cell(p.det_right)});
  }
  r.plot = {"Mixing remainder |R(z,T)|", 0, {3}, cfg.log_scale, cfg.log_scale};
  return r;
}

inline Result run_trace_decay(const RunConfig& cfg) {
  const DecayCurve curve = trace_norm_sweep(cfg.a, cfg.ys, cfg.side, cfg.length, cfg.nodes, cfg.threads);
  Result r;
  r.table.headers = {"y", "trace_norm", "y_times_norm"};
  for (std::size_t i = 0; i < curve.size(); ++i) {
    r.table.add({curve.parameter[i], curve.magnitude[i], curve.parameter[i] * curve.magnitude[i]});
  }
  r.plot = {"Trace norm of the off-diagonal block", 0, {1}, cfg.log_scale, cfg.log_scale};
  return r;
}

/// k curves on [0, 1] with entrance = exit = (k-1, k-3, ..., 1-k) and no
/// barriers.
inline AvoidingSpec reference_avoiding_spec(std::size_t k, std::size_t grid) {
  if (k < 1 || k > 16) throw ConfigError("gibbs-check: k must lie in [1, 16]");
  if (grid < 4) throw ConfigError("gibbs-check: grid must have at least 4 intervals");
  AvoidingSpec spec;
  spec.grid = UniformGrid::over(0.0, 1.0, grid);
  for (std::size_t i = 0; i < k; ++i) {
    const double v = static_cast<double>(k) - 1.0 - 2.0 * static_cast<double>(i);
    spec.entrance.push_back(v);
    spec.exit.push_back(v);
  }
  return spec;
}

inline GibbsWindow reference_window(const RunConfig& cfg) {
  GibbsWindow w;
  if (cfg.window_curves) {
    const auto [k1, k2] = *cfg.window_curves;
    if (k1 < 1 || k2 < k1 || k2 > cfg.curves) throw ConfigError("gibbs-check: window curves must satisfy 1 <= k1 <= k2 <= k");
    w.first_curve = k1 - 1;
    w.last_curve = k2 - 1;
  } else {
    w.first_curve = 0;
    w.last_curve = cfg.curves - 1;
  }
  if (cfg.window_range) {
    w.left = cfg.window_range->first;
    w.right = cfg.window_range->second;
    if (w.left == 0 || w.right >= cfg.grid) {
      throw ConfigError("gibbs-check: window must lie strictly inside the grid");
    }
  } else {
    w.left = cfg.grid / 4;
    w.right = cfg.grid - cfg.grid / 4;
  }
  return w;
}

inline Result run_gibbs_check(const RunConfig& cfg) {
  const AvoidingSpec spec = reference_avoiding_spec(cfg.curves, cfg.grid);
  const GibbsWindow w = reference_window(cfg);
  const GibbsReport rep = gibbs_resample_check(spec, w, cfg.samples, cfg.seed, cfg.threads);
  Result r;
  r.table.headers = {"ks_stat", "p_value", "acceptance_rate", "ks_stat_repeat", "p_value_repeat",
                     "ordering_violations", "outside_window_mismatches", "samples"};
  r.table.add({rep.ks_stat, rep.p_value, rep.acceptance_rate, rep.ks_stat_repeat, rep.p_value_repeat,
               rep.ordering_violations, rep.outside_window_mismatches, rep.samples});
  ordered_json doc;
  doc["ks_stat"] = rep.ks_stat;
  doc["p_value"] = rep.p_value;
  doc["acceptance_rate"] = rep.acceptance_rate;
  doc["ks_stat_repeat"] = rep.ks_stat_repeat;
  doc["p_value_repeat"] = rep.p_value_repeat;
  doc["ordering_violations"] = rep.ordering_violations;
  doc["outside_window_mismatches"] = rep.outside_window_mismatches;
  doc["samples"] = rep.samples;
  doc["k"] = cfg.curves;
  doc["grid"] = cfg.grid;
  doc["window"] = {{"curves", {w.first_curve + 1, w.last_curve + 1}}, {"range", {w.left, w.right}}};
  doc["seed"] = cfg.seed;
  r.document = doc;
  return r;
}

inline Result run_gue_edge(const RunConfig& cfg) {
  std::vector<double> samples = gue_edge_sample(cfg.matrix_size, cfg.gue_samples, cfg.seed, cfg.threads);
  const SampleSummary sum = summarize(samples);
  Result r;
  r.table.headers = {"index", "value"};
  for (std::size_t i = 0; i < samples.size(); ++i) r.table.add({i, samples[i]});
  r.table.add({"mean", sum.mean});

  std::sort(samples.begin(), samples.end());
  ordered_json doc;
  doc["n"] = cfg.matrix_size;
  doc["samples"] = cfg.gue_samples;
  doc["seed"] = cfg.seed;
  doc["mean"] = sum.mean;
  doc["variance"] = sum.variance;
  ordered_json cdf = ordered_json::array();
  double worst = 0.0;
  FredholmOptions opts = fredholm_options(cfg);
  for (double s : cfg.points) {
    const double f2 = tracy_widom_f2(s, opts);
    const double emp = empirical_cdf(samples, s);
    worst = std::max(worst, std::fabs(emp - f2));
    cdf.push_back({{"s", s}, {"empirical", emp}, {"F2", f2}, {"deviation", emp - f2}});
  }
  doc["cdf"] = cdf;
  doc["max_abs_deviation"] = worst;
  r.document = doc;
  return r;
}

}  // namespace airyline::cli
