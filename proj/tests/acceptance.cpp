// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <limits>
#include <string>
#include <vector>

#include "airyline/ensembles.hpp"
#include "airyline/fredholm.hpp"
#include "airyline/gue.hpp"
#include "airyline/kernels.hpp"
#include "airyline/mixing.hpp"
#include "airyline/rng.hpp"
#include "airyline/stats.hpp"
#include "oracles.hpp"

using namespace airyline;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
  return s;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome kernel_oracle() {
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const double x = -6.0 + 10.0 * i / 19.0;
      const double y = -6.0 + 10.0 * j / 19.0;
      worst = std::max(worst, std::fabs(k2(x, y) - oracle::k2_direct(x, y)));
    }
  }
  return {worst <= 1e-9, "max |k2 - quadrature| = " + fmt("%.3g", worst) + " over 400 points (tol 1e-9)"};
}

Outcome generating_function_sanity() {
  const auto ones = CountingConfig::from_intervals({{0.0, -1.0, 1.0, {1.0, 0.0}}, {0.5, -2.0, kInf, {1.0, 0.0}}});
  const bool ones_exact = generating_function(ones).value == complex_t(1.0, 0.0);
  const bool empty_exact = generating_function(CountingConfig{}).value == complex_t(1.0, 0.0);
  RngStream rng(kDefaultSeed, 2);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    // Every fifth point on the torus |z1| = |z2| = 1, the rest inside.
    const bool boundary = k % 5 == 0;
    auto draw = [&] {
      const double r = boundary ? 1.0 : std::sqrt(rng.uniform());
      return std::polar(r, 2.0 * std::numbers::pi * rng.uniform());
    };
    const complex_t z1 = draw(), z2 = draw();
    const auto cfg = CountingConfig::from_intervals({{0.0, -2.0, 0.0, z1}, {0.5, -1.0, 1.0, z2}});
    worst = std::max(worst, std::abs(generating_function(cfg).value));
  }
  const bool ok = ones_exact && empty_exact && worst <= 1.0 + 1e-8;
  return {ok, std::string("all-ones ") + (ones_exact ? "exact" : "NOT exact") + ", empty " +
                  (empty_exact ? "exact" : "NOT exact") + ", max |G| over 50 polydisk points = " + fmt("%.12f", worst)};
}

Outcome tracy_widom_vs_gue() {
  std::vector<double> samples = gue_edge_sample(400, 200000, 7);
  std::sort(samples.begin(), samples.end());
  double worst = 0.0;
  for (double s : {-3.0, -2.0, -1.0, 0.0, 1.0}) {
    worst = std::max(worst, std::fabs(empirical_cdf(samples, s) - tracy_widom_f2(s)));
  }
  return {worst <= 0.015, "max |F2 - empirical CDF| = " + fmt("%.4f", worst) + " (tol 0.015, N=400, 2e5 samples)"};
}

bool decays(const DecayCurve& c, double factor, std::string& detail) {
  bool ok = c.magnitude.back() <= factor * c.magnitude.front();
  for (std::size_t k = 1; k < c.size(); ++k) ok = ok && c.magnitude[k] <= 1.1 * c.magnitude[k - 1];
  for (std::size_t k = 0; k < c.size(); ++k) {
    detail += (k ? ", " : "") + fmt("%g", c.parameter[k]) + ":" + fmt("%.3e", c.magnitude[k]);
  }
  return ok;
}

Outcome mixing_decay() {
  const MixingExperiment one{CountingConfig::from_intervals({{0.0, -1.0, 1.0, {0.5, 0.0}}}), {1, 2, 4, 8, 16}, {}};
  // Times 0 and 1 span 1, so the ladder must start above 1.
  const MixingExperiment two{
      CountingConfig::from_intervals({{0.0, -1.0, 1.0, {0.5, 0.0}}, {1.0, -1.0, 1.0, {0.5, 0.0}}}), {2, 4, 8, 16, 32},
      {}};
  std::string d1 = "m=1 |R| {", d2 = "} m=2 |R| {";
  const bool ok1 = decays(mixing_sweep(one).curve, 0.1, d1);
  const bool ok2 = decays(mixing_sweep(two).curve, 0.1, d2);
  return {ok1 && ok2, d1 + d2 + "}"};
}

Outcome trace_norm_decay() {
  bool ok = true;
  std::string detail;
  for (ProjectionSide side : {ProjectionSide::negative, ProjectionSide::positive}) {
    const DecayCurve c = trace_norm_sweep(-4.0, {1, 2, 4, 8, 16}, side);
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k > 0) ok = ok && c.magnitude[k] < c.magnitude[k - 1];
      worst_ratio = std::max(worst_ratio, c.parameter[k] * c.magnitude[k] / c.magnitude[0]);
    }
    ok = ok && worst_ratio <= 2.0;
    detail += std::string(side == ProjectionSide::negative ? "neg" : "pos") + " norms " +
              fmt("%.4f", c.magnitude.front()) + " -> " + fmt("%.4f", c.magnitude.back()) +
              ", max y*norm/norm(1) = " + fmt("%.3f", worst_ratio) + "; ";
  }
  return {ok, detail};
}

Outcome stationarity() {
  const auto cfg = CountingConfig::from_intervals(
      {{0.0, -1.0, 1.0, {0.5, 0.0}}, {0.0, 2.0, kInf, {0.2, 0.1}}, {0.7, -2.0, 0.5, {0.0, 0.0}}});
  const double c = 3.7;
  const auto moved = cfg.shifted(c);
  bool ok = build_block_matrix(cfg, 32) == build_block_matrix(moved, 32);
  ok = ok && generating_function(cfg).value == generating_function(moved).value;
  ok = ok && count_distribution(cfg, {0, 0}, 12) == count_distribution(moved, {0, 0}, 12);
  const auto gap = CountingConfig::from_intervals({{0.0, -1.0, 1.0, {}}, {1.3, -3.0, -1.0, {}}});
  ok = ok && gap_probability(gap) == gap_probability(gap.shifted(c));
  const MixingExperiment a{CountingConfig::from_intervals({{0.0, -1.0, 1.0, {0.5, 0.0}}}), {}, {}};
  const MixingExperiment b{a.base.shifted(c), {}, {}};
  ok = ok && mixing_remainder(a, 2.0).remainder == mixing_remainder(b, 2.0).remainder;
  return {ok, std::string("shift c = 3.7: block matrices, generating function, count law, gap probability, R ") +
                  (ok ? "all bit-identical" : "DIFFER")};
}

Outcome count_distribution_check() {
  const auto cfg = CountingConfig::from_intervals({{0.0, -2.0, kInf, {}}});
  const std::vector<double> p = count_distribution(cfg, {0, 0}, 20);
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    total += p[k];
    mean += static_cast<double>(k) * p[k];
  }
  // Intensity integral with Boost's Airy function and Gauss-Kronrod.
  const double intensity = oracle::panel_integral(
      [](double x) {
        const double ai = oracle::ai(x), aip = boost::math::airy_ai_prime(x);
        return aip * aip - x * ai * ai;
      },
      -2.0, 30.0);
  const bool ok = std::fabs(total - 1.0) <= 1e-8 && std::fabs(mean - intensity) <= 1e-6;
  return {ok, "sum = 1 " + fmt("%+.2e", total - 1.0) + ", mean = " + fmt("%.10f", mean) + " vs oracle " +
                  fmt("%.10f", intensity)};
}

Outcome gibbs_invariance() {
  AvoidingSpec spec;
  spec.grid = UniformGrid::over(0.0, 1.0, 64);
  spec.entrance = {1.0, -1.0};
  spec.exit = {1.0, -1.0};
  const GibbsReport r = gibbs_resample_check(spec, GibbsWindow{0, 1, 16, 48}, 10000, 42);
  const bool ok = r.p_value > 0.01 && r.outside_window_mismatches == 0 && r.ordering_violations == 0;
  return {ok, "KS D = " + fmt("%.4f", r.ks_stat) + ", p = " + fmt("%.4f", r.p_value) + ", outside mismatches " +
                  std::to_string(r.outside_window_mismatches) + ", ordering violations " +
                  std::to_string(r.ordering_violations)};
}

Outcome determinant_convergence() {
  struct Case {
    std::string name;
    CountingConfig config;
  };
  const std::vector<Case> corpus{
      {"F2(-4)", CountingConfig::from_intervals({{0.0, -4.0, kInf, {}}})},
      {"(-10,4) z=0.5", CountingConfig::from_intervals({{0.0, -10.0, 4.0, {0.5, 0.0}}})},
      {"two-time (-6,2)", CountingConfig::from_intervals({{0.0, -6.0, 2.0, {0.3, 0.0}}, {0.5, -6.0, 2.0, {0.3, 0.0}}})},
      {"two-time (-8,inf)",
       CountingConfig::from_intervals({{0.0, -8.0, kInf, {0.5, 0.0}}, {0.25, -8.0, kInf, {0.5, 0.0}}})},
      {"three-time (-10,3)", CountingConfig::from_intervals({{0.0, -10.0, 3.0, {0.5, 0.0}},
                                                             {0.2, -10.0, 3.0, {0.5, 0.0}},
                                                             {0.4, -10.0, 3.0, {0.5, 0.0}}})},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : corpus) {
    const auto ladder = determinant_ladder(c.config, {16, 32, 64, 128, 256}, 1e-14);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ladder.values.back()));
    std::size_t assessed = 0;
    double worst = kInf;
    for (std::size_t k = 2; k < ladder.differences.size(); ++k) {
      const double coarse = ladder.differences[k - 1];
      const double fine = ladder.differences[k];
      if (coarse <= 100.0 * floor) continue;
      ++assessed;
      worst = std::min(worst, coarse / std::max(fine, floor));
    }
    const bool pass = assessed > 0 && worst >= 10.0;
    ok = ok && pass;
    detail += c.name + ": " + std::to_string(assessed) + " ratio(s), min " + fmt("%.3g", worst) + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "kernel oracle agreement", 10, kernel_oracle},
      {2, "generating-function sanity", 120, generating_function_sanity},
      {3, "Tracy-Widom vs GUE edge", 600, tracy_widom_vs_gue},
      {4, "mixing decay", 900, mixing_decay},
      {5, "trace-norm decay", 600, trace_norm_decay},
      {6, "exact stationarity", 60, stationarity},
      {7, "count normalisation and intensity", 300, count_distribution_check},
      {8, "Gibbs resampling invariance", 600, gibbs_invariance},
      {9, "determinant convergence", 300, determinant_convergence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("[%s] #%d %s: %s (%.1f s of %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                trimmed(o.detail).c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
