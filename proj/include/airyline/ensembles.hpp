#pragma once

// Finite avoiding Brownian line ensembles on a uniform time grid.
//
// Curves are Brownian bridges with diffusion coefficient 1 between given
// entrance and exit values, conditioned on staying strictly ordered
// f > curve_1 > ... > curve_k > g at every grid time. Conditioning is imposed
// at grid times only, so results converge to the continuum law as the grid is
// refined; the Gibbs checks always compare ensembles on the same grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airyline/errors.hpp"
#include "airyline/parallel.hpp"
#include "airyline/rng.hpp"
#include "airyline/stats.hpp"

namespace airyline {

/// Grid start + i * step, i = 0..intervals. Sampling only ever uses the step
/// and index differences, so translating `start` leaves every sampled value
/// unchanged.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t intervals = 1;

  static UniformGrid over(double a, double b, std::size_t intervals) {
    if (intervals < 1 || !(b > a)) throw ConfigError("grid needs b > a and at least one interval");
    return {a, (b - a) / static_cast<double>(intervals), intervals};
  }

  std::size_t points() const { return intervals + 1; }
  double time(std::size_t i) const { return start + static_cast<double>(i) * step; }
  double end() const { return time(intervals); }
  UniformGrid shifted(double c) const { return {start + c, step, intervals}; }
};

/// Barrier sampled on the grid; an empty vector stands for +inf (upper) or
/// -inf (lower) everywhere.
struct AvoidingSpec {
  UniformGrid grid;
  std::vector<double> entrance;  // strictly decreasing
  std::vector<double> exit;      // strictly decreasing
  std::vector<double> upper;     // f on the grid, or empty
  std::vector<double> lower;     // g on the grid, or empty

  std::size_t curves() const { return entrance.size(); }

  double upper_at(std::size_t i) const {
    return upper.empty() ? std::numeric_limits<double>::infinity() : upper[i];
  }
  double lower_at(std::size_t i) const {
    return lower.empty() ? -std::numeric_limits<double>::infinity() : lower[i];
  }

  void validate() const {
    if (entrance.empty()) throw ConfigError("avoiding ensemble needs at least one curve");
    if (entrance.size() != exit.size()) throw ConfigError("entrance and exit data must have the same length");
    if (!(grid.step > 0.0) || grid.intervals < 1) throw ConfigError("grid must have positive step");
    const std::size_t g = grid.points();
    if (!upper.empty() && upper.size() != g) throw ConfigError("upper barrier must be sampled on every grid point");
    if (!lower.empty() && lower.size() != g) throw ConfigError("lower barrier must be sampled on every grid point");
    auto strictly_ordered = [&](const std::vector<double>& v, std::size_t idx) {
      if (!(upper_at(idx) > v.front())) return false;
      for (std::size_t c = 1; c < v.size(); ++c)
        if (!(v[c - 1] > v[c])) return false;
      return v.back() > lower_at(idx);
    };
    if (!strictly_ordered(entrance, 0)) {
      throw ConfigError("entrance data must satisfy f(a) > x_1 > ... > x_k > g(a)");
    }
    if (!strictly_ordered(exit, grid.intervals)) {
      throw ConfigError("exit data must satisfy f(b) > y_1 > ... > y_k > g(b)");
    }
  }
};

/// k curves on the grid, stored curve-major.
struct PathEnsemble {
  AvoidingSpec spec;
  std::vector<double> values;

  std::size_t curves() const { return spec.curves(); }
  std::size_t points() const { return spec.grid.points(); }
  double& at(std::size_t curve, std::size_t i) { return values[curve * points() + i]; }
  double at(std::size_t curve, std::size_t i) const { return values[curve * points() + i]; }
  std::span<const double> curve(std::size_t c) const { return {values.data() + c * points(), points()}; }

  /// Strict ordering f > curve_1 > ... > curve_k > g at every grid time.
  bool ordered() const {
    for (std::size_t i = 0; i < points(); ++i) {
      double above = spec.upper_at(i);
      for (std::size_t c = 0; c < curves(); ++c) {
        if (!(above > at(c, i))) return false;
        above = at(c, i);
      }
      if (!(above > spec.lower_at(i))) return false;
    }
    return true;
  }

  bool endpoints_match() const {
    for (std::size_t c = 0; c < curves(); ++c) {
      if (at(c, 0) != spec.entrance[c] || at(c, spec.grid.intervals) != spec.exit[c]) return false;
    }
    return true;
  }
};

namespace detail {

// One step of the sequential bridge construction from index i to i + 1.
inline double bridge_step(double current, double target, std::size_t i, std::size_t intervals, double step,
                          RngStream& rng) {
  const std::size_t left = intervals - i;
  if (left == 1) return target;
  const double frac = 1.0 / static_cast<double>(left);
  const double mean = current + (target - current) * frac;
  const double var = step * (1.0 - frac);
  return mean + std::sqrt(var) * rng.normal();
}

}  // namespace detail

/// Brownian bridge from x to y on the grid, exact at grid times.
inline std::vector<double> sample_bridge(double x, double y, const UniformGrid& grid, RngStream& rng) {
  if (grid.intervals < 1) throw ConfigError("sample_bridge: grid must have at least two points");
  std::vector<double> path(grid.points());
  path[0] = x;
  for (std::size_t i = 0; i < grid.intervals; ++i) {
    path[i + 1] = detail::bridge_step(path[i], y, i, grid.intervals, grid.step, rng);
  }
  return path;
}

enum class SamplingMethod { rejection, mcmc };

struct McmcOptions {
  std::size_t burn_in_sweeps = 100000;
  std::size_t thinning = 10;
  bool adapt_thinning = true;  // raise thinning to >= 2 tau from a pilot run
  std::size_t pilot_sweeps = 20000;
};

namespace detail {

// One rejection attempt: all curves advance together in time and the attempt
// stops at the first ordering violation.
inline bool rejection_attempt(const AvoidingSpec& spec, RngStream& rng, std::vector<double>& out) {
  const std::size_t k = spec.curves();
  const std::size_t pts = spec.grid.points();
  out.resize(k * pts);
  for (std::size_t c = 0; c < k; ++c) out[c * pts] = spec.entrance[c];
  for (std::size_t i = 0; i < spec.grid.intervals; ++i) {
    double above = spec.upper_at(i + 1);
    for (std::size_t c = 0; c < k; ++c) {
      const double v = bridge_step(out[c * pts + i], spec.exit[c], i, spec.grid.intervals, spec.grid.step, rng);
      out[c * pts + i + 1] = v;
      if (!(above > v)) return false;
      above = v;
    }
    if (!(above > spec.lower_at(i + 1))) return false;
  }
  return true;
}

}  // namespace detail

inline constexpr double kMinRejectionAcceptance = 1e-6;
inline constexpr std::size_t kPilotAttempts = 2000000;

struct AcceptanceEstimate {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  double rate() const { return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts); }
};

/// Pilot estimate of the rejection acceptance probability; stops early once
/// `target_accepts` successes are seen.
inline AcceptanceEstimate estimate_acceptance(const AvoidingSpec& spec, RngStream& rng,
                                              std::size_t max_attempts = kPilotAttempts,
                                              std::size_t target_accepts = 200) {
  spec.validate();
  AcceptanceEstimate est;
  std::vector<double> buffer;
  while (est.attempts < max_attempts && est.accepted < target_accepts) {
    ++est.attempts;
    if (detail::rejection_attempt(spec, rng, buffer)) ++est.accepted;
  }
  return est;
}

/// One exact (on the grid) draw by rejection; `attempts` receives the number
/// of tries used.
inline PathEnsemble sample_rejection(const AvoidingSpec& spec, RngStream& rng, std::size_t* attempts = nullptr,
                                     std::size_t max_attempts = 50000000) {
  PathEnsemble ens{spec, {}};
  for (std::size_t t = 1; t <= max_attempts; ++t) {
    if (detail::rejection_attempt(spec, rng, ens.values)) {
      if (attempts) *attempts = t;
      return ens;
    }
  }
  throw InfeasibleError("rejection sampling exhausted its attempt budget; use the mcmc method");
}

/// Single-site Metropolis chain. Each update redraws one interior value from
/// the Brownian-bridge conditional given its two time neighbours and accepts
/// it iff the strict ordering is preserved.
class McmcChain {
 public:
  McmcChain(AvoidingSpec spec, RngStream rng) : state_{std::move(spec), {}}, rng_(std::move(rng)) {
    state_.spec.validate();
    const AvoidingSpec& s = state_.spec;
    const std::size_t pts = s.grid.points();
    state_.values.resize(s.curves() * pts);
    for (std::size_t c = 0; c < s.curves(); ++c) {
      for (std::size_t i = 0; i < pts; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(s.grid.intervals);
        state_.at(c, i) = (1.0 - u) * s.entrance[c] + u * s.exit[c];
      }
      state_.at(c, s.grid.intervals) = s.exit[c];
    }
    if (!state_.ordered()) {
      throw ConfigError("mcmc: linear interpolation of the boundary data violates the barriers");
    }
  }

  void sweep() {
    const AvoidingSpec& s = state_.spec;
    const double sd = std::sqrt(0.5 * s.grid.step);
    for (std::size_t c = 0; c < s.curves(); ++c) {
      for (std::size_t i = 1; i < s.grid.intervals; ++i) {
        const double proposal = 0.5 * (state_.at(c, i - 1) + state_.at(c, i + 1)) + sd * rng_.normal();
        const double above = c == 0 ? s.upper_at(i) : state_.at(c - 1, i);
        const double below = c + 1 == s.curves() ? s.lower_at(i) : state_.at(c + 1, i);
        ++proposals_;
        if (above > proposal && proposal > below) {
          state_.at(c, i) = proposal;
          ++accepted_;
        }
      }
    }
  }

  void run(std::size_t sweeps) {
    for (std::size_t k = 0; k < sweeps; ++k) sweep();
  }

  const PathEnsemble& state() const { return state_; }
  double acceptance_rate() const {
    return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
  }

 private:
  PathEnsemble state_;
  RngStream rng_;
  std::size_t proposals_ = 0;
  std::size_t accepted_ = 0;
};

struct EnsembleBatch {
  std::vector<PathEnsemble> samples;
  SamplingMethod method = SamplingMethod::rejection;
  double acceptance_rate = 0.0;         // rejection: accepted / attempts; mcmc: Metropolis rate
  double autocorrelation_time = 0.0;    // mcmc pilot, in sweeps
  std::size_t thinning = 0;             // mcmc sweeps between samples
  std::size_t burn_in = 0;
};

/// `count` ensembles. Rejection draws are independent, sample s using stream
/// (seed, s); the mcmc batch is one chain on stream (seed, 0).
inline EnsembleBatch sample_avoiding_ensembles(const AvoidingSpec& spec, std::size_t count, std::uint64_t seed,
                                               SamplingMethod method, const McmcOptions& mcmc = {},
                                               unsigned threads = default_threads()) {
  spec.validate();
  EnsembleBatch batch;
  batch.method = method;
  if (method == SamplingMethod::rejection) {
    RngStream pilot_rng(seed, std::numeric_limits<std::uint64_t>::max());
    const AcceptanceEstimate pilot = estimate_acceptance(spec, pilot_rng);
    if (pilot.rate() < kMinRejectionAcceptance) {
      throw InfeasibleError("rejection acceptance probability estimated at " + std::to_string(pilot.rate()) +
                            " (< 1e-6) over a pilot of " + std::to_string(pilot.attempts) +
                            " attempts; use the mcmc method");
    }
    batch.samples.resize(count);
    std::vector<std::size_t> attempts(count, 0);
    parallel_for(count, threads, [&](std::size_t s) {
      RngStream rng(seed, s);
      batch.samples[s] = sample_rejection(spec, rng, &attempts[s]);
    });
    std::size_t total = 0;
    for (std::size_t a : attempts) total += a;
    batch.acceptance_rate = total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
    return batch;
  }
  McmcChain chain(spec, RngStream(seed, 0));
  chain.run(mcmc.burn_in_sweeps);
  batch.burn_in = mcmc.burn_in_sweeps;
  batch.thinning = std::max<std::size_t>(1, mcmc.thinning);
  if (mcmc.adapt_thinning && mcmc.pilot_sweeps > 0) {
    std::vector<double> trace;
    trace.reserve(mcmc.pilot_sweeps);
    const std::size_t mid = spec.grid.intervals / 2;
    for (std::size_t k = 0; k < mcmc.pilot_sweeps; ++k) {
      chain.sweep();
      trace.push_back(chain.state().at(0, mid));
    }
    batch.autocorrelation_time = integrated_autocorrelation_time(trace);
    batch.thinning = std::max(batch.thinning, static_cast<std::size_t>(std::ceil(2.0 * batch.autocorrelation_time)));
  }
  batch.samples.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    chain.run(batch.thinning);
    batch.samples.push_back(chain.state());
  }
  batch.acceptance_rate = chain.acceptance_rate();
  return batch;
}

/// One ensemble from the avoiding law. The mcmc variant runs a fresh chain
/// through its burn-in and returns the final state.
inline PathEnsemble sample_avoiding_ensemble(const AvoidingSpec& spec, RngStream& rng, SamplingMethod method,
                                             const McmcOptions& mcmc = {}) {
  spec.validate();
  if (method == SamplingMethod::rejection) {
    RngStream pilot_rng(rng.seed() ^ 0x9e3779b97f4a7c15ull, rng.stream());
    const AcceptanceEstimate pilot = estimate_acceptance(spec, pilot_rng, kPilotAttempts, 20);
    if (pilot.rate() < kMinRejectionAcceptance) {
      throw InfeasibleError("rejection acceptance probability below 1e-6; use the mcmc method");
    }
    return sample_rejection(spec, rng);
  }
  McmcChain chain(spec, RngStream(rng.seed(), rng.stream()));
  chain.run(mcmc.burn_in_sweeps);
  return chain.state();
}

/// Resampling window: curves [first_curve, last_curve] (0-based, inclusive)
/// on grid indices [left, right], both endpoints held fixed.
struct GibbsWindow {
  std::size_t first_curve = 0;
  std::size_t last_curve = 0;
  std::size_t left = 0;
  std::size_t right = 0;

  std::size_t center() const { return (left + right) / 2; }

  bool contains(std::size_t curve, std::size_t i) const {
    return curve >= first_curve && curve <= last_curve && i > left && i < right;
  }

  void validate(const PathEnsemble& ens) const {
    if (first_curve > last_curve || last_curve >= ens.curves()) throw ConfigError("window curves out of range");
    if (!(left < right) || right > ens.spec.grid.intervals || right - left < 2) {
      throw ConfigError("window must contain an interior grid point inside the ensemble domain");
    }
  }
};

/// Redraws the window curves from the avoiding law given everything outside
/// the window: entrance/exit are the current values at the window ends, the
/// barriers are the neighbouring curves (or the ensemble's own f, g). Values
/// outside the window are not touched.
inline void resample_window(PathEnsemble& ens, const GibbsWindow& w, RngStream& rng,
                            std::size_t* attempts = nullptr) {
  w.validate(ens);
  AvoidingSpec sub;
  sub.grid = {ens.spec.grid.time(w.left), ens.spec.grid.step, w.right - w.left};
  for (std::size_t c = w.first_curve; c <= w.last_curve; ++c) {
    sub.entrance.push_back(ens.at(c, w.left));
    sub.exit.push_back(ens.at(c, w.right));
  }
  const std::size_t pts = sub.grid.points();
  if (w.first_curve > 0 || !ens.spec.upper.empty()) {
    sub.upper.resize(pts);
    for (std::size_t i = 0; i < pts; ++i) {
      sub.upper[i] = w.first_curve > 0 ? ens.at(w.first_curve - 1, w.left + i) : ens.spec.upper_at(w.left + i);
    }
  }
  if (w.last_curve + 1 < ens.curves() || !ens.spec.lower.empty()) {
    sub.lower.resize(pts);
    for (std::size_t i = 0; i < pts; ++i) {
      sub.lower[i] = w.last_curve + 1 < ens.curves() ? ens.at(w.last_curve + 1, w.left + i)
                                                     : ens.spec.lower_at(w.left + i);
    }
  }
  const PathEnsemble fresh = sample_rejection(sub, rng, attempts);
  for (std::size_t c = w.first_curve; c <= w.last_curve; ++c) {
    for (std::size_t i = w.left + 1; i < w.right; ++i) ens.at(c, i) = fresh.at(c - w.first_curve, i - w.left);
  }
}

struct GibbsReport {
  std::size_t samples = 0;
  double ks_stat = 0.0;          // original vs once-resampled, curve first_curve at window centre
  double p_value = 1.0;
  double ks_stat_repeat = 0.0;   // once vs twice resampled
  double p_value_repeat = 1.0;
  double acceptance_rate = 0.0;  // of the rejection draws inside the window
  std::size_t ordering_violations = 0;
  std::size_t outside_window_mismatches = 0;
  double window_center_time = 0.0;
};

/// Draws `samples` ensembles by rejection, resamples the window of each once
/// and then once more, and compares the window-centre marginal of the first
/// window curve across the three stages with two-sample KS tests. Sample s
/// uses streams (seed, 3s), (seed, 3s+1), (seed, 3s+2).
inline GibbsReport gibbs_resample_check(const AvoidingSpec& spec, const GibbsWindow& window, std::size_t samples,
                                        std::uint64_t seed, unsigned threads = default_threads()) {
  spec.validate();
  if (samples < 2) throw ConfigError("gibbs check needs at least two samples");
  std::vector<double> before(samples), once(samples), twice(samples);
  std::vector<std::size_t> attempts(samples, 0), violations(samples, 0), mismatches(samples, 0);
  const std::size_t centre = window.center();
  parallel_for(samples, threads, [&](std::size_t s) {
    RngStream draw(seed, 3 * s);
    PathEnsemble ens = sample_rejection(spec, draw);
    window.validate(ens);
    const PathEnsemble original = ens;
    RngStream first(seed, 3 * s + 1);
    resample_window(ens, window, first, &attempts[s]);
    for (std::size_t c = 0; c < ens.curves(); ++c)
      for (std::size_t i = 0; i < ens.points(); ++i)
        if (!window.contains(c, i) && ens.at(c, i) != original.at(c, i)) ++mismatches[s];
    if (!ens.ordered()) ++violations[s];
    before[s] = original.at(window.first_curve, centre);
    once[s] = ens.at(window.first_curve, centre);
    RngStream second(seed, 3 * s + 2);
    resample_window(ens, window, second);
    if (!ens.ordered()) ++violations[s];
    twice[s] = ens.at(window.first_curve, centre);
  });
  GibbsReport report;
  report.samples = samples;
  const KsResult ks = ks_two_sample(before, once);
  report.ks_stat = ks.statistic;
  report.p_value = ks.p_value;
  const KsResult ks2 = ks_two_sample(once, twice);
  report.ks_stat_repeat = ks2.statistic;
  report.p_value_repeat = ks2.p_value;
  std::size_t total_attempts = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    total_attempts += attempts[s];
    report.ordering_violations += violations[s];
    report.outside_window_mismatches += mismatches[s];
  }
  report.acceptance_rate = static_cast<double>(samples) / static_cast<double>(total_attempts);
  report.window_center_time = spec.grid.time(centre);
  return report;
}

enum class ParabolicDirection { to_gibbs, to_airy };

/// L(x) = (A(x) - x^2)/sqrt(2) + c (to_gibbs) or its inverse
/// A(x) = sqrt(2)(L(x) - c) + x^2 (to_airy), pointwise at the given times.
inline std::vector<double> parabolic_shift(std::span<const double> values, std::span<const double> times,
                                           ParabolicDirection direction, double c = 0.0) {
  if (values.size() != times.size()) throw ConfigError("parabolic_shift: values and times differ in length");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x2 = times[i] * times[i];
    out[i] = direction == ParabolicDirection::to_gibbs ? (values[i] - x2) / std::numbers::sqrt2 + c
                                                       : std::numbers::sqrt2 * (values[i] - c) + x2;
  }
  return out;
}

inline std::vector<double> parabolic_shift(std::span<const double> values, const UniformGrid& grid,
                                           ParabolicDirection direction, double c = 0.0) {
  std::vector<double> times(grid.points());
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = grid.time(i);
  return parabolic_shift(values, times, direction, c);
}

}  // namespace airyline
