#pragma once

// Strong-mixing diagnostics for the Airy line ensemble.
//
// A base configuration on times t_1 < ... < t_m is joined with a copy shifted
// by T. The remainder
//
//   R(z, T) = det(I - [QK]_{1..2m}) - det(I - [QK]_{1..m}) det(I - [QK]_{m+1..2m})
//
// measures how far the joint generating function is from factorising. All
// three determinants come from one discretisation of the joint operator (the
// two factors are principal submatrices), so discretisation error cancels
// coherently and small R stays measurable.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "airyline/errors.hpp"
#include "airyline/fredholm.hpp"
#include "airyline/kernels.hpp"
#include "airyline/parallel.hpp"
#include "airyline/quadrature.hpp"

namespace airyline {

struct DecayCurve {
  std::vector<double> parameter;
  std::vector<double> magnitude;

  void push(double p, double m) {
    if (!parameter.empty() && !(p > parameter.back())) {
      throw DomainError("DecayCurve: parameters must be strictly increasing");
    }
    if (!(m >= 0.0)) throw DomainError("DecayCurve: magnitudes must be nonnegative");
    parameter.push_back(p);
    magnitude.push_back(m);
  }
  std::size_t size() const { return parameter.size(); }

  /// Least-squares slope of log(magnitude) against log(parameter) over the
  /// points where both are positive. NaN with fewer than two such points.
  double log_log_slope() const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (parameter[i] <= 0.0 || magnitude[i] <= 0.0) continue;
      const double lx = std::log(parameter[i]);
      const double ly = std::log(magnitude[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double nd = static_cast<double>(n);
    return (nd * sxy - sx * sy) / (nd * sxx - sx * sx);
  }
};

struct MixingExperiment {
  CountingConfig base;
  std::vector<double> shifts;
  // Weights for the shifted copy, flattened in the base configuration's
  // (time, interval) order. Empty means "same as the base copy".
  std::vector<complex_t> shifted_weights;

  double span() const {
    return base.empty() ? 0.0 : base.times().back() - base.times().front();
  }

  void check_shift(double shift) const {
    if (base.empty()) throw DomainError("mixing: base configuration is empty");
    if (!std::isfinite(shift) || !(shift > span())) {
      throw DomainError("mixing: shift T = " + std::to_string(shift) +
                        " must exceed the base time span " + std::to_string(span()));
    }
  }

  /// The 2m-time configuration: base times followed by base times + shift.
  CountingConfig joint_config(double shift) const {
    check_shift(shift);
    std::vector<IntervalSpec> all = base.flattened();
    const std::size_t m = all.size();
    if (!shifted_weights.empty() && shifted_weights.size() != m) {
      throw ConfigError("mixing: shifted_weights must have one entry per base interval");
    }
    for (std::size_t k = 0; k < m; ++k) {
      IntervalSpec copy = all[k];
      copy.time += shift;
      if (!shifted_weights.empty()) copy.weight_z = shifted_weights[k];
      all.push_back(copy);
    }
    return CountingConfig::from_intervals(all);
  }
};

struct MixingPoint {
  double shift = 0.0;
  complex_t remainder{};
  complex_t det_joint{1.0, 0.0};
  complex_t det_left{1.0, 0.0};
  complex_t det_right{1.0, 0.0};
  double error_estimate = 0.0;
  std::size_t nodes_used = 0;
};

/// R(z, T) with the two factor determinants taken from the joint
/// discretisation, converged by node doubling on (R, joint, left, right).
inline MixingPoint mixing_remainder(const MixingExperiment& experiment, double shift,
                                    const FredholmOptions& opts = {}) {
  const CountingConfig joint = experiment.joint_config(shift);
  const std::size_t m = experiment.base.time_count();
  MixingPoint point;
  point.shift = shift;
  if (joint.all_weights_one()) {
    point.remainder = complex_t(1.0, 0.0) - complex_t(1.0, 0.0) * complex_t(1.0, 0.0);
    return point;
  }
  auto res = detail::converge_over_nodes(joint, opts, [&](const BlockKernelMatrix& mat) {
    const complex_t full = fredholm_det(mat);
    const complex_t left = fredholm_det(mat.principal(0, m));
    const complex_t right = fredholm_det(mat.principal(m, 2 * m));
    return std::vector<complex_t>{full - left * right, full, left, right};
  });
  point.remainder = res.values[0];
  point.det_joint = res.values[1];
  point.det_left = res.values[2];
  point.det_right = res.values[3];
  point.error_estimate = res.error_estimate;
  point.nodes_used = res.nodes_used;
  return point;
}

struct MixingSweep {
  DecayCurve curve;                 // (T, |R|)
  std::vector<MixingPoint> points;  // full audit record per shift
  double log_log_slope = 0.0;       // fitted, not asserted
};

/// |R(z, T)| over the experiment's shifts. Shifts are evaluated concurrently;
/// results are stored by shift index.
inline MixingSweep mixing_sweep(const MixingExperiment& experiment, const FredholmOptions& opts = {}) {
  if (experiment.shifts.size() < 3) throw DomainError("mixing_sweep: need at least 3 shift values");
  for (std::size_t k = 0; k < experiment.shifts.size(); ++k) {
    experiment.check_shift(experiment.shifts[k]);
    if (k > 0 && !(experiment.shifts[k] > experiment.shifts[k - 1])) {
      throw DomainError("mixing_sweep: shifts must be strictly increasing");
    }
  }
  MixingSweep sweep;
  sweep.points.resize(experiment.shifts.size());
  FredholmOptions inner = opts;
  const unsigned outer_threads = std::max(1u, opts.threads);
  inner.threads = 1;
  parallel_for(experiment.shifts.size(), outer_threads, [&](std::size_t k) {
    sweep.points[k] = mixing_remainder(experiment, experiment.shifts[k], inner);
  });
  for (const auto& p : sweep.points) sweep.curve.push(p.shift, std::abs(p.remainder));
  sweep.log_log_slope = sweep.curve.log_log_slope();
  return sweep;
}

/// Cov(N_I, N_J) for I at time 0 and J at time `shift`, from the joint count
/// law obtained by two-dimensional Fourier inversion. For the same interval
/// at the same time this is Var(N_I), taken from the one-dimensional law.
inline double count_covariance(IntervalSpec first, IntervalSpec second, double shift, std::size_t k_max = 12,
                               const FredholmOptions& opts = {}) {
  first.time = 0.0;
  second.time = shift;
  first.weight_z = second.weight_z = {0.0, 0.0};
  first.validate();
  second.validate();
  if (shift == 0.0 && first.lower == second.lower && first.upper == second.upper) {
    const auto p = count_distribution(CountingConfig::from_intervals({first}), {0, 0}, k_max, opts);
    double mean = 0.0, second_moment = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      mean += static_cast<double>(k) * p[k];
      second_moment += static_cast<double>(k * k) * p[k];
    }
    return second_moment - mean * mean;
  }
  const CountingConfig cfg = CountingConfig::from_intervals({first, second});
  IntervalHandle a{0, 0};
  IntervalHandle b = cfg.time_count() == 1 ? IntervalHandle{0, 1} : IntervalHandle{1, 0};
  if (shift < 0.0) std::swap(a, b);
  const auto joint = joint_count_distribution(cfg, a, b, k_max, opts);
  double ea = 0.0, eb = 0.0, eab = 0.0;
  for (std::size_t k = 0; k < joint.size(); ++k) {
    for (std::size_t l = 0; l < joint[k].size(); ++l) {
      const double p = joint[k][l];
      ea += static_cast<double>(k) * p;
      eb += static_cast<double>(l) * p;
      eab += static_cast<double>(k * l) * p;
    }
  }
  return eab - ea * eb;
}

namespace detail {

// Nystrom matrix sqrt(w_i) S(x_i, x_j) sqrt(w_j) of the semigroup-weighted
// projection on [a, a + length].
inline Eigen::MatrixXd semigroup_operator_matrix(double a, double y, ProjectionSide side, double length,
                                                 std::size_t nodes, unsigned threads) {
  const QuadratureRule rule = map_to(gauss_legendre(nodes), a, a + length);
  // negative side: K(y, x; 0, x'); positive side: -K(0, x; y, x').
  Eigen::MatrixXd k = side == ProjectionSide::negative
                          ? k2_ext_matrix(y, 0.0, rule.nodes, rule.nodes, threads)
                          : Eigen::MatrixXd(-k2_ext_matrix(0.0, y, rule.nodes, rule.nodes, threads));
  Eigen::VectorXd sw(static_cast<Eigen::Index>(nodes));
  for (std::size_t i = 0; i < nodes; ++i) sw(static_cast<Eigen::Index>(i)) = std::sqrt(rule.weights[i]);
  return sw.asDiagonal() * k * sw.asDiagonal();
}

inline Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
  return svd.singularValues();
}

}  // namespace detail

/// Discrete trace norm (sum of singular values) of the semigroup-weighted
/// projection compressed to [a, a + length] in both variables.
inline double trace_norm_offdiag(double a, double y, ProjectionSide side, double length = 12.0,
                                 std::size_t nodes = 96, unsigned threads = default_threads()) {
  if (!std::isfinite(a)) throw DomainError("trace_norm_offdiag: a must be finite");
  if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("trace_norm_offdiag: y must be positive");
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("trace_norm_offdiag: length must be positive");
  if (nodes < 4 || nodes > kMaxGaussLegendreOrder) throw DomainError("trace_norm_offdiag: nodes outside [4, 2048]");
  return detail::singular_values(detail::semigroup_operator_matrix(a, y, side, length, nodes, threads)).sum();
}

/// (y, trace norm) over a ladder of y values.
inline DecayCurve trace_norm_sweep(double a, const std::vector<double>& ys, ProjectionSide side,
                                   double length = 12.0, std::size_t nodes = 96,
                                   unsigned threads = default_threads()) {
  std::vector<double> norms(ys.size());
  parallel_for(ys.size(), threads, [&](std::size_t k) { norms[k] = trace_norm_offdiag(a, ys[k], side, length, nodes, 1); });
  DecayCurve curve;
  for (std::size_t k = 0; k < ys.size(); ++k) curve.push(ys[k], norms[k]);
  return curve;
}

/// Largest singular value of the discretised block (i, j) of a configuration
/// (without the (1 - z) factor), i.e. the operator norm of K(t_i, .; t_j, .)
/// restricted to the intervals at those times.
inline double block_operator_norm(const CountingConfig& config, std::size_t i, std::size_t j,
                                  std::size_t nodes_per_interval = 48, unsigned threads = default_threads()) {
  const BlockKernelMatrix m = build_block_matrix(config, nodes_per_interval, 1e-10, threads);
  const auto& off = m.time_offsets();
  if (i >= m.time_count() || j >= m.time_count()) throw DomainError("block_operator_norm: block out of range");
  const Eigen::MatrixXd b = m.weighted_kernel().block(static_cast<Eigen::Index>(off[i]), static_cast<Eigen::Index>(off[j]),
                                                      static_cast<Eigen::Index>(off[i + 1] - off[i]),
                                                      static_cast<Eigen::Index>(off[j + 1] - off[j]));
  return detail::singular_values(b)(0);
}

}  // namespace airyline
