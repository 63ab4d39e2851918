#pragma once

// Fredholm determinants of the extended Airy_2 kernel on finite unions of
// space intervals at finitely many times.
//
// For times t_1 < ... < t_n with intervals I_i^j and weights z_i^j,
//
//   E[ prod_{i,j} (z_i^j)^{N(I_i^j)} ] = det(I - Q K)
//
// where Q multiplies by (1 - z_i^j) on I_i^j. Each interval gets its own
// Gauss-Legendre rule; the discretised operator has entries
//
//   (1 - z_row) sqrt(w_p) K(t_i, x_p; t_j, x_q) sqrt(w_q)
//
// which is similar to the plain Nystrom matrix, so the determinant agrees.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "airyline/errors.hpp"
#include "airyline/kernels.hpp"
#include "airyline/parallel.hpp"
#include "airyline/quadrature.hpp"

namespace airyline {

using complex_t = std::complex<double>;

/// Intervals grouped by distinct time, times strictly increasing. Within a time
/// the intervals keep the order in which they were supplied, so (time index,
/// interval index) pairs are stable handles.
class CountingConfig {
 public:
  CountingConfig() = default;

  /// Groups intervals by time (equal times are merged), sorts the times and
  /// enforces the interval invariants. Throws ConfigError on violation.
  static CountingConfig from_intervals(const std::vector<IntervalSpec>& intervals) {
    CountingConfig cfg;
    for (const IntervalSpec& iv : intervals) {
      iv.validate();
      auto it = std::lower_bound(cfg.times_.begin(), cfg.times_.end(), iv.time);
      const auto idx = static_cast<std::size_t>(it - cfg.times_.begin());
      if (it == cfg.times_.end() || *it != iv.time) {
        cfg.times_.insert(it, iv.time);
        cfg.intervals_.insert(cfg.intervals_.begin() + static_cast<std::ptrdiff_t>(idx), std::vector<IntervalSpec>{});
      }
      cfg.intervals_[idx].push_back(iv);
    }
    cfg.check_disjoint();
    return cfg;
  }

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<IntervalSpec>>& intervals() const { return intervals_; }
  std::size_t time_count() const { return times_.size(); }
  bool empty() const { return times_.empty(); }

  std::size_t interval_count() const {
    std::size_t n = 0;
    for (const auto& v : intervals_) n += v.size();
    return n;
  }

  /// M0 = -inf of all lower endpoints; finite for every valid configuration.
  double m0() const {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& v : intervals_)
      for (const auto& iv : v) lowest = std::min(lowest, iv.lower);
    return -lowest;
  }

  bool all_weights_one() const {
    for (const auto& v : intervals_)
      for (const auto& iv : v)
        if (iv.weight_z != complex_t(1.0, 0.0)) return false;
    return true;
  }

  bool all_weights_zero() const {
    for (const auto& v : intervals_)
      for (const auto& iv : v)
        if (iv.weight_z != complex_t(0.0, 0.0)) return false;
    return true;
  }

  std::vector<IntervalSpec> flattened() const {
    std::vector<IntervalSpec> out;
    for (const auto& v : intervals_) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  CountingConfig shifted(double c) const {
    CountingConfig out = *this;
    for (double& t : out.times_) t += c;
    for (auto& v : out.intervals_)
      for (auto& iv : v) iv.time += c;
    return out;
  }

  CountingConfig with_weight(std::size_t time_index, std::size_t interval_index, complex_t z) const {
    check_target(time_index, interval_index);
    CountingConfig out = *this;
    out.intervals_[time_index][interval_index].weight_z = z;
    out.intervals_[time_index][interval_index].validate();
    return out;
  }

  void check_target(std::size_t time_index, std::size_t interval_index) const {
    if (time_index >= times_.size() || interval_index >= intervals_[time_index].size()) {
      throw ConfigError("interval handle (" + std::to_string(time_index) + ", " +
                        std::to_string(interval_index) + ") does not exist");
    }
  }

 private:
  void check_disjoint() const {
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
      std::vector<std::size_t> order(intervals_[i].size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      const auto& ivs = intervals_[i];
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return ivs[a].lower < ivs[b].lower; });
      for (std::size_t k = 1; k < order.size(); ++k) {
        const IntervalSpec& a = ivs[order[k - 1]];
        const IntervalSpec& b = ivs[order[k]];
        if (b.lower < a.upper) {
          std::ostringstream msg;
          msg << "intervals at time " << times_[i] << " must be pairwise disjoint: (" << a.lower << ", "
              << a.upper << ") overlaps (" << b.lower << ", " << b.upper << ")";
          throw ConfigError(msg.str());
        }
      }
    }
  }

  std::vector<double> times_;
  std::vector<std::vector<IntervalSpec>> intervals_;
};

struct NodeInfo {
  std::size_t time_index = 0;
  std::size_t interval_index = 0;
  std::size_t node_index = 0;
  double x = 0.0;
  double weight = 0.0;
};

/// Discretised Q K on all quadrature nodes of a configuration. Rows and
/// columns are ordered by time, then interval, then node, so block (i, j) is a
/// contiguous submatrix.
class BlockKernelMatrix {
 public:
  BlockKernelMatrix() = default;
  BlockKernelMatrix(Eigen::MatrixXd kernel, std::vector<complex_t> row_factor,
                    std::vector<std::size_t> time_offsets, std::vector<NodeInfo> nodes)
      : kernel_(std::move(kernel)),
        row_factor_(std::move(row_factor)),
        time_offsets_(std::move(time_offsets)),
        nodes_(std::move(nodes)) {}

  std::size_t dimension() const { return nodes_.size(); }
  std::size_t time_count() const { return time_offsets_.empty() ? 0 : time_offsets_.size() - 1; }
  bool symmetrized() const { return true; }
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const std::vector<std::size_t>& time_offsets() const { return time_offsets_; }
  const std::vector<complex_t>& row_factors() const { return row_factor_; }

  /// sqrt(w_p) K sqrt(w_q) before the (1 - z) row scaling.
  const Eigen::MatrixXd& weighted_kernel() const { return kernel_; }

  bool real_weights() const {
    return std::all_of(row_factor_.begin(), row_factor_.end(), [](complex_t f) { return f.imag() == 0.0; });
  }

  complex_t entry(std::size_t row, std::size_t col) const {
    return row_factor_[row] * kernel_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  Eigen::MatrixXcd matrix() const {
    Eigen::MatrixXcd m = kernel_.cast<complex_t>();
    for (std::size_t r = 0; r < row_factor_.size(); ++r) m.row(static_cast<Eigen::Index>(r)) *= row_factor_[r];
    return m;
  }

  Eigen::MatrixXcd block(std::size_t i, std::size_t j) const {
    const Eigen::MatrixXcd full = matrix();
    return full.block(off(i), off(j), off(i + 1) - off(i), off(j + 1) - off(j));
  }

  /// Principal submatrix on times [first, last): the discretisation of the
  /// same operator restricted to those times, on identical nodes.
  BlockKernelMatrix principal(std::size_t first, std::size_t last) const {
    if (first > last || last > time_count()) throw DomainError("principal: bad time range");
    const std::size_t r0 = time_offsets_[first];
    const std::size_t r1 = time_offsets_[last];
    const auto len = static_cast<Eigen::Index>(r1 - r0);
    std::vector<std::size_t> offsets;
    for (std::size_t i = first; i <= last; ++i) offsets.push_back(time_offsets_[i] - r0);
    std::vector<NodeInfo> nodes(nodes_.begin() + static_cast<std::ptrdiff_t>(r0),
                                nodes_.begin() + static_cast<std::ptrdiff_t>(r1));
    for (auto& n : nodes) n.time_index -= first;
    return {kernel_.block(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(r0), len, len),
            std::vector<complex_t>(row_factor_.begin() + static_cast<std::ptrdiff_t>(r0),
                                   row_factor_.begin() + static_cast<std::ptrdiff_t>(r1)),
            std::move(offsets), std::move(nodes)};
  }

  /// Same discretisation with the weights of `config` (which must have the
  /// same interval layout) in the row factors.
  BlockKernelMatrix reweighted(const CountingConfig& config) const {
    BlockKernelMatrix out = *this;
    for (std::size_t r = 0; r < nodes_.size(); ++r) {
      const NodeInfo& n = nodes_[r];
      config.check_target(n.time_index, n.interval_index);
      out.row_factor_[r] = complex_t(1.0, 0.0) - config.intervals()[n.time_index][n.interval_index].weight_z;
    }
    return out;
  }

  bool operator==(const BlockKernelMatrix& o) const {
    return kernel_.rows() == o.kernel_.rows() && kernel_.cols() == o.kernel_.cols() &&
           std::equal(kernel_.data(), kernel_.data() + kernel_.size(), o.kernel_.data()) &&
           row_factor_ == o.row_factor_ && time_offsets_ == o.time_offsets_;
  }

 private:
  Eigen::Index off(std::size_t i) const {
    if (i > time_count()) throw DomainError("block index out of range");
    return static_cast<Eigen::Index>(time_offsets_[i]);
  }

  Eigen::MatrixXd kernel_;
  std::vector<complex_t> row_factor_;
  std::vector<std::size_t> time_offsets_;
  std::vector<NodeInfo> nodes_;
};

struct FredholmOptions {
  double tol = 1e-10;
  std::size_t min_nodes = 16;
  std::size_t max_nodes = kMaxGaussLegendreOrder;
  std::size_t max_dimension = 6144;
  unsigned threads = default_threads();
};

inline constexpr double kMinTolerance = 1e-12;

/// Truncation length for (lower, inf): starts at 8 and doubles until the
/// expected number of points beyond the cut, int K2(x,x) dx, is below tol/10.
inline double certified_truncation_length(double lower, double tol) {
  double length = 8.0;
  while (k2_diagonal_tail(lower + length) >= tol / 10.0) {
    length *= 2.0;
    if (length > 4096.0) throw AccuracyError("truncation length did not certify", 0.0, 0.0, tol);
  }
  return length;
}

/// Assembles the discretised block operator with `nodes_per_interval`
/// Gauss-Legendre nodes on every interval. Semi-infinite intervals are cut at
/// certified_truncation_length(lower, truncation_tol).
inline BlockKernelMatrix build_block_matrix(const CountingConfig& config, std::size_t nodes_per_interval,
                                            double truncation_tol = 1e-10,
                                            unsigned threads = default_threads()) {
  if (nodes_per_interval < 4 || nodes_per_interval > kMaxGaussLegendreOrder) {
    throw ConfigError("nodes_per_interval must lie in [4, 2048]");
  }
  const QuadratureRule& ref = gauss_legendre(nodes_per_interval);
  std::vector<NodeInfo> nodes;
  std::vector<complex_t> factors;
  std::vector<std::size_t> offsets{0};
  std::vector<std::vector<double>> xs_by_time(config.time_count());
  for (std::size_t i = 0; i < config.time_count(); ++i) {
    const auto& ivs = config.intervals()[i];
    for (std::size_t j = 0; j < ivs.size(); ++j) {
      const double length = ivs[j].semi_infinite() ? certified_truncation_length(ivs[j].lower, truncation_tol) : 0.0;
      const QuadratureRule rule = map_interval(ref, ivs[j], length);
      for (std::size_t p = 0; p < rule.size(); ++p) {
        nodes.push_back({i, j, p, rule.nodes[p], rule.weights[p]});
        factors.push_back(complex_t(1.0, 0.0) - ivs[j].weight_z);
        xs_by_time[i].push_back(rule.nodes[p]);
      }
    }
    offsets.push_back(nodes.size());
  }
  const auto dim = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd kernel(dim, dim);
  const auto& times = config.times();
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      const auto r0 = static_cast<Eigen::Index>(offsets[i]);
      const auto c0 = static_cast<Eigen::Index>(offsets[j]);
      const auto nr = static_cast<Eigen::Index>(offsets[i + 1] - offsets[i]);
      const auto nc = static_cast<Eigen::Index>(offsets[j + 1] - offsets[j]);
      if (nr == 0 || nc == 0) continue;
      kernel.block(r0, c0, nr, nc) = k2_ext_matrix(times[i], times[j], xs_by_time[i], xs_by_time[j], threads);
    }
  }
  Eigen::VectorXd sqrt_w(dim);
  for (Eigen::Index r = 0; r < dim; ++r) sqrt_w(r) = std::sqrt(nodes[static_cast<std::size_t>(r)].weight);
  kernel = sqrt_w.asDiagonal() * kernel * sqrt_w.asDiagonal();
  return {std::move(kernel), std::move(factors), std::move(offsets), std::move(nodes)};
}

/// det(I - M) by LU with partial pivoting.
inline complex_t fredholm_det(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw DomainError("fredholm_det: matrix must be square");
  if (!m.allFinite()) throw NumericError("fredholm_det: non-finite matrix entry");
  if (m.rows() == 0) return {1.0, 0.0};
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(m.rows(), m.cols()) - m;
  return a.partialPivLu().determinant();
}

inline double fredholm_det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DomainError("fredholm_det: matrix must be square");
  if (!m.allFinite()) throw NumericError("fredholm_det: non-finite matrix entry");
  if (m.rows() == 0) return 1.0;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.rows(), m.cols()) - m;
  return a.partialPivLu().determinant();
}

/// det(I - QK) of an assembled block matrix. Real row factors keep the whole
/// computation in real arithmetic, so the imaginary part is exactly zero.
inline complex_t fredholm_det(const BlockKernelMatrix& m) {
  if (m.dimension() == 0) return {1.0, 0.0};
  if (m.real_weights()) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(m.dimension()));
    for (std::size_t r = 0; r < m.dimension(); ++r) f(static_cast<Eigen::Index>(r)) = m.row_factors()[r].real();
    const Eigen::MatrixXd scaled = f.asDiagonal() * m.weighted_kernel();
    return {fredholm_det(scaled), 0.0};
  }
  return fredholm_det(m.matrix());
}

struct GenFunValue {
  complex_t value{1.0, 0.0};
  double error_estimate = 0.0;
  std::size_t nodes_used = 0;  // Gauss-Legendre nodes per interval at the final level
};

namespace detail {

inline void check_options(const FredholmOptions& opts) {
  if (!(opts.tol >= kMinTolerance)) throw DomainError("tolerance must be >= 1e-12");
  if (opts.min_nodes < 4 || opts.max_nodes > kMaxGaussLegendreOrder || opts.min_nodes > opts.max_nodes) {
    throw DomainError("node range must satisfy 4 <= min_nodes <= max_nodes <= 2048");
  }
}

struct ConvergedVector {
  std::vector<complex_t> values;
  double error_estimate = 0.0;
  std::size_t nodes_used = 0;
};

// Doubles the per-interval node count until the vector of quantities computed
// by `eval` changes by less than tol in every component.
template <class Eval>
ConvergedVector converge_over_nodes(const CountingConfig& config, const FredholmOptions& opts, Eval&& eval) {
  check_options(opts);
  ConvergedVector out;
  std::vector<complex_t> previous;
  double diff = std::numeric_limits<double>::infinity();
  const std::size_t intervals = std::max<std::size_t>(1, config.interval_count());
  for (std::size_t n = opts.min_nodes; n <= opts.max_nodes; n *= 2) {
    if (n * intervals > opts.max_dimension) break;
    const BlockKernelMatrix m = build_block_matrix(config, n, opts.tol, opts.threads);
    std::vector<complex_t> current = eval(m);
    if (!previous.empty()) {
      diff = 0.0;
      for (std::size_t k = 0; k < current.size(); ++k) diff = std::max(diff, std::abs(current[k] - previous[k]));
      if (diff < opts.tol) return {std::move(current), diff, n};
    }
    previous = std::move(current);
    out.nodes_used = n;
  }
  const complex_t best = previous.empty() ? complex_t{} : previous.front();
  throw AccuracyError("node doubling reached its cap without converging", best.real(), best.imag(), diff);
}

}  // namespace detail

/// E[prod z^N] for the configuration, converged by node doubling.
inline GenFunValue generating_function(const CountingConfig& config, const FredholmOptions& opts = {}) {
  detail::check_options(opts);
  if (config.empty() || config.all_weights_one()) return {{1.0, 0.0}, 0.0, 0};
  auto res = detail::converge_over_nodes(config, opts, [](const BlockKernelMatrix& m) {
    return std::vector<complex_t>{fredholm_det(m)};
  });
  return {res.values.front(), res.error_estimate, res.nodes_used};
}

/// det(I - QK) at each listed per-interval node count, with the successive
/// differences |d_k - d_{k-1}| (differences[0] is 0).
struct DeterminantLadder {
  std::vector<std::size_t> nodes;
  std::vector<complex_t> values;
  std::vector<double> differences;
};

inline DeterminantLadder determinant_ladder(const CountingConfig& config, const std::vector<std::size_t>& nodes,
                                            double truncation_tol = 1e-12, unsigned threads = default_threads()) {
  DeterminantLadder out;
  for (std::size_t n : nodes) {
    out.nodes.push_back(n);
    out.values.push_back(fredholm_det(build_block_matrix(config, n, truncation_tol, threads)));
    out.differences.push_back(out.values.size() == 1 ? 0.0 : std::abs(out.values.back() - out.values[out.values.size() - 2]));
  }
  return out;
}

/// P[no particle in any interval]; requires every weight to be zero.
inline double gap_probability(const CountingConfig& config, const FredholmOptions& opts = {}) {
  if (!config.all_weights_zero()) throw ConfigError("gap_probability: all interval weights must be z = 0");
  const GenFunValue g = generating_function(config, opts);
  if (std::fabs(g.value.imag()) > 1e-10) {
    throw NumericError("gap_probability: determinant has imaginary part " + std::to_string(g.value.imag()));
  }
  return g.value.real();
}

/// Tracy-Widom GUE distribution F2(s) = det(I - K2) on L^2(s, inf).
inline double tracy_widom_f2(double s, FredholmOptions opts = {}) {
  if (!(s >= -10.0 && s <= 10.0)) throw DomainError("tracy_widom_f2: s must lie in [-10, 10]");
  opts.tol = std::min(opts.tol, 1e-10);
  const IntervalSpec iv{0.0, s, std::numeric_limits<double>::infinity(), {0.0, 0.0}};
  return gap_probability(CountingConfig::from_intervals({iv}), opts);
}

namespace detail {

inline std::size_t fourier_size(std::size_t k_max) {
  std::size_t m = 1;
  while (m < 4 * (k_max + 1)) m *= 2;
  return m;
}

// z_k = e^{2 pi i k / m} with the quarter points exact.
inline complex_t root_of_unity(std::size_t k, std::size_t m) {
  if (k == 0) return {1.0, 0.0};
  if (4 * k == m) return {0.0, 1.0};
  if (2 * k == m) return {-1.0, 0.0};
  if (4 * k == 3 * m) return {0.0, -1.0};
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
  return {std::cos(theta), std::sin(theta)};
}

inline void check_probabilities(const std::vector<double>& p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < -1e-8) {
      throw NumericError("count distribution: P[N = " + std::to_string(k) + "] = " + std::to_string(p[k]) +
                         " is negative; resolution insufficient");
    }
  }
}

}  // namespace detail

struct IntervalHandle {
  std::size_t time_index = 0;
  std::size_t interval_index = 0;
};

/// P[N(target) = k], k = 0..k_max, by discrete Fourier inversion of the
/// generating function in the target's weight on the unit circle. The other
/// intervals keep their weights. One discretisation is shared by all circle
/// points at each node level.
inline std::vector<double> count_distribution(const CountingConfig& config, IntervalHandle target,
                                              std::size_t k_max, const FredholmOptions& opts = {}) {
  if (k_max > 64) throw DomainError("count_distribution: k_max must be <= 64");
  config.check_target(target.time_index, target.interval_index);
  const std::size_t m = detail::fourier_size(k_max);
  std::vector<CountingConfig> points;
  points.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    points.push_back(config.with_weight(target.time_index, target.interval_index, detail::root_of_unity(k, m)));
  }
  auto res = detail::converge_over_nodes(config, opts, [&](const BlockKernelMatrix& base) {
    std::vector<complex_t> g(m);
    parallel_for(m, opts.threads, [&](std::size_t k) { g[k] = fredholm_det(base.reweighted(points[k])); });
    std::vector<complex_t> p(k_max + 1);
    for (std::size_t j = 0; j <= k_max; ++j) {
      complex_t acc{};
      for (std::size_t k = 0; k < m; ++k) acc += g[k] * std::conj(detail::root_of_unity((j * k) % m, m));
      p[j] = acc / static_cast<double>(m);
    }
    return p;
  });
  std::vector<double> probs(k_max + 1);
  for (std::size_t j = 0; j <= k_max; ++j) probs[j] = res.values[j].real();
  detail::check_probabilities(probs);
  return probs;
}

/// Joint law P[N(a) = k, N(b) = l], 0 <= k, l <= k_max, by two-dimensional
/// Fourier inversion. Row index k, column index l.
inline std::vector<std::vector<double>> joint_count_distribution(const CountingConfig& config, IntervalHandle a,
                                                                 IntervalHandle b, std::size_t k_max,
                                                                 const FredholmOptions& opts = {}) {
  if (k_max > 64) throw DomainError("joint_count_distribution: k_max must be <= 64");
  config.check_target(a.time_index, a.interval_index);
  config.check_target(b.time_index, b.interval_index);
  if (a.time_index == b.time_index && a.interval_index == b.interval_index) {
    throw DomainError("joint_count_distribution: the two targets must be distinct intervals");
  }
  const std::size_t m = detail::fourier_size(k_max);
  std::vector<CountingConfig> points;
  points.reserve(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      points.push_back(config.with_weight(a.time_index, a.interval_index, detail::root_of_unity(k, m))
                           .with_weight(b.time_index, b.interval_index, detail::root_of_unity(l, m)));
    }
  }
  const std::size_t width = k_max + 1;
  auto res = detail::converge_over_nodes(config, opts, [&](const BlockKernelMatrix& base) {
    std::vector<complex_t> g(m * m);
    parallel_for(m * m, opts.threads, [&](std::size_t idx) { g[idx] = fredholm_det(base.reweighted(points[idx])); });
    // Separable inverse transform: first over l, then over k.
    std::vector<complex_t> partial(m * width);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t jl = 0; jl < width; ++jl) {
        complex_t acc{};
        for (std::size_t l = 0; l < m; ++l) acc += g[k * m + l] * std::conj(detail::root_of_unity((jl * l) % m, m));
        partial[k * width + jl] = acc;
      }
    }
    std::vector<complex_t> p(width * width);
    for (std::size_t jk = 0; jk < width; ++jk) {
      for (std::size_t jl = 0; jl < width; ++jl) {
        complex_t acc{};
        for (std::size_t k = 0; k < m; ++k) {
          acc += partial[k * width + jl] * std::conj(detail::root_of_unity((jk * k) % m, m));
        }
        p[jk * width + jl] = acc / static_cast<double>(m * m);
      }
    }
    return p;
  });
  std::vector<std::vector<double>> joint(width, std::vector<double>(width));
  std::vector<double> flat;
  for (std::size_t jk = 0; jk < width; ++jk) {
    for (std::size_t jl = 0; jl < width; ++jl) {
      joint[jk][jl] = res.values[jk * width + jl].real();
      flat.push_back(joint[jk][jl]);
    }
  }
  detail::check_probabilities(flat);
  return joint;
}

}  // namespace airyline
