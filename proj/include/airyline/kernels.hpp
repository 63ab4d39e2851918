#pragma once

// Airy_2 kernel K2(x, y) = int_0^inf Ai(x+l) Ai(y+l) dl and the extended
// (space-time) kernel
//
//   K(s,x; t,y) =  int_0^inf  e^{-l (s-t)} Ai(x+l) Ai(y+l) dl     s >= t
//               = -int_0^inf  e^{-m (t-s)} Ai(x-m) Ai(y-m) dm     s <  t
//
// K2 uses its closed form; the time-separated branches are integrated with
// Gauss-Legendre panels whose width follows the local Airy wavelength.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "airyline/errors.hpp"
#include "airyline/parallel.hpp"
#include "airyline/quadrature.hpp"
#include "airyline/special_functions.hpp"

namespace airyline {

struct SpaceTimePoint {
  double t = 0.0;
  double x = 0.0;
};

/// Which spectral half of the Airy Hamiltonian H = -d^2/dx^2 + x a semigroup
/// block acts on: `negative` is the range of K2, `positive` the range of I - K2.
enum class ProjectionSide { negative, positive };

namespace detail {

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite argument");
}

inline constexpr double kDiagonalBand = 1e-4;

// K2(m+h, m-h) expanded in h around the midpoint m; terms h^0..h^6.
inline double k2_near_diagonal(double x, double y) {
  const double m = 0.5 * (x + y);
  const double h = 0.5 * (x - y);
  const AiryValue a = airy_ai(m);
  // Derivatives of Ai at m from Ai'' = x Ai: a_{n+2} = m a_n + n a_{n-1}.
  std::array<double, 9> d{};
  d[0] = a.ai;
  d[1] = a.ai_prime;
  d[2] = m * d[0];
  for (int n = 1; n + 2 < 9; ++n) d[n + 2] = m * d[n] + n * d[n - 1];
  std::array<double, 9> fact{1, 1, 2, 6, 24, 120, 720, 5040, 40320};
  double sum = 0.0;
  double hpow = 1.0;
  for (int n = 1; n <= 7; n += 2) {
    double c = 0.0;
    for (int i = 0; i <= n; ++i) {
      const int j = n - i;
      const double sign = ((j % 2 == 0) ? 1.0 : -1.0) - ((i % 2 == 0) ? 1.0 : -1.0);
      c += d[i] * d[j + 1] / (fact[i] * fact[j]) * sign;
    }
    sum += 0.5 * c * hpow;
    hpow *= h * h;
  }
  return sum;
}

// K2 from Airy values already evaluated at x and y.
inline double k2_from_values(double x, double y, const AiryValue& ax, const AiryValue& ay) {
  if (x == y) return ax.ai_prime * ax.ai_prime - x * ax.ai * ax.ai;
  if (std::fabs(x - y) <= kDiagonalBand) return k2_near_diagonal(x, y);
  return (ax.ai * ay.ai_prime - ax.ai_prime * ay.ai) / (x - y);
}

}  // namespace detail

/// Airy_2 kernel, symmetric in its arguments bit for bit.
inline double k2(double x, double y) {
  detail::require_finite(x, "k2");
  detail::require_finite(y, "k2");
  if (x != y && std::fabs(x - y) <= detail::kDiagonalBand) return detail::k2_near_diagonal(x, y);
  return detail::k2_from_values(x, y, airy_ai(x), airy_ai(y));
}

/// K2(x, x) = Ai'(x)^2 - x Ai(x)^2, the one-point density.
inline double k2_diagonal(double x) {
  const AiryValue a = airy_ai(x);
  return a.ai_prime * a.ai_prime - x * a.ai * a.ai;
}

/// Expected number of points above u: int_u^inf K2(x, x) dx in closed form.
inline double k2_diagonal_tail(double u) {
  const AiryValue a = airy_ai(u);
  const double t = (2.0 * u * u * a.ai * a.ai - 2.0 * u * a.ai_prime * a.ai_prime - a.ai * a.ai_prime) / 3.0;
  return std::max(t, 0.0);
}

/// Time gaps are snapped to a 2^-32 grid. The extended kernel depends on the
/// two times only through their difference, and snapping makes that difference
/// identical for (s, t) and (s + c, t + c) so translated configurations give
/// bit-identical matrices.
inline double canonical_time_gap(double s, double t) {
  return std::ldexp(std::nearbyint(std::ldexp(s - t, 32)), -32);
}

/// Quadrature in the spectral variable for one time-separated branch, with
/// the exponential damping folded into the weights.
struct SpectralRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  double sign = 1.0;            // -1 for the s < t branch
  double argument_sign = 1.0;   // Ai(x + argument_sign * node)
  int refinement = 0;
};

struct KernelEstimate {
  double value = 0.0;
  double error_estimate = 0.0;
  int refinement = 0;
};

namespace detail {

inline constexpr std::size_t kPanelOrder = 20;
inline constexpr std::size_t kMaxSpectralNodes = 400000;
inline constexpr int kMaxRefinement = 6;
inline constexpr double kRefinementTolerance = 1e-10;
// e^{-40} ~ 4e-18: beyond this the damping factor is below the 1e-16 cutoff.
inline constexpr double kDampingExponentCutoff = 40.0;
// Ai(u)^2 < 1e-18 once u exceeds this.
inline constexpr double kAiryDecayPoint = 10.0;

inline double panel_width(double omega, int refinement) {
  const double base = omega > 0.0 ? std::min(1.0, 2.0 * std::numbers::pi / omega) : 1.0;
  return std::ldexp(base, -refinement);
}

}  // namespace detail

/// Builds the panel rule for gap = s - t != 0 covering all arguments >= x_low.
inline SpectralRule make_spectral_rule(double gap, double x_low, int refinement) {
  if (!(gap != 0.0) || !std::isfinite(gap) || !std::isfinite(x_low)) {
    throw DomainError("make_spectral_rule: gap must be finite and nonzero");
  }
  using namespace detail;
  SpectralRule rule;
  rule.refinement = refinement;
  const double g = std::fabs(gap);
  const bool forward = gap > 0.0;
  rule.sign = forward ? 1.0 : -1.0;
  rule.argument_sign = forward ? 1.0 : -1.0;
  double upper = kDampingExponentCutoff / g;
  if (forward) upper = std::min(upper, std::max(0.5, kAiryDecayPoint - x_low));
  const QuadratureRule& gl = gauss_legendre(kPanelOrder);
  double left = 0.0;
  while (left < upper) {
    // Local angular frequency of Ai at the most negative argument in the panel.
    double omega = 0.0;
    if (forward) {
      omega = std::sqrt(std::max(0.0, -(x_low + left)));
    } else {
      omega = std::sqrt(std::max(0.0, left + 1.0 - x_low));
    }
    const double right = std::min(upper, left + panel_width(omega, refinement));
    const double half = 0.5 * (right - left);
    const double mid = 0.5 * (right + left);
    for (std::size_t k = 0; k < gl.size(); ++k) {
      const double node = mid + half * gl.nodes[k];
      rule.nodes.push_back(node);
      rule.weights.push_back(half * gl.weights[k] * std::exp(-g * node));
    }
    if (rule.nodes.size() > kMaxSpectralNodes) {
      throw AccuracyError("extended kernel: spectral quadrature exceeds its node budget (gap " +
                              std::to_string(gap) + ")",
                          0.0, 0.0, std::numeric_limits<double>::infinity());
    }
    left = right;
  }
  return rule;
}

inline double apply_spectral_rule(const SpectralRule& rule, double x, double y) {
  double acc = 0.0;
  for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
    const double shift = rule.argument_sign * rule.nodes[r];
    acc += rule.weights[r] * airy_ai(x + shift).ai * airy_ai(y + shift).ai;
  }
  return rule.sign * acc;
}

/// Extended kernel with the difference of the last two panel refinements as
/// error estimate. Throws AccuracyError if refinements do not settle.
inline KernelEstimate k2_ext_estimate(double s, double x, double t, double y) {
  detail::require_finite(s, "k2_ext");
  detail::require_finite(x, "k2_ext");
  detail::require_finite(t, "k2_ext");
  detail::require_finite(y, "k2_ext");
  const double gap = canonical_time_gap(s, t);
  if (gap == 0.0) return {k2(x, y), 0.0, 0};
  const double x_low = std::min(x, y);
  double previous = apply_spectral_rule(make_spectral_rule(gap, x_low, 0), x, y);
  double diff = 0.0;
  for (int r = 1; r <= detail::kMaxRefinement; ++r) {
    const double current = apply_spectral_rule(make_spectral_rule(gap, x_low, r), x, y);
    diff = std::fabs(current - previous);
    if (diff <= detail::kRefinementTolerance) return {current, diff, r};
    previous = current;
  }
  throw AccuracyError("k2_ext: panel refinement did not reach 1e-10", previous, 0.0, diff);
}

inline double k2_ext(double s, double x, double t, double y) { return k2_ext_estimate(s, x, t, y).value; }

inline double k2_ext(const SpaceTimePoint& a, const SpaceTimePoint& b) { return k2_ext(a.t, a.x, b.t, b.x); }

/// Kernel of the semigroup-weighted spectral projections used in the
/// off-diagonal blocks: `negative` gives int_0^inf e^{-gap l} Ai(x+l) Ai(y+l) dl
/// (= K(gap, x; 0, y)), `positive` gives int_0^inf e^{-gap m} Ai(x-m) Ai(y-m) dm
/// (= -K(0, x; gap, y)).
inline double semigroup_block(double gap, ProjectionSide side, double x, double y) {
  if (!(gap >= 0.0)) throw DomainError("semigroup_block: gap must be >= 0");
  return side == ProjectionSide::negative ? k2_ext(gap, x, 0.0, y) : -k2_ext(0.0, x, gap, y);
}

namespace detail {

inline Eigen::MatrixXd airy_design_matrix(std::span<const double> xs, const SpectralRule& rule,
                                          unsigned threads) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(rule.nodes.size()));
  parallel_for(xs.size(), threads, [&](std::size_t p) {
    for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
      a(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r)) =
          airy_ai(xs[p] + rule.argument_sign * rule.nodes[r]).ai;
    }
  });
  return a;
}

}  // namespace detail

/// Dense matrix [K(s, xs[p]; t, ys[q])]. The panel refinement is the one the
/// point evaluator certifies at the most oscillatory probe pairs.
inline Eigen::MatrixXd k2_ext_matrix(double s, double t, std::span<const double> xs,
                                     std::span<const double> ys, unsigned threads = 1) {
  const auto nx = static_cast<Eigen::Index>(xs.size());
  const auto ny = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd out(nx, ny);
  if (nx == 0 || ny == 0) return out;
  for (double v : xs) detail::require_finite(v, "k2_ext_matrix");
  for (double v : ys) detail::require_finite(v, "k2_ext_matrix");
  detail::require_finite(s, "k2_ext_matrix");
  detail::require_finite(t, "k2_ext_matrix");
  const double gap = canonical_time_gap(s, t);
  if (gap == 0.0) {
    std::vector<AiryValue> ax(xs.size()), ay(ys.size());
    for (std::size_t p = 0; p < xs.size(); ++p) ax[p] = airy_ai(xs[p]);
    for (std::size_t q = 0; q < ys.size(); ++q) ay[q] = airy_ai(ys[q]);
    parallel_for(xs.size(), threads, [&](std::size_t p) {
      for (std::size_t q = 0; q < ys.size(); ++q) {
        out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
            detail::k2_from_values(xs[p], ys[q], ax[p], ay[q]);
      }
    });
    return out;
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
  const double x_low = std::min(*xmin_it, *ymin_it);
  const double x_high = std::max(*xmax_it, *ymax_it);
  const double probe_s = gap > 0.0 ? gap : 0.0;
  const double probe_t = gap > 0.0 ? 0.0 : -gap;
  const int level = std::max(k2_ext_estimate(probe_s, x_low, probe_t, x_low).refinement,
                             k2_ext_estimate(probe_s, x_low, probe_t, x_high).refinement);
  const SpectralRule rule = make_spectral_rule(gap, x_low, std::max(0, level - 1));
  const Eigen::MatrixXd a = detail::airy_design_matrix(xs, rule, threads);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
  const bool same_nodes = xs.data() == ys.data() && xs.size() == ys.size();
  if (same_nodes) {
    out.noalias() = rule.sign * (a * w.asDiagonal() * a.transpose());
  } else {
    const Eigen::MatrixXd b = detail::airy_design_matrix(ys, rule, threads);
    out.noalias() = rule.sign * (a * w.asDiagonal() * b.transpose());
  }
  return out;
}

}  // namespace airyline
