#pragma once

// Gauss-Legendre rules and the interval maps used by the Nystrom
// discretisation. Rules on [-1, 1] are cached per order; the cache is
// populated once per order under std::call_once and never mutated afterwards.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "airyline/errors.hpp"

namespace airyline {

/// One interval of a counting configuration: a space interval (lower, upper)
/// at a fixed time, together with the generating-function weight z attached
/// to the particle count inside it. `upper` may be +infinity.
struct IntervalSpec {
  double time = 0.0;
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::complex<double> weight_z{0.0, 0.0};

  bool semi_infinite() const { return std::isinf(upper); }
  double width() const { return upper - lower; }

  // Roots of unity evaluated in floating point may land a few ulps outside
  // the unit circle.
  static constexpr double kUnitDiskSlack = 8 * std::numeric_limits<double>::epsilon();
  static constexpr double kMinWidth = 1e-12;

  void validate() const {
    std::ostringstream msg;
    if (!std::isfinite(time)) {
      msg << "interval time must be finite";
    } else if (!std::isfinite(lower)) {
      msg << "interval lower endpoint must be finite (M0 condition), got " << lower;
    } else if (std::isnan(upper) || upper == -std::numeric_limits<double>::infinity()) {
      msg << "interval upper endpoint must be a number or +inf";
    } else if (!(upper > lower)) {
      msg << "interval (" << lower << ", " << upper << ") is empty";
    } else if (upper - lower < kMinWidth) {
      msg << "interval (" << lower << ", " << upper << ") is degenerate (width < 1e-12)";
    } else if (!std::isfinite(weight_z.real()) || !std::isfinite(weight_z.imag())) {
      msg << "weight z must be finite";
    } else if (std::abs(weight_z) > 1.0 + kUnitDiskSlack) {
      msg << "|z| exceeds 1 (|z| = " << std::abs(weight_z) << ")";
    } else {
      return;
    }
    throw ConfigError(msg.str());
  }
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::optional<IntervalSpec> parent;  // empty for the reference rule on [-1, 1]
  double lower = -1.0;
  double effective_upper = 1.0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  auto integrate(F&& f) const {
    decltype(f(0.0)) acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

inline constexpr std::size_t kMaxGaussLegendreOrder = 2048;

namespace detail {

inline QuadratureRule compute_gauss_legendre(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const std::size_t half = (n + 1) / 2;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < half; ++i) {
    // Chebyshev-type initial guess for the i-th largest root.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
      }
      pp = nd * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-16 * std::max(1.0, std::fabs(z))) break;
    }
    // One more derivative evaluation at the converged root for the weight.
    double p1 = 1.0, p2 = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      const double jd = static_cast<double>(j);
      p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
    }
    pp = nd * (z * p1 - p2) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

struct GaussLegendreCache {
  std::array<std::once_flag, kMaxGaussLegendreOrder + 1> flags;
  std::array<std::unique_ptr<const QuadratureRule>, kMaxGaussLegendreOrder + 1> rules;
};

inline GaussLegendreCache& gauss_legendre_cache() {
  static GaussLegendreCache cache;
  return cache;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1], nodes ascending. Exact for
/// polynomials of degree <= 2n - 1.
inline const QuadratureRule& gauss_legendre(std::size_t n) {
  if (n < 1 || n > kMaxGaussLegendreOrder) {
    throw DomainError("gauss_legendre: order " + std::to_string(n) + " outside [1, 2048]");
  }
  auto& cache = detail::gauss_legendre_cache();
  std::call_once(cache.flags[n], [&] {
    cache.rules[n] = std::make_unique<const QuadratureRule>(detail::compute_gauss_legendre(n));
  });
  return *cache.rules[n];
}

/// Affine image of a reference rule on [a, b].
inline QuadratureRule map_to(const QuadratureRule& ref, double a, double b) {
  QuadratureRule out;
  out.nodes.resize(ref.size());
  out.weights.resize(ref.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes[i] = mid + half * ref.nodes[i];
    out.weights[i] = half * ref.weights[i];
  }
  out.lower = a;
  out.effective_upper = b;
  return out;
}

/// Maps a reference rule onto the interval of `spec`. Semi-infinite intervals
/// are truncated to [lower, lower + truncation_length]; choosing that length is
/// the caller's job.
inline QuadratureRule map_interval(const QuadratureRule& ref, const IntervalSpec& spec,
                                   double truncation_length) {
  spec.validate();
  double upper = spec.upper;
  if (spec.semi_infinite()) {
    if (!(truncation_length > 0.0) || !std::isfinite(truncation_length)) {
      throw DomainError("map_interval: truncation length must be positive and finite");
    }
    upper = spec.lower + truncation_length;
  }
  QuadratureRule out = map_to(ref, spec.lower, upper);
  out.parent = spec;
  return out;
}

}  // namespace airyline
