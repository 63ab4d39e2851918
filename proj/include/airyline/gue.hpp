#pragma once

// Largest eigenvalue of the Gaussian unitary ensemble through the beta = 2
// tridiagonal model: diagonal N(0, 1), off-diagonal sqrt(Gamma(N - k, 1)),
// k = 1..N-1. This matrix has the GUE spectrum with density
// proportional to exp(-tr H^2 / 2), whose upper edge sits at 2 sqrt(N).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "airyline/errors.hpp"
#include "airyline/parallel.hpp"
#include "airyline/rng.hpp"

namespace airyline {

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `lambda` (Sturm sequence count). `offdiag_sq` holds squared off-diagonals.
inline std::size_t sturm_count_below(const std::vector<double>& diag, const std::vector<double>& offdiag_sq,
                                     double lambda) {
  std::size_t count = 0;
  double d = diag[0] - lambda;
  if (d < 0.0) ++count;
  for (std::size_t i = 1; i < diag.size(); ++i) {
    if (d == 0.0) d = 1e-300;
    d = diag[i] - lambda - offdiag_sq[i - 1] / d;
    if (d < 0.0) ++count;
  }
  return count;
}

/// Largest eigenvalue by bisection on the Sturm count, started from the
/// Gershgorin enclosure.
inline double largest_eigenvalue_tridiagonal(const std::vector<double>& diag, const std::vector<double>& offdiag) {
  const std::size_t n = diag.size();
  if (n == 0 || offdiag.size() + 1 != n) throw DomainError("tridiagonal matrix dimensions mismatch");
  std::vector<double> off_sq(offdiag.size());
  double lo = diag[0], hi = diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::fabs(offdiag[i - 1]) : 0.0) + (i + 1 < n ? std::fabs(offdiag[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
    if (i + 1 < n) off_sq[i] = offdiag[i] * offdiag[i];
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw NumericError("tridiagonal matrix has non-finite entries");
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(lo), std::fabs(hi)) + 1e-300;
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count_below(diag, off_sq, mid) == n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (!(hi - lo <= std::max(tol, 1e-9 * std::max(1.0, std::fabs(hi))))) {
    throw NumericError("Sturm bisection failed to converge");
  }
  return 0.5 * (lo + hi);
}

/// One GUE(N) largest eigenvalue, rescaled to (lambda_max - 2 sqrt N) N^{1/6}.
inline double gue_edge_draw(std::size_t n, RngStream& rng) {
  std::vector<double> diag(n), off(n - 1);
  for (std::size_t i = 0; i < n; ++i) diag[i] = rng.normal();
  for (std::size_t k = 1; k < n; ++k) off[k - 1] = std::sqrt(rng.gamma(static_cast<double>(n - k)));
  const double lmax = largest_eigenvalue_tridiagonal(diag, off);
  const double nd = static_cast<double>(n);
  return (lmax - 2.0 * std::sqrt(nd)) * std::pow(nd, 1.0 / 6.0);
}

/// `samples` edge-rescaled GUE(N) largest eigenvalues; sample s uses stream
/// (seed, s), so the output does not depend on the thread count.
inline std::vector<double> gue_edge_sample(std::size_t n, std::size_t samples, std::uint64_t seed,
                                           unsigned threads = default_threads()) {
  if (n < 50 || n > 2000) throw DomainError("gue_edge_sample: N must lie in [50, 2000]");
  std::vector<double> out(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    RngStream rng(seed, s);
    out[s] = gue_edge_draw(n, rng);
  });
  return out;
}

}  // namespace airyline
