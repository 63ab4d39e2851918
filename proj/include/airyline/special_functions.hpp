#pragma once

// Airy function Ai and its derivative on the real axis, double precision.
//
// Three regimes, all accumulated in long double:
//   * kMaclaurinLow <= x <= kMaclaurinHigh : the two power series of the Airy ODE
//   * kMaclaurinHigh < x <= kAsymptoticPositive : Ai via K_{1/3}, K_{2/3}
//     evaluated with Temme's continued fraction (CF2)
//   * outside those : the large-argument asymptotic expansions
// The switch points are placed where neighbouring branches agree to ~1e-14;
// tests/test_special_functions.cpp checks the seams.

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "airyline/errors.hpp"

namespace airyline {

struct AiryValue {
  double ai = 0.0;
  double ai_prime = 0.0;
};

namespace detail {

using real_ext = long double;

inline constexpr real_ext kAi0 = 0.355028053887817239260063186004183176L;
inline constexpr real_ext kMinusAiPrime0 = 0.258819403792806798405183560189203963L;
inline constexpr real_ext kPi = 3.141592653589793238462643383279502884L;

inline constexpr double kMaclaurinLow = -8.0;
inline constexpr double kMaclaurinHigh = 2.5;
inline constexpr double kAsymptoticPositive = 12.0;

struct AiryExt {
  real_ext ai;
  real_ext ai_prime;
};

inline AiryExt airy_maclaurin(real_ext x) {
  const real_ext x3 = x * x * x;
  // f = 1 + x^3/(2*3) + ..., g = x + x^4/(3*4) + ...; Ai = c1 f - c2 g.
  real_ext tf = 1.0L, sf = 1.0L;
  real_ext tg = x, sg = x;
  real_ext tfp = x * x / 2.0L, sfp = tfp;  // f'
  real_ext tgp = 1.0L, sgp = 1.0L;         // g'
  const real_ext eps = std::numeric_limits<real_ext>::epsilon() * 0.25L;
  for (int k = 1; k < 200; ++k) {
    const real_ext k3 = 3.0L * k;
    tf *= x3 / ((k3 - 1.0L) * k3);
    tg *= x3 / (k3 * (k3 + 1.0L));
    tgp *= x3 / (k3 * (k3 - 2.0L));
    sf += tf;
    sg += tg;
    sgp += tgp;
    if (k >= 2) {
      tfp *= x3 / ((k3 - 1.0L) * (k3 - 3.0L));
      sfp += tfp;
    }
    const real_ext scale = std::fabs(sf) + std::fabs(sg) + std::fabs(sfp) + std::fabs(sgp) + 1.0L;
    if (k > 2 && std::fabs(tf) + std::fabs(tg) + std::fabs(tfp) + std::fabs(tgp) < eps * scale) {
      break;
    }
  }
  return {kAi0 * sf - kMinusAiPrime0 * sg, kAi0 * sfp - kMinusAiPrime0 * sgp};
}

// Temme's CF2 for K_nu(z), K_{nu+1}(z), |nu| <= 1/2, returned with the factor
// e^{-z} removed.
inline void bessel_k_scaled_cf2(real_ext nu, real_ext z, real_ext& k_nu, real_ext& k_nu1) {
  const real_ext eps = std::numeric_limits<real_ext>::epsilon();
  real_ext b = 2.0L * (1.0L + z);
  real_ext d = 1.0L / b;
  real_ext h = d;
  real_ext delh = d;
  real_ext q1 = 0.0L, q2 = 1.0L;
  const real_ext a1 = 0.25L - nu * nu;
  real_ext q = a1, c = a1;
  real_ext a = -a1;
  real_ext s = 1.0L + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2.0L * i;
    c = -a * c / (i + 1.0L);
    const real_ext qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0L;
    d = 1.0L / (b + a * d);
    delh = (b * d - 1.0L) * delh;
    h += delh;
    const real_ext dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < eps) break;
  }
  h = a1 * h;
  k_nu = std::sqrt(kPi / (2.0L * z)) / s;
  k_nu1 = k_nu * (nu + z + 0.5L - h) / z;
}

// Positive axis via Ai = sqrt(x/3)/pi K_{1/3}(zeta), Ai' = -x/(pi sqrt3) K_{2/3}(zeta).
// Returns values scaled by e^{zeta}.
inline AiryExt airy_bessel_k_scaled(real_ext x, real_ext zeta) {
  real_ext k13 = 0.0L, k43 = 0.0L;
  bessel_k_scaled_cf2(1.0L / 3.0L, zeta, k13, k43);
  const real_ext k23 = k43 - (2.0L / (3.0L * zeta)) * k13;
  const real_ext sqrt3 = std::sqrt(3.0L);
  return {std::sqrt(x / 3.0L) / kPi * k13, -x / (kPi * sqrt3) * k23};
}

// Partial sums of the u_k / v_k coefficient series in 1/zeta, truncated at the
// smallest term. The alternating sums serve the positive axis, the even/odd
// split the oscillatory negative axis.
struct AsymptoticSums {
  real_ext u_even, u_odd, v_even, v_odd;  // sum (-1)^j u_{2j}/zeta^{2j} etc.
  real_ext u_alt, v_alt;                  // sum (-1)^k u_k/zeta^k
};

inline AsymptoticSums airy_asymptotic_sums(real_ext zeta) {
  AsymptoticSums out{1.0L, 0.0L, 1.0L, 0.0L, 1.0L, 1.0L};
  const real_ext eps = std::numeric_limits<real_ext>::epsilon() * 0.25L;
  real_ext u = 1.0L;
  real_ext zpow = 1.0L;
  real_ext last = std::numeric_limits<real_ext>::infinity();
  for (int k = 1; k < 200; ++k) {
    u *= (6.0L * k - 5.0L) * (6.0L * k - 3.0L) * (6.0L * k - 1.0L) / ((2.0L * k - 1.0L) * 216.0L * k);
    const real_ext v = -(6.0L * k + 1.0L) / (6.0L * k - 1.0L) * u;
    zpow /= zeta;
    const real_ext tu = u * zpow;
    const real_ext tv = v * zpow;
    const real_ext mag = std::fabs(tu) + std::fabs(tv);
    if (mag >= last) break;  // divergent tail starts here
    last = mag;
    const real_ext alt = (k % 2 == 0) ? 1.0L : -1.0L;
    out.u_alt += alt * tu;
    out.v_alt += alt * tv;
    const int j = k / 2;
    const real_ext sj = (j % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      out.u_even += sj * tu;
      out.v_even += sj * tv;
    } else {
      out.u_odd += sj * tu;
      out.v_odd += sj * tv;
    }
    if (mag < eps) break;
  }
  return out;
}

inline AiryExt airy_asymptotic_negative(real_ext x) {
  const real_ext z = -x;
  const real_ext zeta = 2.0L / 3.0L * z * std::sqrt(z);
  const AsymptoticSums s = airy_asymptotic_sums(zeta);
  const real_ext phase = zeta - kPi / 4.0L;
  const real_ext c = std::cos(phase);
  const real_ext sn = std::sin(phase);
  const real_ext z14 = std::sqrt(std::sqrt(z));
  const real_ext rpi = std::sqrt(kPi);
  return {(c * s.u_even + sn * s.u_odd) / (rpi * z14), z14 / rpi * (sn * s.v_even - c * s.v_odd)};
}

// Positive asymptotic branch; values scaled by e^{zeta}.
inline AiryExt airy_asymptotic_positive_scaled(real_ext x) {
  const real_ext zeta = 2.0L / 3.0L * x * std::sqrt(x);
  const AsymptoticSums s = airy_asymptotic_sums(zeta);
  const real_ext x14 = std::sqrt(std::sqrt(x));
  const real_ext denom = 2.0L * std::sqrt(kPi);
  return {s.u_alt / (denom * x14), -x14 / denom * s.v_alt};
}

inline double flush_subnormal(real_ext v) {
  const double d = static_cast<double>(v);
  return std::fabs(d) < std::numeric_limits<double>::min() ? 0.0 : d;
}

}  // namespace detail

/// Ai(x) and Ai'(x). Relative accuracy ~1e-13 away from the zeros on the
/// negative axis; results below the smallest normal double are returned as 0.
inline AiryValue airy_ai(double x) {
  using namespace detail;
  if (!std::isfinite(x)) {
    throw DomainError("airy_ai: non-finite argument " + std::to_string(x));
  }
  const real_ext xe = x;
  if (x < kMaclaurinLow) {
    const AiryExt v = airy_asymptotic_negative(xe);
    return {static_cast<double>(v.ai), static_cast<double>(v.ai_prime)};
  }
  if (x <= kMaclaurinHigh) {
    const AiryExt v = airy_maclaurin(xe);
    return {static_cast<double>(v.ai), static_cast<double>(v.ai_prime)};
  }
  const real_ext zeta = 2.0L / 3.0L * xe * std::sqrt(xe);
  // Both components are below DBL_MIN well before e^{-zeta} leaves the
  // long double range.
  if (zeta > 760.0L) return {0.0, 0.0};
  const AiryExt scaled =
      x <= kAsymptoticPositive ? airy_bessel_k_scaled(xe, zeta) : airy_asymptotic_positive_scaled(xe);
  const real_ext damp = std::exp(-zeta);
  return {flush_subnormal(scaled.ai * damp), flush_subnormal(scaled.ai_prime * damp)};
}

}  // namespace airyline
