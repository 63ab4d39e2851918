#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "airyline/fredholm.hpp"
#include "oracles.hpp"

using namespace airyline;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

IntervalSpec iv(double t, double lo, double hi, complex_t z) { return {t, lo, hi, z}; }

CountingConfig two_time_config() {
  return CountingConfig::from_intervals(
      {iv(0.0, -1.0, 1.0, 0.5), iv(0.0, 2.0, kInf, {0.2, 0.1}), iv(0.7, -2.0, 0.5, {0.0, 0.0})});
}

}  // namespace

TEST(CountingConfig, MergesEqualTimesAndSorts) {
  const auto cfg = CountingConfig::from_intervals(
      {iv(1.0, 0.0, 1.0, 0.0), iv(-0.5, -3.0, -1.0, 0.0), iv(1.0, 2.0, 3.0, 0.5)});
  ASSERT_EQ(cfg.time_count(), 2u);
  EXPECT_EQ(cfg.times()[0], -0.5);
  EXPECT_EQ(cfg.times()[1], 1.0);
  ASSERT_EQ(cfg.intervals()[1].size(), 2u);
  EXPECT_EQ(cfg.intervals()[1][0].lower, 0.0);
  EXPECT_EQ(cfg.intervals()[1][1].lower, 2.0);
  EXPECT_DOUBLE_EQ(cfg.m0(), 3.0);
}

TEST(CountingConfig, OverlapNamesBothIntervals) {
  try {
    CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0), iv(0.0, 0.5, 2.0, 0.0)});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(-1, 1)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(0.5, 2)"), std::string::npos) << msg;
  }
  // Touching endpoints are disjoint open intervals.
  EXPECT_NO_THROW(CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0), iv(0.0, 1.0, 2.0, 0.0)}));
  // Overlap in space at different times is fine.
  EXPECT_NO_THROW(CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0), iv(0.5, 0.0, 2.0, 0.0)}));
}

TEST(BuildBlockMatrix, AllWeightsOneGiveZeroMatrix) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 1.0), iv(1.0, -2.0, kInf, 1.0)});
  const auto m = build_block_matrix(cfg, 16);
  EXPECT_TRUE(m.matrix().isZero(0.0));
  EXPECT_EQ(fredholm_det(m), complex_t(1.0, 0.0));
}

TEST(BuildBlockMatrix, SingleIntervalIsWeightedK2Gram) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -2.0, 1.0, 0.25)});
  const auto m = build_block_matrix(cfg, 12);
  const auto rule = map_to(gauss_legendre(12), -2.0, 1.0);
  for (std::size_t p = 0; p < 12; ++p) {
    for (std::size_t q = 0; q < 12; ++q) {
      const double want = 0.75 * std::sqrt(rule.weights[p] * rule.weights[q]) * k2(rule.nodes[p], rule.nodes[q]);
      EXPECT_NEAR(m.entry(p, q).real(), want, 1e-16);
      EXPECT_EQ(m.entry(p, q).imag(), 0.0);
    }
  }
}

TEST(BuildBlockMatrix, EntriesFollowBranchConvention) {
  const auto cfg = two_time_config();
  const auto m = build_block_matrix(cfg, 8);
  for (std::size_t r = 0; r < m.dimension(); r += 3) {
    for (std::size_t c = 0; c < m.dimension(); c += 5) {
      const NodeInfo& a = m.nodes()[r];
      const NodeInfo& b = m.nodes()[c];
      const complex_t factor = complex_t(1.0, 0.0) - cfg.intervals()[a.time_index][a.interval_index].weight_z;
      const double k = k2_ext(cfg.times()[a.time_index], a.x, cfg.times()[b.time_index], b.x);
      const complex_t want = factor * std::sqrt(a.weight * b.weight) * k;
      EXPECT_NEAR(std::abs(m.entry(r, c) - want), 0.0, 1e-12);
    }
  }
}

TEST(BuildBlockMatrix, GlobalTimeShiftIsBitIdentical) {
  const auto cfg = two_time_config();
  for (double c : {3.7, -11.0, 0.1}) {
    EXPECT_TRUE(build_block_matrix(cfg, 16) == build_block_matrix(cfg.shifted(c), 16)) << c;
  }
}

TEST(BuildBlockMatrix, NodeCountRange) {
  const auto cfg = two_time_config();
  EXPECT_THROW(build_block_matrix(cfg, 3), ConfigError);
  EXPECT_THROW(build_block_matrix(cfg, 2049), ConfigError);
}

TEST(FredholmDet, ElementaryCases) {
  EXPECT_EQ(fredholm_det(Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(5, 5))), complex_t(1.0, 0.0));
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
  d(0, 0) = 0.5;
  d(1, 1) = complex_t(0.1, 0.2);
  d(2, 2) = -2.0;
  const complex_t want = 0.5 * complex_t(0.9, -0.2) * 3.0;
  EXPECT_NEAR(std::abs(fredholm_det(d) - want), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(fredholm_det(Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 0.5))), 0.5);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fredholm_det(bad), NumericError);
}

TEST(FredholmDet, SymmetrizationIsASimilarity) {
  // Unsymmetrized Nystrom matrix (1 - z_p) K(x_p, x_q) w_q has the same determinant.
  const auto cfg = two_time_config();
  const auto m = build_block_matrix(cfg, 20);
  const auto n = static_cast<Eigen::Index>(m.dimension());
  Eigen::MatrixXcd plain(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const NodeInfo& a = m.nodes()[static_cast<std::size_t>(r)];
      const NodeInfo& b = m.nodes()[static_cast<std::size_t>(c)];
      plain(r, c) = m.row_factors()[static_cast<std::size_t>(r)] *
                    k2_ext(cfg.times()[a.time_index], a.x, cfg.times()[b.time_index], b.x) * b.weight;
    }
  }
  EXPECT_NEAR(std::abs(fredholm_det(plain) - fredholm_det(m)), 0.0, 1e-12);
}

TEST(GeneratingFunction, TrivialCases) {
  EXPECT_EQ(generating_function(CountingConfig{}).value, complex_t(1.0, 0.0));
  const auto ones = CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 1.0), iv(2.0, 0.0, kInf, 1.0)});
  EXPECT_EQ(generating_function(ones).value, complex_t(1.0, 0.0));
}

TEST(GeneratingFunction, SemiInfiniteGapMatchesTracyWidom) {
  for (double s : {-3.0, -1.0, 0.5}) {
    const FredholmOptions opts;
    const auto g = generating_function(CountingConfig::from_intervals({iv(0.0, s, kInf, 0.0)}), opts);
    EXPECT_NEAR(g.value.real(), tracy_widom_f2(s), 2 * opts.tol) << s;
    EXPECT_LE(g.error_estimate, opts.tol);
    EXPECT_GE(g.nodes_used, opts.min_nodes);
  }
}

TEST(GeneratingFunction, BoundedByOneOnPolydisk) {
  const auto base = two_time_config();
  for (int k = 0; k < 12; ++k) {
    const double r = 0.15 + 0.85 * (k % 4) / 3.0;
    const double th = 2.0 * std::numbers::pi * k / 12.0;
    const complex_t z1 = std::polar(r, th), z2 = std::polar(1.0 - 0.3 * (k % 2), -1.7 * th);
    const auto cfg = base.with_weight(0, 0, z1).with_weight(1, 0, z2);
    EXPECT_LE(std::abs(generating_function(cfg).value), 1.0 + 1e-8) << k;
  }
}

TEST(GeneratingFunction, RealWeightsGiveRealDeterminant) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.3), iv(0.4, -2.0, kInf, 0.9)});
  const auto g = generating_function(cfg);
  EXPECT_LE(std::fabs(g.value.imag()), 1e-12);
  // The complex path agrees with the real one.
  const auto m = build_block_matrix(cfg, g.nodes_used);
  EXPECT_NEAR(std::abs(fredholm_det(m.matrix()) - g.value), 0.0, 1e-12);
}

TEST(GeneratingFunction, ConvergenceFailureCarriesBestValue) {
  FredholmOptions opts;
  opts.tol = 1e-12;
  opts.min_nodes = 4;
  opts.max_nodes = 8;
  try {
    generating_function(CountingConfig::from_intervals({iv(0.0, -12.0, 6.0, 0.5)}), opts);
    FAIL() << "expected AccuracyError";
  } catch (const AccuracyError& e) {
    EXPECT_TRUE(std::isfinite(e.best_real()));
    EXPECT_GT(e.error_estimate(), 1e-12);
  }
  opts.tol = 1e-13;
  EXPECT_THROW(generating_function(two_time_config(), opts), DomainError);
}

TEST(GapProbability, NearlyDegenerateIntervalIsAlmostSurelyEmpty) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, 0.3, 0.3 + 2e-12, 0.0)});
  EXPECT_NEAR(gap_probability(cfg), 1.0, 1e-8);
  EXPECT_THROW(CountingConfig::from_intervals({iv(0.0, 0.3, 0.3 + 5e-13, 0.0)}), ConfigError);
}

TEST(GapProbability, FarTailIsNearlyOne) {
  EXPECT_LT(k2_diagonal_tail(6.0), 1e-6);
  EXPECT_GE(gap_probability(CountingConfig::from_intervals({iv(0.0, 6.0, kInf, 0.0)})), 1.0 - 1e-6);
}

TEST(GapProbability, MonotoneInTheEvent) {
  const double a = gap_probability(CountingConfig::from_intervals({iv(0.0, -2.0, -0.5, 0.0)}));
  const double b = gap_probability(CountingConfig::from_intervals({iv(0.0, 0.0, 1.5, 0.0)}));
  const double ab = gap_probability(CountingConfig::from_intervals({iv(0.0, -2.0, -0.5, 0.0), iv(0.0, 0.0, 1.5, 0.0)}));
  EXPECT_LE(ab, a);
  EXPECT_LE(ab, b);
  EXPECT_GE(ab, 0.0);
  EXPECT_THROW(gap_probability(CountingConfig::from_intervals({iv(0.0, 0.0, 1.0, 0.5)})), ConfigError);
}

TEST(TracyWidom, MonotoneAndTail) {
  const double fm1 = tracy_widom_f2(-1.0), f0 = tracy_widom_f2(0.0), f1 = tracy_widom_f2(1.0);
  EXPECT_LT(fm1, f0);
  EXPECT_LT(f0, f1);
  EXPECT_GE(tracy_widom_f2(6.0), 1.0 - 1e-6);
  EXPECT_LE(tracy_widom_f2(6.0), 1.0);
  EXPECT_GT(tracy_widom_f2(-8.0), 0.0);
  EXPECT_THROW(tracy_widom_f2(-10.5), DomainError);
  EXPECT_THROW(tracy_widom_f2(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(TracyWidom, AgreesWithFinestDiscretisation) {
  // 2048 Gauss-Legendre nodes on (-2, 14).
  const IntervalSpec i0{0.0, -2.0, kInf, 0.0};
  const auto rule = map_interval(gauss_legendre(2048), i0, 16.0);
  const Eigen::MatrixXd k = k2_ext_matrix(0.0, 0.0, rule.nodes, rule.nodes);
  Eigen::VectorXd sw(2048);
  for (int i = 0; i < 2048; ++i) sw(i) = std::sqrt(rule.weights[static_cast<std::size_t>(i)]);
  const double fine = fredholm_det(Eigen::MatrixXd(sw.asDiagonal() * k * sw.asDiagonal()));
  EXPECT_NEAR(tracy_widom_f2(-2.0), fine, 1e-8);
  EXPECT_NEAR(tracy_widom_f2(-2.0), 0.413224142507855, 1e-8);
}

TEST(CountDistribution, NormalisationMeanAndGap) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -2.0, kInf, 0.0)});
  const auto p = count_distribution(cfg, {0, 0}, 24);
  ASSERT_EQ(p.size(), 25u);
  double total = 0.0, mean = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_GE(p[k], -1e-8);
    total += p[k];
    mean += static_cast<double>(k) * p[k];
  }
  EXPECT_NEAR(total, 1.0, 1e-8);
  EXPECT_NEAR(p[0], tracy_widom_f2(-2.0), 1e-9);
  const double intensity = oracle::panel_integral([](double x) { return oracle::k2_direct(x, x); }, -2.0, 12.0, 1.0);
  EXPECT_NEAR(mean, intensity, 1e-6);
  EXPECT_NEAR(mean, k2_diagonal_tail(-2.0), 1e-6);
}

TEST(CountDistribution, OtherWeightsHeldFixed) {
  // P[N_A = k, N_B = 0] summed over k is the gap probability of B.
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0), iv(0.5, 0.0, 2.0, 0.0)});
  const auto p = count_distribution(cfg, {0, 0}, 16);
  double total = 0.0;
  for (double v : p) total += v;
  EXPECT_NEAR(total, gap_probability(CountingConfig::from_intervals({iv(0.5, 0.0, 2.0, 0.0)})), 1e-8);
  EXPECT_NEAR(p[0], gap_probability(cfg), 1e-9);
}

TEST(CountDistribution, Validation) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0)});
  EXPECT_THROW(count_distribution(cfg, {0, 0}, 65), DomainError);
  EXPECT_THROW(count_distribution(cfg, {0, 1}, 4), ConfigError);
  EXPECT_THROW(count_distribution(cfg, {1, 0}, 4), ConfigError);
}

TEST(JointCountDistribution, MarginalsMatchOneDimensional) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0), iv(1.0, -1.0, 1.0, 0.0)});
  const auto joint = joint_count_distribution(cfg, {0, 0}, {1, 0}, 8);
  const auto single = count_distribution(CountingConfig::from_intervals({iv(0.0, -1.0, 1.0, 0.0)}), {0, 0}, 8);
  double total = 0.0;
  for (std::size_t k = 0; k < joint.size(); ++k) {
    double row = 0.0;
    for (double v : joint[k]) row += v;
    EXPECT_NEAR(row, single[k], 1e-8) << k;
    total += row;
  }
  EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(DeterminantLadder, SpectralConvergenceOnSmoothConfig) {
  const auto cfg = CountingConfig::from_intervals({iv(0.0, -10.0, 4.0, 0.5)});
  const auto ladder = determinant_ladder(cfg, {16, 32, 64, 128});
  ASSERT_EQ(ladder.values.size(), 4u);
  EXPECT_GT(ladder.differences[1], 1e-12);
  EXPECT_GE(ladder.differences[1] / ladder.differences[2], 10.0);
}

TEST(Determinism, ThreadCountDoesNotChangeResults) {
  const auto cfg = two_time_config();
  EXPECT_TRUE(build_block_matrix(cfg, 32, 1e-10, 1) == build_block_matrix(cfg, 32, 1e-10, 3));
  FredholmOptions a, b;
  a.threads = 1;
  b.threads = 4;
  EXPECT_EQ(generating_function(cfg, a).value, generating_function(cfg, b).value);
}
