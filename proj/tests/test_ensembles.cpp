#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "airyline/ensembles.hpp"
#include "airyline/gue.hpp"

using namespace airyline;

namespace {

AvoidingSpec two_curves(std::size_t intervals) {
  AvoidingSpec spec;
  spec.grid = UniformGrid::over(0.0, 1.0, intervals);
  spec.entrance = {1.0, -1.0};
  spec.exit = {1.0, -1.0};
  return spec;
}

std::vector<double> column(const std::vector<PathEnsemble>& samples, std::size_t curve, std::size_t i) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& e : samples) out.push_back(e.at(curve, i));
  return out;
}

}  // namespace

TEST(RngStream, Reproducible) {
  RngStream a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    differs |= x != c.normal();
  }
  EXPECT_TRUE(differs);
}

TEST(KsTwoSample, SanityOnKnownSamples) {
  RngStream rng(1, 0);
  std::vector<double> a(4000), b(4000), shifted(4000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal();
  for (auto& v : shifted) v = rng.normal() + 0.3;
  EXPECT_GT(ks_two_sample(a, b).p_value, 1e-3);
  EXPECT_LT(ks_two_sample(a, shifted).p_value, 1e-6);
  EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
}

TEST(SampleBridge, EndpointsExact) {
  RngStream rng(3, 0);
  const auto grid = UniformGrid::over(-0.5, 2.0, 37);
  for (int k = 0; k < 50; ++k) {
    const auto p = sample_bridge(0.25, -3.5, grid, rng);
    ASSERT_EQ(p.size(), 38u);
    EXPECT_EQ(p.front(), 0.25);
    EXPECT_EQ(p.back(), -3.5);
  }
}

TEST(SampleBridge, MidpointMoments) {
  RngStream rng(4, 0);
  const auto grid = UniformGrid::over(0.0, 1.0, 8);
  std::vector<double> mid(100000), quarter(100000);
  for (std::size_t s = 0; s < mid.size(); ++s) {
    const auto p = sample_bridge(0.0, 2.0, grid, rng);
    mid[s] = p[4];
    quarter[s] = p[2];
  }
  const auto m = summarize(mid);
  const auto q = summarize(quarter);
  EXPECT_NEAR(m.mean, 1.0, 3.0 * m.standard_error);
  EXPECT_NEAR(q.mean, 0.5, 3.0 * q.standard_error);
  // Var of the sample variance of a Gaussian is 2 sigma^4 / (n - 1).
  const double var_se = std::sqrt(2.0 / 99999.0);
  EXPECT_NEAR(m.variance, 0.25, 3.0 * 0.25 * var_se);
  EXPECT_NEAR(q.variance, 0.1875, 3.0 * 0.1875 * var_se);
}

TEST(AvoidingSpec, Validation) {
  AvoidingSpec spec = two_curves(8);
  EXPECT_NO_THROW(spec.validate());
  spec.exit = {-1.0, 1.0};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = two_curves(8);
  spec.exit = {1.0};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = two_curves(8);
  spec.upper.assign(9, 0.5);
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = two_curves(8);
  spec.lower.assign(3, -5.0);
  EXPECT_THROW(spec.validate(), ConfigError);
  spec = two_curves(8);
  spec.entrance = {};
  spec.exit = {};
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(AvoidingEnsemble, SingleCurveIsBridge) {
  AvoidingSpec spec;
  spec.grid = UniformGrid::over(0.0, 1.0, 20);
  spec.entrance = {0.3};
  spec.exit = {-0.7};
  RngStream a(9, 2), b(9, 2);
  for (int k = 0; k < 20; ++k) {
    const PathEnsemble e = sample_rejection(spec, a);
    EXPECT_EQ(e.values, sample_bridge(0.3, -0.7, spec.grid, b));
  }
}

TEST(AvoidingEnsemble, RejectionOrderedWithExactEndpoints) {
  const auto batch = sample_avoiding_ensembles(two_curves(32), 500, 11, SamplingMethod::rejection, {}, 2);
  ASSERT_EQ(batch.samples.size(), 500u);
  EXPECT_GT(batch.acceptance_rate, 0.0);
  EXPECT_LE(batch.acceptance_rate, 1.0);
  for (const auto& e : batch.samples) {
    EXPECT_TRUE(e.ordered());
    EXPECT_TRUE(e.endpoints_match());
  }
}

TEST(AvoidingEnsemble, SymmetricPairHasZeroMeanMidpointSum) {
  const auto batch = sample_avoiding_ensembles(two_curves(16), 20000, 12, SamplingMethod::rejection);
  std::vector<double> sum(batch.samples.size()), top(batch.samples.size());
  for (std::size_t s = 0; s < sum.size(); ++s) {
    sum[s] = batch.samples[s].at(0, 8) + batch.samples[s].at(1, 8);
    top[s] = batch.samples[s].at(0, 8);
  }
  const auto st = summarize(sum);
  EXPECT_NEAR(st.mean, 0.0, 3.5 * st.standard_error);
  // Repulsion pushes the top curve above its free bridge mean of 1.
  EXPECT_GT(summarize(top).mean, 1.0);
}

TEST(AvoidingEnsemble, ThreadCountIndependent) {
  const auto a = sample_avoiding_ensembles(two_curves(16), 64, 5, SamplingMethod::rejection, {}, 1);
  const auto b = sample_avoiding_ensembles(two_curves(16), 64, 5, SamplingMethod::rejection, {}, 4);
  for (std::size_t s = 0; s < 64; ++s) EXPECT_EQ(a.samples[s].values, b.samples[s].values);
}

TEST(AvoidingEnsemble, McmcAgreesWithRejection) {
  const AvoidingSpec spec = two_curves(16);
  McmcOptions opts;
  opts.burn_in_sweeps = 5000;
  opts.pilot_sweeps = 5000;
  const auto mcmc = sample_avoiding_ensembles(spec, 4000, 21, SamplingMethod::mcmc, opts);
  const auto rej = sample_avoiding_ensembles(spec, 4000, 22, SamplingMethod::rejection);
  EXPECT_GE(mcmc.thinning, static_cast<std::size_t>(std::ceil(2.0 * mcmc.autocorrelation_time)));
  EXPECT_GT(mcmc.acceptance_rate, 0.0);
  for (const auto& e : mcmc.samples) ASSERT_TRUE(e.ordered());
  for (std::size_t c : {0u, 1u}) {
    const auto ks = ks_two_sample(column(mcmc.samples, c, 8), column(rej.samples, c, 8));
    EXPECT_GT(ks.p_value, 0.01) << "curve " << c << " D = " << ks.statistic;
  }
}

TEST(AvoidingEnsemble, ShiftEquivariance) {
  AvoidingSpec spec = two_curves(24);
  AvoidingSpec moved = spec;
  moved.grid = spec.grid.shifted(3.7);
  const auto a = sample_avoiding_ensembles(spec, 32, 8, SamplingMethod::rejection);
  const auto b = sample_avoiding_ensembles(moved, 32, 8, SamplingMethod::rejection);
  for (std::size_t s = 0; s < 32; ++s) EXPECT_EQ(a.samples[s].values, b.samples[s].values);
  RngStream r1(1, 1), r2(1, 1);
  McmcOptions opts;
  opts.burn_in_sweeps = 50;
  EXPECT_EQ(sample_avoiding_ensemble(spec, r1, SamplingMethod::mcmc, opts).values,
            sample_avoiding_ensemble(moved, r2, SamplingMethod::mcmc, opts).values);
}

TEST(AvoidingEnsemble, TightBarriersAreInfeasibleForRejection) {
  AvoidingSpec spec;
  spec.grid = UniformGrid::over(0.0, 1.0, 64);
  spec.entrance = {0.0};
  spec.exit = {0.0};
  spec.upper.assign(65, 0.01);
  spec.lower.assign(65, -0.01);
  EXPECT_THROW(sample_avoiding_ensembles(spec, 4, 1, SamplingMethod::rejection), InfeasibleError);
  McmcOptions opts;
  opts.burn_in_sweeps = 200;
  opts.pilot_sweeps = 200;
  const auto batch = sample_avoiding_ensembles(spec, 10, 1, SamplingMethod::mcmc, opts);
  for (const auto& e : batch.samples) EXPECT_TRUE(e.ordered());
}

TEST(GibbsWindow, ResampleTouchesOnlyTheWindowAndKeepsOrder) {
  const AvoidingSpec spec = two_curves(32);
  RngStream rng(13, 0);
  PathEnsemble ens = sample_rejection(spec, rng);
  const GibbsWindow w{1, 1, 8, 24};
  for (int k = 0; k < 20; ++k) {
    const PathEnsemble before = ens;
    resample_window(ens, w, rng);
    EXPECT_TRUE(ens.ordered());
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t i = 0; i <= 32; ++i)
        if (!w.contains(c, i)) {
          EXPECT_EQ(ens.at(c, i), before.at(c, i));
        }
  }
  EXPECT_THROW(resample_window(ens, GibbsWindow{0, 2, 8, 24}, rng), ConfigError);
  EXPECT_THROW(resample_window(ens, GibbsWindow{0, 1, 8, 9}, rng), ConfigError);
  EXPECT_THROW(resample_window(ens, GibbsWindow{0, 1, 8, 40}, rng), ConfigError);
}

TEST(GibbsWindow, ResamplingPreservesTheLaw) {
  const auto report = gibbs_resample_check(two_curves(32), GibbsWindow{0, 1, 8, 24}, 3000, 99);
  EXPECT_GT(report.p_value, 0.01);
  EXPECT_GT(report.p_value_repeat, 0.01);
  EXPECT_EQ(report.ordering_violations, 0u);
  EXPECT_EQ(report.outside_window_mismatches, 0u);
  EXPECT_EQ(report.window_center_time, 0.5);
}

TEST(ParabolicShift, RoundTripAndOrigin) {
  const auto grid = UniformGrid::over(-2.0, 2.0, 16);
  RngStream rng(2, 0);
  std::vector<double> a(grid.points());
  for (auto& v : a) v = rng.normal();
  const auto l = parabolic_shift(a, grid, ParabolicDirection::to_gibbs, 0.4);
  const auto back = parabolic_shift(l, grid, ParabolicDirection::to_airy, 0.4);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(back[i], a[i], 1e-14);
  EXPECT_NEAR(l[8], a[8] / std::numbers::sqrt2 + 0.4, 1e-15);
  std::vector<double> parabola(grid.points());
  for (std::size_t i = 0; i < parabola.size(); ++i) parabola[i] = grid.time(i) * grid.time(i) + 1.0;
  for (double v : parabolic_shift(parabola, grid, ParabolicDirection::to_gibbs)) {
    EXPECT_NEAR(v, 1.0 / std::numbers::sqrt2, 1e-14);
  }
  const std::vector<double> times{0.0, 1.0};
  EXPECT_THROW(parabolic_shift(std::vector<double>{1.0}, times, ParabolicDirection::to_airy), ConfigError);
}

TEST(Gue, SturmBisectionMatchesDenseEigensolver) {
  RngStream rng(6, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 30 + 7 * static_cast<std::size_t>(trial);
    std::vector<double> d(n), e(n - 1);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) m(i, i) = d[i] = rng.normal();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      e[i] = std::sqrt(rng.gamma(static_cast<double>(n - 1 - i)));
      m(i, i + 1) = m(i + 1, i) = e[i];
    }
    const double want = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().maxCoeff();
    EXPECT_NEAR(largest_eigenvalue_tridiagonal(d, e), want, 1e-11 * std::max(1.0, std::fabs(want)));
  }
}

TEST(Gue, EdgeSampleDeterministicAndCentred) {
  const auto a = gue_edge_sample(200, 2000, 31, 1);
  const auto b = gue_edge_sample(200, 2000, 31, 3);
  EXPECT_EQ(a, b);
  const auto st = summarize(a);
  EXPECT_LT(st.mean, -1.5);
  EXPECT_GT(st.mean, -2.1);
  EXPECT_NEAR(st.variance, 0.813, 0.15);
}

TEST(Gue, SizeRange) {
  EXPECT_THROW(gue_edge_sample(49, 1, 1), DomainError);
  EXPECT_THROW(gue_edge_sample(2001, 1, 1), DomainError);
  EXPECT_NO_THROW(gue_edge_sample(50, 1, 1));
}
