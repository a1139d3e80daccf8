#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support/instances.hpp"
#include "tailprod/io.hpp"
#include "tailprod/verification.hpp"

using namespace tailprod;
using tailprod::fixtures::q;

namespace {

SimulationConfig config(std::vector<double> xs, std::uint64_t n, std::uint64_t seed, std::uint64_t chunks = 1,
                        unsigned threads = 1) {
  SimulationConfig cfg;
  cfg.x_grid = std::move(xs);
  cfg.samples_per_x = n;
  cfg.seed = seed;
  cfg.chunks = chunks;
  cfg.threads = threads;
  return cfg;
}

}  // namespace

TEST(Rng, ReferenceOutputs) {
  // values from an independent Python implementation of both generators
  SplitMix64 sm(1234567);
  EXPECT_EQ(sm.next(), 6457827717110365317ULL);
  EXPECT_EQ(sm.next(), 3203168211198807973ULL);
  Xoshiro256StarStar x(42);
  EXPECT_EQ(x.next(), 1546998764402558742ULL);
  EXPECT_EQ(x.next(), 6990951692964543102ULL);
  EXPECT_EQ(x.next(), 12544586762248559009ULL);
  Xoshiro256StarStar a(7), b(7), c(8);
  for (int k = 0; k < 100; ++k) {
    const auto va = a.next();
    EXPECT_EQ(va, b.next());
    EXPECT_NE(va, c.next());
  }
  for (int k = 0; k < 10000; ++k) {
    const double u = a.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Normalizer, ParetoOne) {
  const auto spec = fixtures::two_by_two_spec();
  const RationalVector kappa{q(3, 2), 1};
  for (double x : {10.0, 1e3, 1e6}) EXPECT_NEAR(normalizer(spec, kappa, x), std::pow(x, -2.5), 1e-12 * std::pow(x, -2.5));
  EXPECT_DOUBLE_EQ(normalizer(fixtures::breiman_spec(), {1, 0}, 100), 0.01);
}

TEST(SimulationConfig, Validation) {
  EXPECT_THROW(config({}, 10, 1).validate(), std::invalid_argument);
  EXPECT_THROW(config({10, 5}, 10, 1).validate(), std::invalid_argument);
  EXPECT_THROW(config({1}, 10, 1).validate(), std::invalid_argument);
  EXPECT_THROW(config({10}, 0, 1).validate(), std::invalid_argument);
  EXPECT_THROW(config({10}, 10, 1, 0).validate(), std::invalid_argument);
  EXPECT_THROW(config({INFINITY}, 10, 1).validate(), std::invalid_argument);
  EXPECT_NO_THROW(config({2, 10}, 1, 1).validate());
}

TEST(EstimateRatio, RequiresCertifiedReport) {
  const ProblemSpec spec(RationalMatrix{{1, 1}}, {1}, {MarginalModel::pareto(1), MarginalModel::pareto(1)});
  EXPECT_THROW(estimate_ratio(spec, analyze(spec), config({10}, 100, 1)), HypothesisError);
}

TEST(EstimateRatio, SingleFactor) {
  // P(X > x) = 1/x exactly, so the ratio is 1 up to sampling noise
  const auto spec = fixtures::single_spec();
  const auto sim = estimate_ratio(spec, analyze(spec), config({10, 100}, 1000000, 5));
  for (const auto& row : sim.rows) EXPECT_NEAR(row.ratio, 1.0, 4 * row.stderr_ratio);
}

TEST(EstimateRatio, BreimanNearConstant) {
  const auto spec = fixtures::breiman_spec();
  const auto sim = estimate_ratio(spec, analyze(spec), config({100}, 2000000, 42));
  EXPECT_NEAR(sim.rows[0].ratio, 4.0 / 3.0, 4 * sim.rows[0].stderr_ratio);
  EXPECT_EQ(sim.prng, "xoshiro256**");
}

TEST(EstimateRatioProperty, DeterministicAcrossThreads) {
  const auto spec = fixtures::two_by_two_spec();
  const auto report = analyze(spec);
  const auto one = estimate_ratio(spec, report, config({10, 30, 100}, 200000, 9, 8, 1));
  const auto four = estimate_ratio(spec, report, config({10, 30, 100}, 200000, 9, 8, 4));
  const auto again = estimate_ratio(spec, report, config({10, 30, 100}, 200000, 9, 8, 3));
  EXPECT_EQ(simulation_to_csv(one), simulation_to_csv(four));
  EXPECT_EQ(simulation_to_csv(one), simulation_to_csv(again));
  const auto other_seed = estimate_ratio(spec, report, config({10, 30, 100}, 200000, 10, 8, 1));
  EXPECT_NE(simulation_to_csv(one), simulation_to_csv(other_seed));
}

TEST(ChunkSeed, DistinctAcrossSeedsAndChunks) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed)
    for (std::uint64_t k = 0; k < 64; ++k) seen.insert(chunk_seed(seed, k));
  EXPECT_EQ(seen.size(), 64u * 64u);
}

TEST(EstimateRatio, HitsAreMonotoneInX) {
  const auto spec = fixtures::example3_spec();
  const auto sim = estimate_ratio(spec, analyze(spec), config({2, 4, 8, 16}, 200000, 3));
  for (std::size_t k = 1; k < sim.rows.size(); ++k) EXPECT_LE(sim.rows[k].hits, sim.rows[k - 1].hits);
}

TEST(ExactProb, SingleFactor) {
  const ProbabilityEstimate p = exact_prob(fixtures::single_spec(), 1000);
  EXPECT_NEAR(p.value, 1e-3, 1e-12);
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(exact_prob(fixtures::single_spec(4), 1000).value, 0.25e-3, 1e-12);
}

TEST(ExactProb, BreimanMatchesConstant) {
  const auto spec = fixtures::breiman_spec();
  const double x = 1e4;
  const ProbabilityEstimate p = exact_prob(spec, x);
  EXPECT_TRUE(p.converged);
  EXPECT_NEAR(p.value / normalizer(spec, {1, 0}, x), 4.0 / 3.0, 0.01 * 4.0 / 3.0);
  // closed form: E[min(X2^{1/2}/x, 1)] = (4/3)/x - (1/3) x^{-4}
  EXPECT_NEAR(p.value, 4.0 / 3.0 / x - std::pow(x, -4) / 3.0, 1e-9 * p.value);
}

TEST(ExactProb, TwoByTwoIsExactlyRegular) {
  // for x >= 1 the probability equals (2/3) x^{-5/2}
  const auto spec = fixtures::two_by_two_spec();
  for (double x : {10.0, 100.0, 1e4}) {
    const ProbabilityEstimate p = exact_prob(spec, x);
    EXPECT_NEAR(p.value, 2.0 / 3.0 * std::pow(x, -2.5), 1e-8 * p.value);
    EXPECT_LE(p.error, 1e-6 * p.value);
  }
}

TEST(ExactProb, TwoByTwoAgreesWithMonteCarlo) {
  const auto spec = fixtures::two_by_two_spec();
  const auto sim = estimate_ratio(spec, analyze(spec), config({10}, 10000000, 2024, 4, 0));
  const double oracle = exact_prob(spec, 10).value;
  const auto& row = sim.rows[0];
  EXPECT_NEAR(row.p_hat, oracle, 4 * row.stderr_ratio * row.normalizer);
}

TEST(ExactProb, ThreeFactorsAgreeWithMonteCarlo) {
  const ProblemSpec raw(RationalMatrix{{1, q(-1, 2), q(1, 3)}, {0, 1, q(1, 2)}}, {1, 2},
                        {MarginalModel::pareto(1), MarginalModel::pareto(1), MarginalModel::pareto(3)});
  EXPECT_FALSE(analyze(raw).certified());
  const ProblemSpec spec = rescale_problem(raw, 2, 3);
  const auto report = analyze(spec);
  ASSERT_TRUE(report.certified());
  const auto sim = estimate_ratio(spec, report, config({5}, 4000000, 11));
  const ProbabilityEstimate p = exact_prob(spec, 5);
  const auto& row = sim.rows[0];
  EXPECT_NEAR(row.p_hat, p.value, 4 * row.stderr_ratio * row.normalizer + p.error);
}

TEST(ExactProb, ConstantFactor) {
  // X1 * 4^{1/2} > x  <=>  X1 > x/2
  const ProblemSpec spec(RationalMatrix{{1, q(1, 2)}}, {1}, {MarginalModel::pareto(1), MarginalModel::constant(4)});
  EXPECT_NEAR(exact_prob(spec, 100).value, 0.02, 1e-12);
}

TEST(ExactProb, RejectsLargeInstances) {
  const ProblemSpec spec(RationalMatrix{{1, 1, 1, 1, 1}}, {1}, std::vector<MarginalModel>(5, MarginalModel::pareto(1)));
  EXPECT_THROW(exact_prob(spec, 10), std::invalid_argument);
  EXPECT_THROW(exact_prob(fixtures::single_spec(), -1), std::invalid_argument);
}

TEST(SlopeFit, Breiman) {
  const auto curve = oracle_curve(fixtures::breiman_spec(), {1e2, 1e3, 1e4, 1e5});
  const SlopeFit fit = slope_fit(curve);
  EXPECT_NEAR(fit.slope, -1.0, 0.02);
  EXPECT_LE(fit.ci_low, fit.slope);
  EXPECT_GE(fit.ci_high, fit.slope);
  EXPECT_EQ(fit.points_used, 4u);
}

TEST(SlopeFit, TwoByTwo) {
  const auto spec = fixtures::two_by_two_spec();
  const auto report = analyze(spec);
  const SlopeFit fit = slope_fit(oracle_curve(spec, {1e2, 1e3, 1e4, 1e5}));
  EXPECT_NEAR(fit.slope, to_double(*report.rv_index), 0.05);
}

TEST(SlopeFit, MonteCarloCurve) {
  const auto spec = fixtures::breiman_spec();
  const auto sim = estimate_ratio(spec, analyze(spec), config({10, 30, 100, 300, 1000}, 2000000, 8));
  const SlopeFit fit = slope_fit(curve_from(sim));
  EXPECT_NEAR(fit.slope, -1.0, 0.05);
  EXPECT_LT(fit.ci_low, -1.0 + 0.05);
  EXPECT_GT(fit.ci_high, -1.0 - 0.05);
}

TEST(SlopeFit, Errors) {
  EXPECT_THROW(slope_fit(TailCurve{{10, 100}, {0.1, 0.01}, {0, 0}}), std::invalid_argument);
  EXPECT_THROW(slope_fit(TailCurve{{10, 100, 1000}, {0.1, 0.01, 0}, {0, 0, 0}}), std::invalid_argument);
  EXPECT_THROW(slope_fit(TailCurve{{10, 100, 1000}, {0.1, 0.01}, {0, 0}}), std::invalid_argument);
  const SlopeFit fit = slope_fit(TailCurve{{10, 100, 1000, 1e4}, {0.1, 0.01, 0.001, 0}, {0, 0, 0, 0}});
  EXPECT_EQ(fit.points_used, 3u);
  EXPECT_EQ(fit.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(fit.slope, -1.0);
}
