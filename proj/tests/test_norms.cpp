#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "distort/dual_norm.hpp"
#include "distort/norms.hpp"
#include "distort/oracles.hpp"
#include "distort/schlumprecht.hpp"
#include "test_support.hpp"

using namespace distort;

TEST(LpNorm, Examples) {
  EXPECT_DOUBLE_EQ(lp_norm(FiniteVector({{1, 3.0}, {2, 4.0}}), 2.0), 5.0);
  for (double p : {1.0, 1.5, 2.0, 3.0, 7.0, kInfinity}) EXPECT_DOUBLE_EQ(lp_norm(FiniteVector::unit(7), p), 1.0);
  EXPECT_DOUBLE_EQ(lp_norm(FiniteVector({{1, 1.0}, {2, -1.0}}), kInfinity), 1.0);
  EXPECT_THROW(lp_norm(FiniteVector::unit(1), 0.5), Error);
  EXPECT_THROW(LpNorm(0.9), Error);
}

TEST(LpNorm, ConjugateExponent) {
  EXPECT_DOUBLE_EQ(conjugate_exponent(2.0), 2.0);
  EXPECT_DOUBLE_EQ(conjugate_exponent(3.0), 1.5);
  EXPECT_TRUE(std::isinf(conjugate_exponent(1.0)));
  EXPECT_DOUBLE_EQ(conjugate_exponent(kInfinity), 1.0);
}

TEST(LpNorm, NormingFunctionalsAttainAndLieInDualBall) {
  std::mt19937_64 rng(5);
  for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) {
    const LpNorm X(p);
    for (int t = 0; t < 100; ++t) {
      const auto x = testing_support::random_vector(rng, 6, 12);
      const auto f = X.norming_functional(x);
      ASSERT_TRUE(f);
      EXPECT_NEAR(dot(*f, x), X.norm(x), 1e-12 * X.norm(x));
      EXPECT_NEAR(lp_norm(*f, conjugate_exponent(p)), 1.0, 1e-12);
    }
  }
  EXPECT_THROW(LpNorm(2.0).norming_functional({}), Error);
}

TEST(Convexified, Examples) {
  for (const char* base : {"lp:1", "lp:2", "schlumprecht"})
    EXPECT_NEAR(convexified_norm(FiniteVector::unit(1), 2.0, make_oracle(base)), 1.0, 1e-15);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto x = testing_support::random_vector(rng, 5, 10);
    EXPECT_NEAR(convexified_norm(x, 2.0, make_oracle("lp:1")), lp_norm(x, 2.0), 1e-13 * lp_norm(x, 2.0));
  }
  EXPECT_NEAR(convexified_norm({{1, 1.0}, {2, 1.0}}, 2.0, make_oracle("schlumprecht")),
              std::sqrt(2.0 / std::log2(3.0)), 1e-14);
  EXPECT_THROW(ConvexifiedNorm(1.0, make_oracle("lp:2")), Error);
}

TEST(Convexified, ScaleInvariantEvaluation) {
  const FiniteVector tiny({{1, 1e-200}, {2, 2e-200}});
  const double n = convexified_norm(tiny, 3.0, make_oracle("lp:1"));
  EXPECT_NEAR(n / 1e-200, lp_norm(FiniteVector({{1, 1.0}, {2, 2.0}}), 3.0), 1e-12);
}

TEST(Convexified, NormingFunctionalOverSchlumprecht) {
  std::mt19937_64 rng(7);
  const auto X = make_oracle("conv:2:schlumprecht");
  for (int t = 0; t < 100; ++t) {
    const auto x = testing_support::random_vector(rng, 6, 10);
    const auto f = X->norming_functional(x);
    ASSERT_TRUE(f);
    EXPECT_NEAR(dot(*f, x), X->norm(x), 1e-10 * X->norm(x));
    // the dual norm is approached from below by the estimator
    const DualNormOptions opt{.budget = 200, .random_starts = 4, .seed = static_cast<std::uint64_t>(t)};
    const auto est = dual_norm_estimate(*f, *X, opt);
    EXPECT_LE(est.lower, 1.0 + 1e-8);
  }
}

TEST(Oracles, HomogeneityTriangleUnconditional) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  for (const char* tag : {"lp:1", "lp:1.5", "lp:3", "lp:inf", "schlumprecht", "conv:2:schlumprecht", "conv:3:lp:1"}) {
    const auto X = make_oracle(tag);
    for (int t = 0; t < 100; ++t) {
      const auto x = testing_support::random_vector(rng, 6, 10);
      const auto y = testing_support::random_vector(rng, 6, 10);
      const double a = c(rng);
      EXPECT_NEAR(X->norm(scale(x, a)), std::abs(a) * X->norm(x), 1e-12 * X->norm(x) * (1 + std::abs(a))) << tag;
      EXPECT_LE(X->norm(x + y), X->norm(x) + X->norm(y) + 1e-10) << tag;
      EXPECT_NEAR(X->norm(abs(x)), X->norm(x), 1e-14 * X->norm(x)) << tag;
    }
  }
}

TEST(Oracles, TagsRoundTrip) {
  for (const char* tag : {"lp:1", "lp:2", "lp:inf", "schlumprecht", "conv:2:schlumprecht", "conv:1.5:lp:2"})
    EXPECT_EQ(make_oracle(make_oracle(tag)->tag())->tag(), make_oracle(tag)->tag());
  EXPECT_THROW(make_oracle("hilbert"), Error);
  EXPECT_THROW(make_oracle("lp:abc"), Error);
  EXPECT_THROW(make_oracle("conv:2"), Error);
}

TEST(DualNormEstimate, LowerBoundsOnly) {
  std::mt19937_64 rng(9);
  const LpNorm l3(3.0);
  for (int t = 0; t < 30; ++t) {
    const auto h = testing_support::random_vector(rng, 5, 8);
    const DualNormOptions opt{.budget = 600, .random_starts = 4, .seed = static_cast<std::uint64_t>(t)};
    const auto e = dual_norm_estimate(h, l3, opt);
    const double exact = lp_norm(h, 1.5);
    EXPECT_LE(e.lower, exact * (1 + 1e-12));
    EXPECT_GE(e.lower, exact * (1 - 1e-6));
    EXPECT_NEAR(l3.norm(e.witness), 1.0, 1e-12);
  }
  EXPECT_THROW(dual_norm_estimate({}, l3), Error);
}
