#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "distort/dual_norm.hpp"
#include "distort/entropy_max.hpp"
#include "distort/oracles.hpp"
#include "test_support.hpp"

using namespace distort;
using testing_support::dual_entropy_grid_n2;

namespace {

const double kLog2of3 = std::log2(3.0);

// Certified duality gap: for x on S(X) and y in Ba(X*),
// E(h,x) <= E_X(h) <= sum h log h - E(h,y).
double duality_gap(const FiniteVector& h, const FiniteVector& x, const FiniteVector& y) {
  double s = 0.0;
  for (const auto& [i, v] : h) s += v * std::log(v);
  return s - entropy(h, x).value() - entropy(h, y).value();
}

}  // namespace

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(FiniteVector::unit(1), FiniteVector::unit(1)), EntropyValue(0.0));
  const FiniteVector h{{1, 0.5}, {2, 0.5}};
  const FiniteVector x{{1, std::sqrt(0.5)}, {2, std::sqrt(0.5)}};
  EXPECT_NEAR(entropy(h, x).value(), -std::log(2.0) / 2, 1e-15);
  EXPECT_TRUE(entropy(FiniteVector::unit(1), FiniteVector::unit(2)).is_neg_infinity());
  EXPECT_THROW(entropy(FiniteVector::unit(1), FiniteVector::unit(2)).value(), Error);
  EXPECT_LT(EntropyValue::neg_infinity(), EntropyValue(-1e300));
  EXPECT_EQ(entropy({}, x), EntropyValue(0.0));
}

TEST(Entropy, EtaPsi) {
  const auto g = [](double a) { return std::log(0.5 * (a + 1 / a)); };
  EXPECT_NEAR(eta(0.5), g(std::sqrt(1.5)), 1e-15);
  EXPECT_NEAR(eta(0.5), 0.020410997260127586, 1e-12);
  EXPECT_NEAR(psi(0.5), 0.5 * eta(0.5), 1e-16);
  EXPECT_LT(eta(0.2), eta(0.5));
  for (double e = 0.01; e < 1.0; e += 0.01) {
    EXPECT_GT(eta(e), 0.0);
    EXPECT_LT(psi(e), e);
    // the defining strict inequality just outside the band
    for (double a : {1 - e - 1e-9, 1 + e + 1e-9})
      if (a > 0) EXPECT_GT(g(std::sqrt(a)), eta(e));
  }
  EXPECT_THROW(eta(0.0), Error);
  EXPECT_THROW(psi(1.0), Error);
}

TEST(EntropyMax, ClosedFormExamples) {
  const LpNorm l2(2.0);
  auto r = entropy_max(FiniteVector::unit(3), l2);
  EXPECT_EQ(r.x, FiniteVector::unit(3));
  EXPECT_EQ(r.entropy, 0.0);
  const FiniteVector h{{1, 0.5}, {2, 0.5}};
  r = entropy_max(h, l2);
  EXPECT_NEAR(r.x[1], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(r.entropy, -std::log(2.0) / 2, 1e-15);
  EXPECT_EQ(r.method, EntropyMethod::ClosedForm);
  EXPECT_THROW(entropy_max({}, l2), Error);
  EXPECT_THROW(entropy_max(FiniteVector{{1, 0.7}}, l2), Error);
}

TEST(EntropyMax, NumericMatchesClosedForm) {
  std::mt19937_64 rng(11);
  for (double p : {1.5, 2.0, 3.0}) {
    const LpNorm X(p);
    for (int t = 0; t < 40; ++t) {
      const auto h = testing_support::random_simplex(rng, 1 + t % 10);
      const auto r = entropy_max(h, X, {.method = EntropyMethod::Multiplicative});
      for (const auto& [i, v] : h) ASSERT_NEAR(r.x[i], std::pow(v, 1 / p), 1e-7) << p << " " << t;
      EXPECT_LE(r.residual, 1e-7);
    }
  }
}

TEST(EntropyMax, SignsAndSupport) {
  const FiniteVector h{{2, -0.25}, {5, 0.75}};
  for (const char* tag : {"lp:2", "schlumprecht", "conv:2:schlumprecht", "lp:1", "lp:inf"}) {
    const auto X = make_oracle(tag);
    const auto r = entropy_max(h, *X);
    EXPECT_EQ(r.x.support(), h.support()) << tag;
    EXPECT_LT(r.x[2], 0.0);
    EXPECT_GT(r.x[5], 0.0);
    EXPECT_NEAR(X->norm(r.x), 1.0, 1e-8) << tag;
  }
}

TEST(EntropyMax, SchlumprechtPairIsSymmetric) {
  const SchlumprechtNorm S;
  const FiniteVector h{{1, 0.5}, {2, 0.5}};
  const auto r = entropy_max(h, S);
  EXPECT_NEAR(r.x[1], 1.0 / (2.0 / kLog2of3), 1e-9);
  EXPECT_NEAR(r.x_star[1], 1.0 / kLog2of3, 1e-9);
  EXPECT_NEAR(r.x_star[2], 1.0 / kLog2of3, 1e-9);
  EXPECT_NEAR(r.dual_entropy, -std::log(kLog2of3), 1e-9);
  EXPECT_NEAR(r.dual_entropy, dual_entropy_grid_n2(0.5, 0.5), 1e-8);
}

TEST(EntropyMax, DualEntropyMatchesGridAtN2) {
  const DualEntropyEstimator est(std::make_shared<SchlumprechtNorm>());
  for (double h1 : {0.05, 0.2, 0.35, 0.5, 0.61, 0.9}) {
    const FiniteVector h{{1, h1}, {2, 1 - h1}};
    EXPECT_NEAR(est(h).value, dual_entropy_grid_n2(h1, 1 - h1), 1e-8) << h1;
  }
  // homogeneity and the basis vectors
  EXPECT_NEAR(est(FiniteVector{{1, 1.0}, {2, 1.0}}).value, 2 * dual_entropy_grid_n2(0.5, 0.5), 1e-8);
  EXPECT_NEAR(est(FiniteVector::unit(1)).value, 0.0, 1e-12);
}

TEST(EntropyMax, CertifiedOptimalityForPolyhedralNorms) {
  std::mt19937_64 rng(12);
  for (const char* tag : {"schlumprecht", "lp:1", "lp:inf", "conv:2:schlumprecht", "conv:3:schlumprecht"}) {
    const auto X = make_oracle(tag);
    for (int t = 0; t < 25; ++t) {
      const auto h = testing_support::random_simplex(rng, 1 + t % 12, 1 + t % 3);
      const auto r = entropy_max(h, *X);
      ASSERT_LE(r.residual, 1e-7) << tag;
      EXPECT_NEAR(X->norm(r.x), 1.0, 1e-8) << tag;
      // y must be in the dual ball: a convex combination of norming functionals
      const auto est = dual_norm_estimate(r.x_star, *X, {.budget = 200, .random_starts = 2});
      EXPECT_LE(est.lower, 1.0 + 1e-8) << tag;
      EXPECT_LE(duality_gap(h, r.x, r.x_star), 1e-7) << tag << " " << t;
    }
  }
}

TEST(EntropyMax, LocalPerturbationOptimality) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> N01;
  const auto X = make_oracle("schlumprecht");
  for (int t = 0; t < 10; ++t) {
    const auto h = testing_support::random_simplex(rng, 2 + t % 7);
    const auto r = entropy_max(h, *X);
    for (int k = 0; k < 100; ++k) {
      std::vector<FiniteVector::Entry> e;
      for (const auto& [i, v] : r.x) e.emplace_back(i, std::max(1e-12, v * (1 + 0.05 * N01(rng))));
      FiniteVector y(e);
      y = scale(y, 1 / X->norm(y));
      EXPECT_GE(r.entropy, entropy(h, y).value() - 1e-7);
    }
  }
}

TEST(EntropyMax, IndependentStartsAgree) {
  std::mt19937_64 rng(14);
  const auto X = make_oracle("conv:2:lp:1.5");
  for (int t = 0; t < 10; ++t) {
    const auto h = testing_support::random_simplex(rng, 2 + t % 8);
    const auto a = entropy_max(h, *X, {.method = EntropyMethod::Multiplicative});
    const auto b = entropy_max(h, *X);
    for (const auto& [i, v] : a.x) EXPECT_NEAR(v, b.x[i], 1e-6);
  }
}

TEST(EntropyMax, LogBaseInvariance) {
  // Maximising sum h log_b x for another base b rescales the objective only.
  std::mt19937_64 rng(15);
  const LpNorm X(3.0);
  const auto h = testing_support::random_simplex(rng, 6);
  const auto r = entropy_max(h, X, {.method = EntropyMethod::Multiplicative});
  const double e2 = r.entropy / std::log(2.0);
  double direct = 0;
  for (const auto& [i, v] : h) direct += v * std::log2(r.x[i]);
  EXPECT_NEAR(e2, direct, 1e-12);
}

TEST(EntropyMax, ConvexifiedReduction) {
  std::mt19937_64 rng(16);
  const auto S = std::make_shared<SchlumprechtNorm>();
  const ConvexifiedNorm S2(2.0, S);
  for (int t = 0; t < 10; ++t) {
    const auto h = testing_support::random_simplex(rng, 1 + t % 9);
    const auto base = entropy_max(h, *S);
    const auto conv = entropy_max(h, S2);
    EXPECT_NEAR(conv.entropy, base.entropy / 2, 1e-12);
    for (const auto& [i, v] : h) EXPECT_NEAR(conv.x[i], std::sqrt(base.x[i]), 1e-12);
  }
}

TEST(EntropyMax, ClosedFormUnavailable) {
  const SchlumprechtNorm S;
  EXPECT_THROW(entropy_max(FiniteVector::unit(1), S, {.method = EntropyMethod::ClosedForm}), Error);
}

TEST(EntropyMax, NonConvergenceReported) {
  const LpNorm X(1.5);
  const FiniteVector h{{1, 0.1}, {2, 0.2}, {3, 0.7}};
  try {
    entropy_max(h, X, {.budget = 1, .method = EntropyMethod::Multiplicative});
    FAIL() << "expected NonConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
    EXPECT_TRUE(e.has_measured());
  }
}

TEST(MazurMap, Examples) {
  const FiniteVector h{{1, 0.5}, {2, 0.5}};
  const auto m = mazur_map(h, 2.0);
  EXPECT_NEAR(m[1], std::sqrt(0.5), 1e-16);
  EXPECT_EQ(mazur_map(FiniteVector::unit(4), 3.0), FiniteVector::unit(4));
  const auto m2 = mazur_map(FiniteVector{{1, -0.25}, {2, 0.75}}, 2.0);
  EXPECT_NEAR(m2[1], -0.5, 1e-16);
  EXPECT_NEAR(m2[2], std::sqrt(3.0) / 2, 1e-16);
  EXPECT_THROW(mazur_map(FiniteVector{{1, 0.3}}, 2.0), Error);
}

TEST(SupportFunctionalInverse, Examples) {
  const LpNorm l2(2.0);
  EXPECT_EQ(support_functional_inverse(FiniteVector::unit(1), l2), FiniteVector::unit(1));
  const auto h = support_functional_inverse(FiniteVector{{1, std::sqrt(0.5)}, {2, std::sqrt(0.5)}}, l2);
  EXPECT_NEAR(h[1], 0.5, 1e-15);
  EXPECT_NEAR(h[2], 0.5, 1e-15);
  EXPECT_THROW(support_functional_inverse({}, l2), Error);
}

TEST(SupportFunctionalInverse, RoundTrip) {
  std::mt19937_64 rng(17);
  for (double p : {1.5, 2.0, 3.0}) {
    const LpNorm X(p);
    for (int t = 0; t < 30; ++t) {
      const auto h = testing_support::random_simplex(rng, 1 + t % 10);
      const auto back = support_functional_inverse(entropy_max(h, X).x, X);
      for (const auto& [i, v] : h) EXPECT_NEAR(back[i], v, 1e-8);
      const auto viaMazur = support_functional_inverse(mazur_map(h, p), X);
      for (const auto& [i, v] : h) EXPECT_NEAR(viaMazur[i], v, 1e-8);
    }
  }
}

TEST(Factorize, Examples) {
  const auto X3 = make_oracle("lp:3");
  const FiniteVector h{{1, 0.5}, {2, 0.5}};
  const auto f = factorize(h, *X3);
  EXPECT_NEAR(f.x[1], std::pow(2.0, -1.0 / 3), 1e-15);
  EXPECT_NEAR(f.x_star[1], std::pow(2.0, -2.0 / 3), 1e-15);
  EXPECT_NEAR(lp_norm(f.x_star, 1.5), 1.0, 1e-14);
  const auto e = factorize(FiniteVector::unit(1), *make_oracle("schlumprecht"));
  EXPECT_EQ(e.x, FiniteVector::unit(1));
  EXPECT_EQ(e.x_star, FiniteVector::unit(1));
  EXPECT_EQ(e.residual, 0.0);
  const auto s = factorize(h, *make_oracle("schlumprecht"));
  EXPECT_NEAR(s.x_star[1], 1 / kLog2of3, 1e-9);
  EXPECT_LE(s.residual, 1e-7);
  EXPECT_THROW(factorize(FiniteVector{{1, -0.5}, {2, 0.5}}, *X3), Error);
}
