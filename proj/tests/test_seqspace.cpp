#include <random>

#include <gtest/gtest.h>

#include "distort/finite_vector.hpp"
#include "distort/io.hpp"
#include "test_support.hpp"

using namespace distort;

TEST(FiniteVector, DropsZerosAndValidates) {
  const FiniteVector x({{1, 0.0}, {3, 2.0}, {5, 0.0}});
  EXPECT_EQ(x.size(), 1u);
  EXPECT_EQ(x.support(), std::vector<Index>{3});
  EXPECT_EQ(x[3], 2.0);
  EXPECT_EQ(x[4], 0.0);
  EXPECT_THROW(FiniteVector({{2, 1.0}, {2, 1.0}}), Error);
  EXPECT_THROW(FiniteVector({{3, 1.0}, {2, 1.0}}), Error);
  EXPECT_THROW(FiniteVector({{0, 1.0}}), Error);
  EXPECT_THROW(FiniteVector({{1, std::nan("")}}), Error);
}

TEST(FiniteVector, CollectSumsDuplicates) {
  const auto x = collect({{4, 1.0}, {2, 3.0}, {4, 2.0}, {7, 1.0}, {7, -1.0}});
  EXPECT_EQ(x, FiniteVector({{2, 3.0}, {4, 3.0}}));
}

TEST(Restrict, Examples) {
  const FiniteVector x({{1, 1.0}, {2, 2.0}, {3, 3.0}});
  EXPECT_EQ(restrict(x, std::set<Index>{2}), FiniteVector({{2, 2.0}}));
  EXPECT_EQ(restrict(x, x.support()), x);
  EXPECT_EQ(restrict(FiniteVector({{1, 1.0}, {5, -4.0}}), Segment(2, 9)), FiniteVector({{5, -4.0}}));
  EXPECT_THROW(Segment(3, 2), Error);
}

TEST(Restrict, DisjointUnionIsExact) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const auto x = testing_support::random_vector(rng, 10, 20);
    std::set<Index> A, B;
    for (Index i = 1; i <= 20; ++i) (i % 3 == 0 ? A : B).insert(i);
    std::set<Index> U = A;
    U.insert(B.begin(), B.end());
    EXPECT_EQ(restrict(x, A) + restrict(x, B), restrict(x, U));
  }
}

TEST(PointwiseMul, Examples) {
  EXPECT_EQ(pointwise_mul(FiniteVector({{1, 1.0}, {2, 2.0}}), FiniteVector({{2, 3.0}, {3, 5.0}})),
            FiniteVector({{2, 6.0}}));
  EXPECT_TRUE(pointwise_mul(FiniteVector({{1, 1.0}}), FiniteVector{}).empty());
  const FiniteVector y({{1, -0.5}, {2, 0.75}});
  EXPECT_EQ(pointwise_mul(y, y), FiniteVector({{1, 0.25}, {2, 9.0 / 16.0}}));
}

TEST(PointwiseMul, CommutativeAssociative) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto a = testing_support::random_vector(rng, 6, 10);
    const auto b = testing_support::random_vector(rng, 6, 10);
    const auto c = testing_support::random_vector(rng, 6, 10);
    EXPECT_EQ(pointwise_mul(a, b), pointwise_mul(b, a));
    const auto l = pointwise_mul(pointwise_mul(a, b), c), r = pointwise_mul(a, pointwise_mul(b, c));
    ASSERT_EQ(l.support(), r.support());
    for (auto i : l.support()) EXPECT_NEAR(l[i], r[i], 1e-15 * std::abs(l[i]));
  }
}

TEST(AbsSignSplit, Examples) {
  const auto s = abs_sign_split(FiniteVector({{1, -2.0}, {4, 3.0}}));
  EXPECT_EQ(s.magnitude, FiniteVector({{1, 2.0}, {4, 3.0}}));
  EXPECT_EQ(s.sign, FiniteVector({{1, -1.0}, {4, 1.0}}));
  const FiniteVector pos({{2, 0.5}, {3, 1.5}});
  EXPECT_EQ(abs_sign_split(pos).magnitude, pos);
  EXPECT_EQ(abs_sign_split(pos).sign, FiniteVector({{2, 1.0}, {3, 1.0}}));
  EXPECT_TRUE(abs_sign_split(FiniteVector{}).magnitude.empty());
  EXPECT_TRUE(abs_sign_split(FiniteVector{}).sign.empty());
}

TEST(AbsSignSplit, RecombinesExactly) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const auto x = testing_support::random_vector(rng, 8, 30);
    const auto s = abs_sign_split(x);
    EXPECT_EQ(pointwise_mul(s.magnitude, s.sign), x);
  }
}

TEST(Combine, Examples) {
  const std::vector<double> ones{1.0, 1.0}, mixed{2.0, -1.0};
  EXPECT_EQ(combine(BlockSequence{FiniteVector::unit(1), FiniteVector::unit(2)}, ones),
            FiniteVector({{1, 1.0}, {2, 1.0}}));
  EXPECT_EQ(combine(BlockSequence{FiniteVector::unit(1), FiniteVector::unit(3)}, mixed),
            FiniteVector({{1, 2.0}, {3, -1.0}}));
  const std::vector<FiniteVector> interleaved{FiniteVector({{1, 1.0}, {3, 1.0}}), FiniteVector::unit(2)};
  try {
    combine(interleaved, ones);
    FAIL() << "expected NonSuccessive";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonSuccessive);
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(combine(BlockSequence{FiniteVector::unit(1)}, ones), Error);
}

TEST(BlockSequence, ZeroBlocksImposeNoOrder) {
  EXPECT_NO_THROW(BlockSequence({FiniteVector::unit(2), FiniteVector{}, FiniteVector::unit(3)}));
  EXPECT_THROW(BlockSequence({FiniteVector::unit(2), FiniteVector{}, FiniteVector::unit(2)}), Error);
}

TEST(Arithmetic, LinearOperations) {
  const FiniteVector x({{1, 1.0}, {3, 2.0}}), y({{1, -1.0}, {2, 4.0}});
  EXPECT_EQ(x + y, FiniteVector({{2, 4.0}, {3, 2.0}}));
  EXPECT_EQ(x - x, FiniteVector{});
  EXPECT_EQ(scale(x, 0.0), FiniteVector{});
  EXPECT_DOUBLE_EQ(dot(x, y), -1.0);
  EXPECT_DOUBLE_EQ(l1_mass(y), 5.0);
  EXPECT_DOUBLE_EQ(max_abs(y), 4.0);
  EXPECT_EQ(shift(x, 2), FiniteVector({{3, 1.0}, {5, 2.0}}));
  EXPECT_EQ(spread(x, {4, 9}), FiniteVector({{4, 1.0}, {9, 2.0}}));
}

TEST(Json, RoundTripIsIdentity) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto x = testing_support::random_vector(rng, 7, 50);
    const json j = to_json(x);
    EXPECT_EQ(vector_from_json(json::parse(j.dump())), x);
  }
  EXPECT_THROW(vector_from_json(json::parse("[[0, 1.0]]")), Error);
  EXPECT_THROW(vector_from_json(json::parse("[[1, 1.0], [1, 2.0]]")), Error);
  EXPECT_THROW(vector_from_json(json::parse("{\"a\": 1}")), Error);
  const BlockSequence b{FiniteVector::unit(1), FiniteVector({{2, 0.5}, {4, -1.0}})};
  EXPECT_EQ(blocks_from_json(json::parse(to_json(b).dump())).blocks(), b.blocks());
}
