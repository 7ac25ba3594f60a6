#include <gtest/gtest.h>

#include <random>

#include "folsing/errors.hpp"
#include "folsing/jetring.hpp"
#include "test_support.hpp"

using namespace folsing;
using folsing::testkit::poly;

TEST(Monomial, GradedOrderPutsLowDegreeFirst) {
  const Monomial one = Monomial::one(2);
  const Monomial x = Monomial::variable(2, 0);
  const Monomial y = Monomial::variable(2, 1);
  EXPECT_LT(one, x);
  EXPECT_LT(x, y);
  EXPECT_LT(y, x * x);
  EXPECT_LT(x * x, x * y);
  EXPECT_LT(x * y, y * y);
  EXPECT_EQ((x * y).degree(), 2);
}

TEST(Monomial, CountsMatchBinomials) {
  // C(n + d - 1, d) monomials of degree d in n variables.
  EXPECT_EQ(monomials_of_degree(3, 2).size(), 6U);
  EXPECT_EQ(monomials_of_degree(2, 4).size(), 5U);
  EXPECT_EQ(monomials_up_to(2, 3).size(), 10U);
  EXPECT_EQ(monomials_up_to(4, 0).size(), 1U);
}

TEST(TruncatedPoly, AddTermDropsAboveWorkingOrder) {
  TruncatedPoly p(RingDims{1, 2});
  p.add_term(Monomial({3}), 5);
  p.add_term(Monomial({1}), 2);
  p.add_term(Monomial({1}), -2);
  EXPECT_TRUE(p.is_zero());
  EXPECT_EQ(p.degree(), -1);
  EXPECT_FALSE(p.order().has_value());
}

TEST(TruncatedPoly, ProductMatchesNaiveConvolution) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const RingDims ring{1 + trial % 3, 2 + trial % 4};
    const auto p = testkit::random_poly(rng, ring, 0, ring.order);
    const auto q = testkit::random_poly(rng, ring, 0, ring.order);
    EXPECT_EQ(mul_trunc(p, q), testkit::naive_product(p, q));
  }
}

TEST(TruncatedPoly, ProductWithCapDropsHighTerms) {
  const auto p = poly("1 + x1 + x2", 2, 4);
  const auto sq = mul_trunc(p, p, 1);
  EXPECT_EQ(sq, poly("1 + 2*x1 + 2*x2", 2, 4));
}

TEST(TruncatedPoly, RingMismatchIsAnInputError) {
  EXPECT_THROW(mul_trunc(poly("x1", 1, 2), poly("x1", 2, 2)), InputError);
  EXPECT_THROW(poly("x1", 1, 2) + poly("x1", 1, 3), InputError);
}

TEST(TruncatedPoly, PartialDerivative) {
  const auto p = poly("x1^3*x2 + 5*x2^2 - x1", 2, 5);
  EXPECT_EQ(partial_derivative(p, 0), poly("3*x1^2*x2 - 1", 2, 5));
  EXPECT_EQ(partial_derivative(p, 1), poly("x1^3 + 10*x2", 2, 5));
}

TEST(TruncatedPoly, TranslateIsTaylorReexpansion) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> c(-3, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const RingDims ring{2, 4};
    const auto p = testkit::random_poly(rng, ring, 0, 4);
    const std::vector<Rational> a{make_rational(c(rng), 2), make_rational(c(rng), 3)};
    const auto shifted = translate(p, a);
    // shifted(y) = p(a + y) at a few rational y.
    for (int s = 0; s < 3; ++s) {
      const std::vector<Rational> y{make_rational(c(rng), 5), make_rational(c(rng), 7)};
      const std::vector<Rational> ay{a[0] + y[0], a[1] + y[1]};
      EXPECT_EQ(testkit::evaluate(shifted, y), testkit::evaluate(p, ay));
    }
  }
}

TEST(TruncatedPoly, ComposeLinearSubstitutes) {
  const auto p = poly("x1^2 + x2", 2, 3);
  const std::vector<std::vector<Rational>> swap_and_scale{{0, 2}, {1, 0}};
  EXPECT_EQ(compose_linear(p, swap_and_scale), poly("4*x2^2 + x1", 2, 3));
}

TEST(TruncatedPoly, EmbedAndSubstituteZero) {
  const auto p = poly("x1^2 + x1*x2", 2, 3);
  const std::vector<int> map{0, 2};
  const auto e = embed(p, RingDims{3, 3}, map);
  EXPECT_EQ(e, poly("x1^2 + x1*x3", 3, 3));
  EXPECT_EQ(substitute_zero(e, {false, false, true}), poly("x1^2", 3, 3));
}

TEST(JetIdeal, RankIsLinearPartRank) {
  const RingDims ring{3, 3};
  EXPECT_EQ(ideal_rank(JetIdeal(ring, {poly("x1 + x2^2", 3, 3), poly("2*x1 + x3", 3, 3)})), 2);
  EXPECT_EQ(ideal_rank(JetIdeal(ring, {poly("x1^2", 3, 3)})), 0);
  EXPECT_EQ(ideal_rank(JetIdeal(ring, {}, 1)), 3);
  EXPECT_THROW(ideal_rank(JetIdeal(ring, {poly("1 + x1", 3, 3)})), PreconditionError);
}

TEST(JetIdeal, SubspaceDimensionCountsMultiples) {
  // (x^2) + m^4 in one variable, cap 3: span{x^2, x^3}.
  const JetIdeal i(RingDims{1, 4}, {poly("x1^2", 1, 4)}, 4);
  EXPECT_EQ(ideal_subspace_dimension(i, 3), 2U);
  EXPECT_EQ(ideal_subspace_dimension(i, 4), 3U);
  // (x, y^2) in two variables, cap 2: x, x^2, xy, y^2.
  const JetIdeal j(RingDims{2, 3}, {poly("x1", 2, 3), poly("x2^2", 2, 3)});
  EXPECT_EQ(ideal_subspace_dimension(j, 2), 4U);
  EXPECT_THROW(ideal_subspace_dimension(j, 4), InputError);
}

TEST(JetIdeal, MembershipAndEquality) {
  const RingDims ring{2, 3};
  const JetIdeal a(ring, {poly("x1 + x2^2", 2, 3), poly("x2^3", 2, 3)});
  EXPECT_TRUE(ideal_contains(a, poly("x1*x2 + x2^3", 2, 3), 3));
  EXPECT_FALSE(ideal_contains(a, poly("x2^2", 2, 3), 3));
  const JetIdeal b(ring, {poly("x1 + x2^2 + x1*x2", 2, 3), poly("x2^3", 2, 3)});
  // x1 + x2^2 + x1 x2 = (1 + x2)(x1 + x2^2) - x2^3.
  EXPECT_TRUE(ideal_equal(a, b, 3));
}

TEST(JetIdeal, RankInvariantUnderRandomRecombination) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> c(-3, 3);
  int checked = 0;
  for (int trial = 0; checked < 60; ++trial) {
    const RingDims ring{1 + trial % 3, 3};
    std::vector<TruncatedPoly> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(testkit::random_poly(rng, ring, 1, 3));
    // Random unipotent (hence invertible) recombination.
    std::vector<TruncatedPoly> mixed = gens;
    for (std::size_t a = 0; a < gens.size(); ++a) {
      for (std::size_t b = a + 1; b < gens.size(); ++b) mixed[a] += gens[b] * Rational(c(rng));
    }
    const JetIdeal i(ring, gens, 4);
    const JetIdeal j(ring, mixed, 4);
    EXPECT_EQ(ideal_rank(i), ideal_rank(j));
    EXPECT_TRUE(ideal_equal(i, j, 3));
    ++checked;
  }
}

TEST(JetIdeal, CompactFindsLeastTail) {
  // (x^3 + y^2) + (3x^2, 2y) + m^4 = (x^2, y), which contains m^2, so the
  // compact form is (y) + m^2.
  const RingDims ring{2, 4};
  const JetIdeal i(ring, {poly("x1^3 + x2^2", 2, 4), poly("3*x1^2", 2, 4), poly("2*x2", 2, 4)}, 4);
  const JetIdeal c = compact(i);
  ASSERT_TRUE(c.tail_order().has_value());
  EXPECT_EQ(*c.tail_order(), 2);
  EXPECT_TRUE(ideal_equal(i, c, 4));
  EXPECT_EQ(c.generators().size(), 1U);
  EXPECT_EQ(ideal_rank(c), 1);
}

TEST(JetIdeal, CompactPreservesTheIdealOnRandomInputs) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const RingDims ring{1 + trial % 3, 4};
    std::vector<TruncatedPoly> gens;
    for (int g = 0; g < 2; ++g) gens.push_back(testkit::random_poly(rng, ring, 1, 4, 0.3));
    const JetIdeal i(ring, gens, 3 + trial % 2);
    const JetIdeal c = compact(i);
    EXPECT_TRUE(ideal_equal(i, c, ring.order)) << trial;
    EXPECT_EQ(ideal_rank(i), ideal_rank(c));
  }
}
