#include <gtest/gtest.h>

#include "adeq/errors.hpp"
#include "adeq/exact_linear.hpp"
#include "adeq/market.hpp"
#include "support.hpp"

using namespace adeq;
using adeq::testing::matrix;
using adeq::testing::q;

TEST(Rational, ParsesFractionsDecimalsAndExponents) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("1.25"), Rational(5, 4));
  EXPECT_EQ(parse_rational("3e-2"), Rational(3, 100));
  EXPECT_EQ(parse_rational("-2"), Rational(-2));
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
}

TEST(Rational, PrintsLowestTerms) {
  EXPECT_EQ(to_string(Rational(6, 8)), "3/4");
  EXPECT_EQ(to_string(Rational(4)), "4");
  EXPECT_EQ(to_string(Rational(-1, 3)), "-1/3");
}

TEST(Rational, IntegerHelpers) {
  EXPECT_EQ(isqrt(Integer(99)), 9);
  EXPECT_EQ(ceil_sqrt(Integer(99)), 10);
  EXPECT_EQ(ceil_sqrt(Integer(100)), 10);
  EXPECT_EQ(factorial(5), 120);
  EXPECT_EQ(lcm(Integer(4), Integer(6)), 12);
  EXPECT_EQ(bit_length(Integer(0)), 0u);
  EXPECT_EQ(bit_length(Integer(8)), 4u);
  EXPECT_NE(exact_from_double(0.1), Rational(1, 10));
  EXPECT_EQ(exact_from_double(0.5), Rational(1, 2));
}

TEST(ExactLinear, UniqueSolutionAndDeterminant) {
  exact::Matrix a = {{2, 1}, {1, 3}};
  auto s = exact::solve_fraction_free(a, {3, 5});
  ASSERT_EQ(s.status, exact::SolveStatus::Unique);
  EXPECT_EQ(s.x[0], Rational(4, 5));
  EXPECT_EQ(s.x[1], Rational(7, 5));
  EXPECT_EQ(exact::determinant(a), 5);
}

TEST(ExactLinear, DetectsUnderdeterminedAndInconsistent) {
  exact::Matrix a = {{1, 1}, {2, 2}};
  EXPECT_EQ(exact::solve_fraction_free(a, {1, 2}).status, exact::SolveStatus::Underdetermined);
  EXPECT_EQ(exact::solve_fraction_free(a, {1, 3}).status, exact::SolveStatus::Inconsistent);
}

TEST(ExactLinear, SimplexFindsVertex) {
  // min -x - y  s.t.  x + 2y <= 4, 3x + y <= 6
  exact::LinearProgram lp;
  lp.variables = 2;
  lp.le_rows = {{1, 2}, {3, 1}};
  lp.le_rhs = {4, 6};
  lp.cost = {-1, -1};
  auto r = exact::solve_lp(lp);
  ASSERT_EQ(r.status, exact::LpStatus::Optimal);
  EXPECT_EQ(r.x[0], Rational(8, 5));
  EXPECT_EQ(r.x[1], Rational(6, 5));
  EXPECT_EQ(r.value, Rational(-14, 5));
}

TEST(ExactLinear, SimplexReportsInfeasibleAndUnbounded) {
  exact::LinearProgram lp;
  lp.variables = 1;
  lp.eq_rows = {{1}};
  lp.eq_rhs = {-1};
  lp.cost = {1};
  EXPECT_EQ(exact::solve_lp(lp).status, exact::LpStatus::Infeasible);
  exact::LinearProgram up;
  up.variables = 1;
  up.cost = {-1};
  EXPECT_EQ(exact::solve_lp(up).status, exact::LpStatus::Unbounded);
}

TEST(Market, ValidateExamples) {
  EXPECT_TRUE(validate(matrix({{1}})).ok());
  EXPECT_TRUE(validate(matrix({{0, 1}, {1, 0}})).ok());
  auto bad = validate(matrix({{0, 1}, {0, 0}}));
  ASSERT_FALSE(bad.ok());
  EXPECT_NE(std::find(bad.violations.begin(), bad.violations.end(), "agent 1 has no outgoing arc"),
            bad.violations.end());
}

TEST(Market, ArcsSortedAndMatrixRoundTrips) {
  Market m = matrix({{0, 3, 1}, {2, 0, 0}, {0, 5, 4}});
  ASSERT_EQ(m.arc_count(), 5);
  for (int k = 1; k < m.arc_count(); ++k)
    EXPECT_LT(std::pair(m.arc(k - 1).from, m.arc(k - 1).to), std::pair(m.arc(k).from, m.arc(k).to));
  EXPECT_EQ(Market::from_matrix(m.to_matrix()), m);
  EXPECT_EQ(m.find_arc(2, 1), 3);
  EXPECT_FALSE(m.find_arc(1, 1));
  EXPECT_EQ(m.max_utility(), 5);
}

TEST(Market, StructuralErrorsThrow) {
  EXPECT_THROW(Market(2, {{0, 2, Rational(1)}}), ValidationError);
  EXPECT_THROW(Market(2, {{0, 1, Rational(-1)}}), ValidationError);
  EXPECT_THROW(Market(2, {{0, 1, Rational(1)}, {0, 1, Rational(2)}}), ValidationError);
  EXPECT_THROW(Market::from_matrix({{1, 1}, {1}}), ValidationError);
}

TEST(Market, ScaleToIntegerUtilities) {
  Market m = Market::from_matrix({{q("1/2"), q("3/2")}, {q("2/3"), q("1/5")}});
  ScaledMarket s = scale_to_integer_utilities(m);
  EXPECT_EQ(s.factors, (std::vector<Rational>{2, 15}));
  EXPECT_EQ(s.market.to_matrix(), (std::vector<std::vector<Rational>>{{1, 3}, {10, 3}}));
  ScaledMarket same = scale_to_integer_utilities(matrix({{0, 2}, {3, 1}}));
  EXPECT_EQ(same.market, matrix({{0, 2}, {3, 1}}));
  EXPECT_EQ(same.factors, (std::vector<Rational>{1, 1}));
}

TEST(Market, GeneralValidation) {
  GeneralMarket g{2, 1, {{1}, {1}}, {{1}, {1}}};
  EXPECT_TRUE(validate(g).ok());
  GeneralMarket unowned{2, 2, {{1, 1}, {1, 1}}, {{1, 0}, {1, 0}}};
  EXPECT_FALSE(validate(unowned).ok());
  GeneralMarket ragged{2, 2, {{1, 1}, {1}}, {{1, 0}, {0, 1}}};
  EXPECT_FALSE(validate(ragged).ok());
}
