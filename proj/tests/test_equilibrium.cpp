#include <gtest/gtest.h>

#include "adeq/equilibrium.hpp"
#include "adeq/errors.hpp"
#include "adeq/oracle.hpp"
#include "support.hpp"

using namespace adeq;
using adeq::testing::matrix;
using adeq::testing::q;

TEST(Extract, WorkedInstanceExact) {
  Market w = adeq::testing::market_w();
  ExactEquilibrium eq = extract_equilibrium(adeq::testing::point_w(), w);
  EXPECT_EQ(eq.prices, (std::vector<Rational>{1, 4}));
  EXPECT_EQ(eq.allocation, (std::vector<Rational>{q("1/4"), 1, q("3/4")}));
  EXPECT_EQ(eq.utilities, (std::vector<Rational>{q("1/4"), 4}));
  EXPECT_EQ(eq, adeq::testing::equilibrium_w());
}

TEST(Extract, WorkedInstanceNumericNormalizes) {
  Market w = adeq::testing::market_w();
  CPPoint p = scaled(to_double(adeq::testing::point_w()), 3.0);
  Equilibrium eq = extract_equilibrium(p, w);
  EXPECT_NEAR(eq.prices[0], 1.0, 1e-15);
  EXPECT_NEAR(eq.prices[1], 4.0, 1e-15);
  EXPECT_NEAR(eq.allocation[0], 0.25, 1e-15);
  EXPECT_NEAR(eq.allocation[2], 0.75, 1e-15);
}

TEST(Extract, SmallMarkets) {
  auto two = extract_equilibrium(RationalPoint{{1, 1}, {1, 1}, {1, 1}}, adeq::testing::two_cycle());
  EXPECT_EQ(two.allocation, (std::vector<Rational>{1, 1}));
  EXPECT_EQ(two.utilities, (std::vector<Rational>{1, 1}));
  auto loop = extract_equilibrium(RationalPoint{{1}, {1}, {1}}, matrix({{1}}));
  EXPECT_EQ(loop.allocation, std::vector<Rational>{1});
}

TEST(Extract, RejectsNonOptimalPoints) {
  Market w = adeq::testing::market_w();
  RationalPoint bad = adeq::testing::point_w();
  bad.beta = {2, 1};
  EXPECT_THROW(extract_equilibrium(bad, w), NotOptimal);
  CPPoint num{{1, 1}, {1, 0.25}, {1, 1, 0}};
  EXPECT_THROW(extract_equilibrium(num, w), NotOptimal);
}

TEST(Embed, ScalesByMinimumPrice) {
  Market w = adeq::testing::market_w();
  auto half = make_equilibrium<Rational>(w, {q("1/2"), 2}, {q("1/4"), 1, q("3/4")});
  RationalPoint p = embed_equilibrium(half, w);
  EXPECT_EQ(p.prices, (std::vector<Rational>{1, 4}));
  EXPECT_EQ(p, adeq::testing::point_w());
  EXPECT_EQ(embed_equilibrium(adeq::testing::equilibrium_w(), w), adeq::testing::point_w());
  EXPECT_TRUE(objective_is_exactly_zero(p, w));
  EXPECT_NEAR(objective(to_double(p), w), 0.0, 1e-14);
}

TEST(Verify, WorkedInstancePasses) {
  Market w = adeq::testing::market_w();
  EXPECT_TRUE(verify_equilibrium(adeq::testing::equilibrium_w(), w).passed);
  EXPECT_TRUE(verify_equilibrium(to_double(adeq::testing::equilibrium_w()), w, 1e-12).passed);
}

TEST(Verify, ClearingViolation) {
  Market w = adeq::testing::market_w();
  ExactEquilibrium eq = adeq::testing::equilibrium_w();
  eq.allocation[2] = q("4/5");
  auto r = verify_equilibrium(eq, w);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.clearing.violation, 0.05, 1e-15);
  EXPECT_EQ(r.clearing.where, 1);
  auto rn = verify_equilibrium(to_double(eq), w, 1e-9);
  EXPECT_NEAR(rn.clearing.violation, 0.05, 1e-12);
  EXPECT_EQ(rn.clearing.where, 1);
}

TEST(Verify, BangPerBuckViolationNamesArc) {
  // Agent 1 now prefers good 0 (2/1 > 4/4), but keeps buying good 1 on arc 2.
  Market m = matrix({{0, 1}, {2, 4}});
  auto eq = make_equilibrium<Rational>(m, {1, 4}, {q("1/4"), 1, q("3/4")});
  auto r = verify_equilibrium(eq, m);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.bang_per_buck.violation, 0.0);
  EXPECT_EQ(r.bang_per_buck.where, 2);
}

TEST(Verify, BudgetViolation) {
  Market w = adeq::testing::market_w();
  ExactEquilibrium eq = adeq::testing::equilibrium_w();
  eq.prices[1] = 5;
  auto r = verify_equilibrium(eq, w);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.budget.violation, 0.0);
}

TEST(ConvexCombine, Endpoints) {
  Market w = adeq::testing::market_w();
  ExactEquilibrium eq = adeq::testing::equilibrium_w();
  EXPECT_EQ(convex_combine(eq, eq, Rational(1, 3), w), eq);
  auto u = adeq::testing::uniform_2x2();
  auto sols = oracle_solve(u);
  ASSERT_GE(sols.size(), 2u);
  const auto& a = sols[0].equilibrium;
  const auto& b = sols[1].equilibrium;
  EXPECT_EQ(convex_combine(a, b, Rational(1), u), a);
  EXPECT_EQ(convex_combine(a, b, Rational(0), u), b);
}

TEST(ConvexCombine, MidpointOfDistinctSupportsVerifies) {
  auto u = adeq::testing::uniform_2x2();
  auto sols = oracle_solve(u);
  ASSERT_GE(sols.size(), 2u);
  for (const char* l : {"1/2", "1/4", "3/4"}) {
    auto mid = convex_combine(sols[0].equilibrium, sols[1].equilibrium, q(l), u);
    EXPECT_TRUE(verify_equilibrium(mid, u).passed) << l;
  }
}

TEST(AgentUtilities, Examples) {
  EXPECT_EQ(agent_utilities(adeq::testing::equilibrium_w(), adeq::testing::market_w()),
            (std::vector<Rational>{q("1/4"), 4}));
  auto two = make_equilibrium<Rational>(adeq::testing::two_cycle(), {1, 1}, {1, 1});
  EXPECT_EQ(agent_utilities(two, adeq::testing::two_cycle()), (std::vector<Rational>{1, 1}));
}

TEST(AgentUtilities, EqualAcrossEquilibria) {
  for (auto m : {adeq::testing::uniform_2x2(), matrix({{1, 1, 0}, {1, 1, 1}, {0, 1, 1}}),
                 matrix({{2, 1, 1}, {1, 2, 1}, {1, 1, 2}})}) {
    auto sols = oracle_solve(m);
    ASSERT_FALSE(sols.empty());
    for (const auto& s : sols) {
      auto a = to_double(s.equilibrium).utilities;
      auto b = to_double(sols.front().equilibrium).utilities;
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-7);
    }
  }
}

TEST(Conversions, RoundTrip) {
  ExactEquilibrium eq = adeq::testing::equilibrium_w();
  EXPECT_EQ(to_exact(to_double(eq)), eq);
  auto shifted = normalize_min_price(make_equilibrium<Rational>(adeq::testing::market_w(), {2, 8},
                                                               {q("1/4"), 1, q("3/4")}));
  EXPECT_EQ(shifted.prices, (std::vector<Rational>{1, 4}));
}
