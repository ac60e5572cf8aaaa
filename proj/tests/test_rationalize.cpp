#include <gtest/gtest.h>

#include <cmath>

#include "adeq/cp_solver.hpp"
#include "adeq/errors.hpp"
#include "adeq/instance_gen.hpp"
#include "adeq/oracle.hpp"
#include "adeq/rationalize.hpp"
#include "support.hpp"

using namespace adeq;
using adeq::testing::matrix;
using adeq::testing::q;

namespace {

// Arcs with positive allocation form a forest in the buyer/good bipartite graph.
bool support_is_forest(const ExactEquilibrium& eq, const Market& m) {
  const int n = m.agents();
  std::vector<int> parent(static_cast<std::size_t>(2 * n));
  for (int v = 0; v < 2 * n; ++v) parent[static_cast<std::size_t>(v)] = v;
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)];
    return v;
  };
  for (int id = 0; id < m.arc_count(); ++id) {
    if (eq.allocation[static_cast<std::size_t>(id)] == 0) continue;
    int a = find(m.arc(id).from), b = find(n + m.arc(id).to);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
  }
  return true;
}

int support_size(const ExactEquilibrium& eq) {
  return static_cast<int>(std::count_if(eq.allocation.begin(), eq.allocation.end(),
                                        [](const Rational& x) { return x != 0; }));
}

}  // namespace

TEST(TightSet, WorkedInstance) {
  Market w = adeq::testing::market_w();
  auto r = solve(w);
  ASSERT_TRUE(r.converged());
  TightSet t = detect_tight_set(r.point, w);
  EXPECT_EQ(t.support, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(t.tight_arcs, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(t.unit_prices, std::vector<int>{0});
}

TEST(TightSet, UnitTwoCycle) {
  TightSet t = detect_tight_set(CPPoint{{1, 1}, {1, 1}, {1, 1}}, adeq::testing::two_cycle());
  EXPECT_EQ(t.support, (std::vector<int>{0, 1}));
  EXPECT_EQ(t.tight_arcs, (std::vector<int>{0, 1}));
  EXPECT_EQ(t.unit_prices, (std::vector<int>{0, 1}));
}

TEST(TightSet, FarFromOptimumIsInconsistent) {
  // Spending on arc 2 while its bang-per-buck is 1e-2 away from tight.
  Market w = adeq::testing::market_w();
  CPPoint p{{1, 4}, {4, 0.99}, {1, 1, 3}};
  EXPECT_THROW(detect_tight_set(p, w), InconsistentTightSet);
}

TEST(Rationalize, WorkedInstance) {
  Market w = adeq::testing::market_w();
  auto r = solve(w);
  RationalSolution s = rationalize(r.point, w);
  EXPECT_EQ(s.point, adeq::testing::point_w());
  EXPECT_EQ(s.equilibrium, adeq::testing::equilibrium_w());
  EXPECT_TRUE(verify_equilibrium(s.equilibrium, w).passed);
  EXPECT_EQ(s.max_price_denominator, 1);
  EXPECT_EQ(s.max_allocation_denominator, 4);
}

TEST(Rationalize, UnitTwoCycle) {
  Market m = adeq::testing::two_cycle();
  RationalSolution s = rationalize(CPPoint{{1, 1}, {1, 1}, {1, 1}}, m);
  EXPECT_EQ(s.point.prices, (std::vector<Rational>{1, 1}));
  EXPECT_EQ(s.point.spending, (std::vector<Rational>{1, 1}));
  EXPECT_EQ(s.equilibrium.allocation, (std::vector<Rational>{1, 1}));
}

TEST(Rationalize, RandomSmallMarketsRespectBitsize) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Market m = generate({3, 0.5, 6, seed, FeasibilityMode::ForceStar});
    auto r = solve(m);
    ASSERT_TRUE(r.converged());
    RationalSolution s = rationalize(r.point, m);
    EXPECT_TRUE(verify_equilibrium(s.equilibrium, m).passed) << "seed " << seed;
    Integer bound = bitsize_bound(3, m.max_utility().get_num()).factorial;
    EXPECT_LE(s.max_price_denominator, bound);
    EXPECT_LE(s.max_spending_denominator, bound);
    EXPECT_LE(s.max_allocation_denominator, bound * bound);
  }
}

TEST(Rationalize, FractionalUtilities) {
  Market m = Market::from_matrix({{0, q("1/2")}, {q("2/3"), q("8/3")}});
  auto r = solve(m);
  ASSERT_TRUE(r.converged());
  RationalSolution s = rationalize(r.point, m);
  EXPECT_TRUE(verify_equilibrium(s.equilibrium, m).passed);
  EXPECT_EQ(s.point.beta, eliminate_beta(s.point.prices, m));
}

TEST(Rationalize, GarbageThrows) {
  Market w = adeq::testing::market_w();
  EXPECT_THROW(rationalize(CPPoint{{1, 1.7}, {1.7, 0.3}, {0.5, 1.2, 0.5}}, w), RoundingFailed);
}

TEST(BindingSystem, UniqueSupportOfW) {
  Market w = adeq::testing::market_w();
  auto s = solve_binding_system(w, {{0, 1, 2}, {0, 1, 2}, {0}});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->point, adeq::testing::point_w());
  // Support without the loop cannot clear good 1 at prices (1, 4).
  EXPECT_FALSE(solve_binding_system(w, {{0, 1}, {0, 1, 2}, {0}}));
}

TEST(BitsizeBound, FrozenValues) {
  // ceil(2^(n-1) (n+3)^(n+1/2) U^n) at n = 2, U = 4, evaluated in long double.
  long double direct = 2.0L * std::pow(5.0L, 2.5L) * 16.0L;
  auto b = bitsize_bound(2, Integer(4));
  EXPECT_EQ(b.hadamard, static_cast<long>(std::ceil(direct)));
  EXPECT_EQ(b.hadamard, 1789);
  EXPECT_EQ(b.factorial, 32);
  EXPECT_EQ(bitsize_bound(1, Integer(1)).factorial, 1);
  EXPECT_THROW(bitsize_bound(0, Integer(1)), DomainError);
  EXPECT_THROW(bitsize_bound(2, Integer(0)), DomainError);
}

TEST(BitsizeBound, Monotone) {
  for (int n = 1; n < 8; ++n)
    for (int u = 1; u < 6; ++u) {
      auto a = bitsize_bound(n, Integer(u)), b = bitsize_bound(n + 1, Integer(u));
      EXPECT_GE(b.hadamard, a.hadamard);
      EXPECT_GE(b.factorial, a.factorial);
      EXPECT_GE(a.hadamard, a.factorial);
    }
}

// Rows and columns both sum to one, so x_00 = x_11 and x_01 = x_10: the one
// cycle cancellation empties two arcs at once.
TEST(Sparsify, UniformSquareCancelsTheCycle) {
  Market u = adeq::testing::uniform_2x2();
  auto eq = make_equilibrium<Rational>(u, {1, 1}, {q("1/2"), q("1/2"), q("1/2"), q("1/2")});
  ASSERT_TRUE(verify_equilibrium(eq, u).passed);
  auto sparse = sparsify_support(eq, u);
  EXPECT_EQ(sparse.prices, eq.prices);
  EXPECT_EQ(support_size(sparse), 2);
  EXPECT_TRUE(support_is_forest(sparse, u));
  EXPECT_TRUE(verify_equilibrium(sparse, u).passed);
  auto numeric = sparsify_support(to_double(eq), u);
  EXPECT_EQ(std::count(numeric.allocation.begin(), numeric.allocation.end(), 0.0), 2);
}

TEST(Sparsify, ForestIsFixpoint) {
  Market w = adeq::testing::market_w();
  auto eq = adeq::testing::equilibrium_w();
  EXPECT_EQ(sparsify_support(eq, w), eq);
}

TEST(Sparsify, DenseAllocationsReduceToForests) {
  for (int n = 2; n <= 5; ++n) {
    std::vector<std::vector<int>> ones(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 1));
    Market m = matrix(ones);
    std::vector<Rational> x(static_cast<std::size_t>(n * n), Rational(1, n));
    std::vector<Rational> p(static_cast<std::size_t>(n), Rational(1));
    auto eq = make_equilibrium<Rational>(m, p, x);
    auto sparse = sparsify_support(eq, m);
    EXPECT_LE(support_size(sparse), 2 * n - 1);
    EXPECT_TRUE(support_is_forest(sparse, m));
    EXPECT_EQ(sparse.prices, p);
    EXPECT_TRUE(verify_equilibrium(sparse, m).passed);
  }
}
