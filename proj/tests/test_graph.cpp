#include <gtest/gtest.h>

#include "adeq/cp_point.hpp"
#include "adeq/errors.hpp"
#include "adeq/graph.hpp"
#include "adeq/instance_gen.hpp"
#include "support.hpp"

using namespace adeq;
using adeq::testing::matrix;

TEST(Scc, Examples) {
  auto two = scc(matrix({{0, 1}, {1, 0}}));
  EXPECT_EQ(two.count(), 1);
  EXPECT_EQ(two.members[0], (std::vector<int>{0, 1}));

  auto split = scc(adeq::testing::infeasible_pair());
  EXPECT_EQ(split.count(), 2);
  EXPECT_EQ(split.members[0], std::vector<int>{0});
  EXPECT_EQ(split.members[1], std::vector<int>{1});
  EXPECT_EQ(split.dag_edges.size(), 1u);

  auto chord = scc(matrix({{0, 1, 1}, {0, 0, 1}, {1, 0, 0}}));
  EXPECT_EQ(chord.count(), 1);
}

TEST(Scc, ComponentDagIsAcyclicAndPartitions) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Market m = generate({7, 0.2, 3, seed, FeasibilityMode::Raw});
    auto d = scc(m);
    std::vector<int> seen(7, 0);
    for (const auto& comp : d.members)
      for (int v : comp) ++seen[static_cast<std::size_t>(v)];
    for (int c : seen) EXPECT_EQ(c, 1);
    // Components are numbered by smallest member, and DAG edges never close a cycle:
    // a topological order exists iff Kahn's algorithm drains every component.
    std::vector<int> indeg(static_cast<std::size_t>(d.count()), 0);
    for (auto [a, b] : d.dag_edges) {
      EXPECT_NE(a, b);
      ++indeg[static_cast<std::size_t>(b)];
    }
    std::vector<int> queue;
    for (int c = 0; c < d.count(); ++c)
      if (indeg[static_cast<std::size_t>(c)] == 0) queue.push_back(c);
    int drained = 0;
    while (!queue.empty()) {
      int c = queue.back();
      queue.pop_back();
      ++drained;
      for (auto [a, b] : d.dag_edges)
        if (a == c && --indeg[static_cast<std::size_t>(b)] == 0) queue.push_back(b);
    }
    EXPECT_EQ(drained, d.count());
  }
}

TEST(StarCondition, Examples) {
  auto bad = check_star_condition(adeq::testing::infeasible_pair());
  EXPECT_FALSE(bad.feasible);
  EXPECT_EQ(bad.witness_node, 0);
  EXPECT_EQ(bad.witness_set, (std::vector<int>{0, 1}));
  EXPECT_TRUE(check_star_condition(matrix({{1}})).feasible);
  EXPECT_TRUE(check_star_condition(matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})).feasible);
  EXPECT_FALSE(check_star_condition(matrix({{0}})).feasible);
}

TEST(StarCondition, StronglyConnectedMarketsAreFeasible) {
  for (std::uint64_t seed = 0; seed < 30; ++seed)
    EXPECT_TRUE(check_star_condition(generate({9, 0.15, 5, seed, FeasibilityMode::ForceStar})).feasible);
}

TEST(SuperSelfSufficiency, Examples) {
  auto v = check_super_self_sufficiency(adeq::testing::infeasible_pair(), SelfSufficiencyMode::Exhaustive);
  EXPECT_FALSE(v.feasible);
  EXPECT_EQ(v.witness_node, 0);
  EXPECT_EQ(v.witness_set, (std::vector<int>{0, 1}));
  EXPECT_TRUE(check_super_self_sufficiency(adeq::testing::two_cycle(), SelfSufficiencyMode::Exhaustive).feasible);
  EXPECT_TRUE(check_super_self_sufficiency(matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}),
                                           SelfSufficiencyMode::Exhaustive)
                  .feasible);
}

TEST(SuperSelfSufficiency, WitnessPredicates) {
  Market m = adeq::testing::infeasible_pair();
  EXPECT_FALSE(is_self_sufficient(m, 0b01));
  EXPECT_TRUE(is_self_sufficient(m, 0b10));
  EXPECT_FALSE(super_self_sufficient_witness(m, 0b10));
  EXPECT_EQ(super_self_sufficient_witness(m, 0b11), 0);
}

TEST(SuperSelfSufficiency, SizeCap) {
  Market big = generate({13, 0.1, 2, 1, FeasibilityMode::ForceStar});
  EXPECT_THROW(check_super_self_sufficiency(big, SelfSufficiencyMode::Exhaustive), SizeLimit);
  EXPECT_TRUE(check_super_self_sufficiency(big, SelfSufficiencyMode::GraphEquivalence).feasible);
}

// Both feasibility tests must agree on every market, including random raw ones.
TEST(SuperSelfSufficiency, AgreesWithStarConditionAndParallel) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    int n = 1 + static_cast<int>(seed % 8);
    Market m = generate({n, 0.25, 3, seed, FeasibilityMode::Raw});
    auto star = check_star_condition(m);
    auto serial = check_super_self_sufficiency(m, SelfSufficiencyMode::Exhaustive);
    auto parallel = check_super_self_sufficiency_parallel(m);
    EXPECT_EQ(star.feasible, serial.feasible) << "seed " << seed;
    EXPECT_EQ(serial.feasible, parallel.feasible);
    EXPECT_EQ(serial.witness_node, parallel.witness_node);
    EXPECT_EQ(serial.witness_set, parallel.witness_set);
  }
}

TEST(FlowSupport, Examples) {
  auto two = flow_support(adeq::testing::two_cycle());
  EXPECT_EQ(two.arcs, (std::vector<int>{0, 1}));
  // arcs (0,1)=0, (0,2)=1, (1,0)=2, (2,2)=3
  Market m = matrix({{0, 1, 1}, {1, 0, 0}, {0, 0, 1}});
  auto s = flow_support(m);
  EXPECT_EQ(s.arcs, (std::vector<int>{0, 2, 3}));
  EXPECT_FALSE(s.contains(1));
  Market dag = matrix({{1, 1, 1}, {0, 1, 1}, {0, 0, 1}});
  auto loops = flow_support(dag);
  ASSERT_EQ(loops.size(), 3);
  for (int id : loops.arcs) EXPECT_EQ(dag.arc(id).from, dag.arc(id).to);
}

TEST(Cycles, ShortestCycles) {
  Market m = matrix({{0, 1, 1}, {0, 0, 1}, {1, 0, 0}});
  auto c = shortest_cycle_through(m, 0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(m.arc(c[0]).from, 0);
  EXPECT_EQ(m.arc(c[0]).to, 2);
  auto via = shortest_cycle_using_arc(m, *m.find_arc(0, 1));
  EXPECT_EQ(via.size(), 3u);
  EXPECT_TRUE(shortest_cycle_through(adeq::testing::infeasible_pair(), 0).empty());
}

TEST(CycleCover, Examples) {
  auto two = cycle_cover_point(adeq::testing::two_cycle());
  EXPECT_EQ(two.spending, (std::vector<Rational>{1, 1}));
  EXPECT_EQ(two.prices, (std::vector<Rational>{1, 1}));
  EXPECT_EQ(two.beta, (std::vector<Rational>{1, 1}));

  auto loop = cycle_cover_point(matrix({{1}}));
  EXPECT_EQ(loop.spending, std::vector<Rational>{1});
  EXPECT_EQ(loop.prices, std::vector<Rational>{1});
  EXPECT_EQ(loop.beta, std::vector<Rational>{1});

  Market three = matrix({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  auto p3 = cycle_cover_point(three);
  auto scaled = adeq::scaled(p3, Rational(1) / p3.prices[0]);
  EXPECT_EQ(scaled.prices, (std::vector<Rational>{1, 1, 1}));
  EXPECT_NEAR(objective(to_double(p3), three), 0.0, 1e-12);

  EXPECT_THROW(cycle_cover_point(adeq::testing::infeasible_pair()), NoCycleThroughNode);
}

TEST(CycleCover, AlwaysExactlyFeasible) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Market m = generate({2 + static_cast<int>(seed % 9), 0.3, 6, seed, FeasibilityMode::ForceStar});
    EXPECT_TRUE(is_feasible(cycle_cover_point(m), m).feasible) << "seed " << seed;
  }
}
