#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "adeq/cp_solver.hpp"
#include "adeq/equilibrium.hpp"
#include "adeq/errors.hpp"
#include "adeq/graph.hpp"
#include "adeq/instance_gen.hpp"
#include "support.hpp"

using namespace adeq;
using adeq::testing::matrix;

TEST(Solve, UnitTwoCycle) {
  auto r = solve(adeq::testing::two_cycle());
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(r.point.prices[0], 1.0, 1e-8);
  EXPECT_NEAR(r.point.prices[1], 1.0, 1e-8);
  EXPECT_LE(r.report.objective, 1e-8);
}

TEST(Solve, WorkedInstance) {
  Market w = adeq::testing::market_w();
  auto r = solve(w);
  ASSERT_TRUE(r.converged()) << to_string(r.report.reason);
  EXPECT_NEAR(r.point.prices[0], 1.0, 1e-6);
  EXPECT_NEAR(r.point.prices[1], 4.0, 1e-6);
  EXPECT_NEAR(r.point.spending[0], 1.0, 1e-6);
  EXPECT_NEAR(r.point.spending[1], 1.0, 1e-6);
  EXPECT_NEAR(r.point.spending[2], 3.0, 1e-6);
  EXPECT_LE(r.report.objective, 1e-8);
  EXPECT_LE(r.report.max_violation, 1e-8);
}

TEST(Solve, InfeasibleAndInvalidMarkets) {
  EXPECT_THROW(solve(adeq::testing::infeasible_pair()), ValidationError);
  // Valid (every agent has in and out arcs) but agent 0 is a loopless singleton component.
  Market m = matrix({{0, 1, 0}, {0, 1, 1}, {1, 1, 1}});
  Market chain = matrix({{0, 1, 0}, {0, 1, 0}, {1, 0, 1}});
  EXPECT_THROW(solve(chain), InfeasibleMarket);
  EXPECT_NO_THROW(solve(m));
}

TEST(Solve, IterationLimitIsReported) {
  SolverConfig cfg;
  cfg.tolerance = 1e-20;
  cfg.max_iterations = 1;
  auto r = solve(adeq::testing::market_w(), cfg);
  EXPECT_EQ(r.report.reason, TerminationReason::IterationLimit);
  EXPECT_FALSE(r.converged());
}

TEST(Solve, ConfigIsChecked) {
  SolverConfig cfg;
  cfg.tolerance = 0;
  EXPECT_THROW(solve(adeq::testing::market_w(), cfg), DomainError);
  cfg = {};
  cfg.price_cap = 1;
  EXPECT_THROW(solve(adeq::testing::market_w(), cfg), DomainError);
}

TEST(Solve, PriceCapHit) {
  // Equilibrium price ratio is 1e4 here; a cap of 100 cannot hold it.
  Market m = matrix({{0, 1}, {1, 10000}});
  SolverConfig cfg;
  cfg.price_cap = 100;
  auto r = solve(m, cfg);
  EXPECT_EQ(r.report.reason, TerminationReason::PriceCapHit);
}

TEST(Solve, RandomForceStarInstancesVerify) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Market m = generate({3 + static_cast<int>(seed % 8), 0.3, 10, seed, FeasibilityMode::ForceStar});
    auto r = solve(m);
    ASSERT_TRUE(r.converged()) << "seed " << seed << ' ' << to_string(r.report.reason);
    EXPECT_LE(r.report.objective, 1e-8);
    EXPECT_LE(r.report.max_violation, 1e-8);
    auto eq = extract_equilibrium(r.point, m);
    EXPECT_TRUE(verify_equilibrium(eq, m, 1e-6).passed) << "seed " << seed;
  }
}

TEST(Solve, NonStronglyConnectedFeasibleMarkets) {
  // Two loops feeding nothing plus a DAG edge between components.
  Market m = matrix({{1, 1, 0}, {0, 1, 1}, {0, 1, 1}});
  auto r = solve(m);
  ASSERT_TRUE(r.converged());
  EXPECT_TRUE(verify_equilibrium(extract_equilibrium(r.point, m), m, 1e-6).passed);
}

TEST(SolveBatch, ParallelMatchesSerial) {
  std::vector<Market> markets;
  for (std::uint64_t seed = 0; seed < 12; ++seed)
    markets.push_back(generate({4 + static_cast<int>(seed % 4), 0.3, 6, seed, FeasibilityMode::ForceStar}));
  markets.push_back(matrix({{0, 1, 0}, {0, 1, 0}, {1, 0, 1}}));
  auto serial = solve_batch_serial(markets, {});
  auto parallel = solve_batch(markets, {}, 2);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t k = 0; k < serial.size(); ++k) {
    EXPECT_EQ(serial[k].infeasible, parallel[k].infeasible);
    ASSERT_EQ(serial[k].result.has_value(), parallel[k].result.has_value());
    if (serial[k].result) EXPECT_EQ(serial[k].result->point, parallel[k].result->point);
  }
  EXPECT_TRUE(serial.back().infeasible);
}

namespace {

// Random strictly positive circulation over the flow support.
std::vector<double> interior_flow(const Market& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  std::vector<double> y(static_cast<std::size_t>(m.arc_count()), 0.0);
  for (int id : flow_support(m).arcs) {
    double w = weight(rng);
    for (int a : shortest_cycle_using_arc(m, id)) y[static_cast<std::size_t>(a)] += w;
  }
  return y;
}

}  // namespace

TEST(ReducedGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Market m = generate({2 + static_cast<int>(seed), 0.4, 7, seed, FeasibilityMode::ForceStar});
    for (int rep = 0; rep < 5; ++rep) {
      auto y = interior_flow(m, rng);
      auto g = reduced_gradient(y, m);
      for (int id : flow_support(m).arcs) {
        auto k = static_cast<std::size_t>(id);
        double h = 1e-6 * std::max(1.0, y[k]);
        auto plus = y, minus = y;
        plus[k] += h;
        minus[k] -= h;
        double fd = (reduced_objective(plus, m) - reduced_objective(minus, m)) / (2 * h);
        EXPECT_LE(std::abs(fd - g[k]), 1e-5 * std::max(1.0, std::abs(fd))) << "seed " << seed << " arc " << id;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 50);
}

// At the optimum of W agent 1's minimum is tied, so the gradient is taken a
// hair along each direction, where the tie is already broken that way.
TEST(ReducedGradient, NonNegativeAlongCirculationsAtOptimum) {
  Market w = adeq::testing::market_w();
  std::vector<double> y{1, 1, 3};
  const std::vector<std::vector<double>> directions{{1, 1, 0}, {-1, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (const auto& d : directions) {
    std::vector<double> nudged = y;
    for (std::size_t k = 0; k < y.size(); ++k) nudged[k] += 1e-9 * d[k];
    auto g = reduced_gradient(nudged, w);
    double slope = 0;
    for (std::size_t k = 0; k < y.size(); ++k) slope += g[k] * d[k];
    EXPECT_GE(slope, -1e-6);
  }
  EXPECT_NEAR(reduced_objective(y, w), 0.0, 1e-14);
  std::vector<double> twice{2, 2, 6};
  EXPECT_NEAR(reduced_objective(twice, w), 0.0, 1e-13);
}

TEST(ReducedGradient, RejectsZeroInflow) {
  std::vector<double> y{0, 1, 0};
  EXPECT_THROW(reduced_gradient(y, adeq::testing::market_w()), DomainError);
}
