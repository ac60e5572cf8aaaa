#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adeq/cp_point.hpp"
#include "adeq/market.hpp"

namespace adeq {

struct SolverConfig {
  /// Target for the normalized objective, the constraint violation and the
  /// barrier duality measure.
  double tolerance = 1e-8;
  int max_iterations = 500;
  /// Largest allowed ratio max_i p_i / min_i p_i of the returned prices.
  double price_cap = 1e9;
  /// Barrier weight multiplier between centering rounds.
  double barrier_growth = 20.0;
  /// Weight of the extra covering cycle through each support arc at start.
  double initial_epsilon = 1e-6;
  /// Snap the interior iterate onto its detected active set at the end,
  /// falling back to exact rounding when the snap finds no nonnegative flow.
  bool polish = true;
  /// Unused by the deterministic path; kept so configurations round-trip.
  std::uint64_t seed = 0;

  /// Throws DomainError unless tolerance > 0, max_iterations >= 1 and
  /// price_cap >= agents.
  void check(int agents) const;
};

enum class TerminationReason { Converged, IterationLimit, PriceCapHit, NumericalFailure };

const char* to_string(TerminationReason reason);

struct SolveReport {
  int iterations = 0;  // Newton steps
  int barrier_rounds = 0;
  double objective = 0.0;      // at the returned (normalized) point
  double max_violation = 0.0;  // worst constraint family
  double kkt_residual = 0.0;   // barrier stationarity at the last iterate
  double duality_measure = 0.0;
  bool polished = false;
  TerminationReason reason = TerminationReason::NumericalFailure;
  double wall_seconds = 0.0;
};

struct SolveResult {
  CPPoint point;  // min price 1, beta = eliminate_beta(p)
  SolveReport report;

  bool converged() const { return report.reason == TerminationReason::Converged; }
};

/// Minimizes the flow-type program with a damped-Newton log-barrier method.
/// Throws InfeasibleMarket if some singleton component has no loop and
/// ValidationError for markets without in/out arcs. Non-convergence is
/// reported through SolveReport::reason, with the best point found.
SolveResult solve(const Market& market, const SolverConfig& config = {});

struct BatchOutcome {
  std::optional<SolveResult> result;
  bool infeasible = false;
  std::string error;
};

/// Independent solves fanned out with OpenMP over `jobs` threads (0 = OpenMP
/// default). Outcomes are in input order.
std::vector<BatchOutcome> solve_batch(std::span<const Market> markets, const SolverConfig& config,
                                      int jobs = 0);

/// Serial reference for solve_batch.
std::vector<BatchOutcome> solve_batch_serial(std::span<const Market> markets, const SolverConfig& config);

/// Objective as a function of the flow alone: p = inflow(y), beta =
/// eliminate_beta(p). `spending` is indexed by arc id.
double reduced_objective(std::span<const double> spending, const Market& market);

/// Gradient of reduced_objective. Where the minimum defining beta_i is tied,
/// the lowest-index minimizing arc is used, giving a subgradient. Throws
/// DomainError on non-positive inflow.
std::vector<double> reduced_gradient(std::span<const double> spending, const Market& market);

}  // namespace adeq
