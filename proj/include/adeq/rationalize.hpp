#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adeq/cp_point.hpp"
#include "adeq/equilibrium.hpp"
#include "adeq/market.hpp"
#include "adeq/rational.hpp"

namespace adeq {

struct TightThresholds {
  double spending = 1e-6;  // y_ij > eps * p_j counts as support
  double bpb = 1e-5;       // u_ij beta_i >= (1 - eps) p_j counts as tight
  double price = 1e-6;     // p_i <= 1 + eps counts as a tight floor
};

struct TightSet {
  std::vector<int> support;      // arc ids
  std::vector<int> tight_arcs;   // arc ids, superset of support
  std::vector<int> unit_prices;  // agents
};

/// Classifies a near-optimal, min-price-1 point. Throws InconsistentTightSet
/// when a support arc is not tight or no price sits at the floor.
TightSet detect_tight_set(const CPPoint& point, const Market& market, const TightThresholds& thresholds = {});

/// Exact optimal point with its equilibrium. Prices have minimum 1.
struct RationalSolution {
  RationalPoint point;
  ExactEquilibrium equilibrium;
  Integer max_price_denominator;
  Integer max_spending_denominator;
  Integer max_allocation_denominator;
};

/// Checks the point exactly (feasibility, u_ij beta_i = p_j on the support,
/// equilibrium conditions) and packages it; nullopt if any check fails. The
/// point is rescaled to min price 1 and beta replaced by its exact minimum.
std::optional<RationalSolution> certify(RationalPoint point, const Market& market);

/// Equalities: balance with flow restricted to `support`, u_ij beta_i = p_j on
/// `tight_arcs`, p_i = 1 on `unit_prices`.
struct BindingSystem {
  std::vector<int> support;
  std::vector<int> tight_arcs;
  std::vector<int> unit_prices;
  /// Keep the unit-price rows when selecting a vertex. Without them only the
  /// floor p >= 1 normalizes the prices.
  bool pin_in_vertex = true;
};

/// Solves the binding system exactly. A unique solution is certified as is.
/// An underdetermined system is resolved by an exact simplex over the same
/// equalities plus u_ij beta_i <= p_j on the remaining arcs and p >= 1,
/// minimizing sum_i p_i, which lands on a vertex.
std::optional<RationalSolution> solve_binding_system(const Market& market, const BindingSystem& system);

/// Rounds a numeric optimum to an exact one, retrying over a fixed threshold
/// schedule. Markets with fractional utilities are rescaled per agent first
/// and beta mapped back. Throws RoundingFailed.
RationalSolution rationalize(const CPPoint& point, const Market& market);

/// Cancels cycles of the (buyer, good) support graph until it is a forest,
/// keeping prices fixed. At most 2n - 1 arcs remain.
template <class T>
BasicEquilibrium<T> sparsify_support(const BasicEquilibrium<T>& eq, const Market& market);

struct BitsizeBound {
  Integer hadamard;   // ceil(2^(n-1) (n+3)^(n+1/2) U^n)
  Integer factorial;  // n! U^n
};

/// Throws DomainError unless n >= 1 and U >= 1.
BitsizeBound bitsize_bound(int n, const Integer& max_utility);

}  // namespace adeq
