#pragma once

#include <utility>
#include <vector>

#include "adeq/equilibrium.hpp"
#include "adeq/market.hpp"

namespace adeq {

/// Node k of the reduced market is the lot of `quantity` units of `good`
/// owned by `agent`; it also acts as a buyer copy of that agent.
struct ReducedNode {
  int agent = 0;
  int good = 0;
  Rational quantity;

  friend bool operator==(const ReducedNode&, const ReducedNode&) = default;
};

struct BackMap {
  int agents = 0;
  int goods = 0;
  std::vector<ReducedNode> nodes;  // ordered by good, then owner
  /// (buyer node, lot node) per arc id of the reduced market.
  std::vector<std::pair<int, int>> arcs;

  friend bool operator==(const BackMap&, const BackMap&) = default;
};

struct Reduction {
  Market market;
  BackMap back_map;
};

/// One node per positive endowment w_ig. Buyer copy (i, .) values the lot
/// (i', g') at u_ig' * w_i'g', i.e. one unit of the renamed good. Throws
/// ValidationError for invalid markets (e.g. a good nobody owns).
Reduction reduce_to_bijective(const GeneralMarket& market);

/// Prices per physical unit of each good and x[i][j][g]: amount of good g
/// that agent i buys from agent j.
template <class T>
struct BasicGeneralEquilibrium {
  std::vector<T> prices;
  std::vector<std::vector<std::vector<T>>> allocation;
};

using GeneralEquilibrium = BasicGeneralEquilibrium<double>;
using ExactGeneralEquilibrium = BasicGeneralEquilibrium<Rational>;

/// Maps an equilibrium of the reduced market back. Copies of one good must
/// agree on the per-unit price within `tol` (relative); otherwise throws
/// AggregationMismatch.
GeneralEquilibrium aggregate_back(const Equilibrium& eq, const BackMap& back_map, double tol = 1e-8);
ExactGeneralEquilibrium aggregate_back(const ExactEquilibrium& eq, const BackMap& back_map);

/// Every lot fully sold, budgets equal endowment value, purchases only at the
/// best u_ig / p_g, positive prices. Money residuals are compared against
/// tol * max(1, max_g p_g).
VerificationReport verify_general_equilibrium(const GeneralEquilibrium& eq, const GeneralMarket& market,
                                              double tol);
VerificationReport verify_general_equilibrium(const ExactGeneralEquilibrium& eq, const GeneralMarket& market);

}  // namespace adeq
