#pragma once

#include <vector>

#include "adeq/market.hpp"
#include "adeq/rationalize.hpp"

namespace adeq {

struct OracleLimits {
  int max_agents = 4;
  int max_arcs = 12;
};

/// Brute-force ground truth for tiny markets: every candidate spending support
/// inside the flow support (each agent spends somewhere, each good is bought)
/// is solved exactly (an underdetermined system is resolved at a vertex with
/// every price >= 1) and the certified equilibria are returned,
/// deduplicated and sorted by (prices, spending). Empty iff no equilibrium.
/// Markets with an agent lacking an in- or out-arc have none. Throws
/// SizeLimit beyond `limits`.
std::vector<RationalSolution> oracle_solve(const Market& market, const OracleLimits& limits = {});

/// Candidate supports split across OpenMP threads (0 = default count); same
/// result as oracle_solve.
std::vector<RationalSolution> oracle_solve_parallel(const Market& market, const OracleLimits& limits = {},
                                                    int jobs = 0);

}  // namespace adeq
