#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "adeq/cp_point.hpp"
#include "adeq/market.hpp"

namespace adeq {

/// Strongly connected components of the utility digraph.
///
/// Components are numbered by their smallest member, so the numbering only
/// depends on the graph.
struct SccDecomposition {
  std::vector<int> component;             // per node
  std::vector<std::vector<int>> members;  // per component, ascending
  std::vector<std::pair<int, int>> dag_edges;

  int count() const { return static_cast<int>(members.size()); }
};

SccDecomposition scc(const Market& market);

struct FeasibilityVerdict {
  bool feasible = true;
  std::optional<int> witness_node;
  std::vector<int> witness_set;
};

/// Equilibrium existence test: every singleton strongly connected component
/// must carry a loop. On failure the witness is the smallest offending node k
/// and the set of nodes reachable from k (k included), whose prices would be
/// forced to zero at k.
FeasibilityVerdict check_star_condition(const Market& market);

enum class SelfSufficiencyMode {
  Exhaustive,        // enumerate all agent subsets
  GraphEquivalence,  // derive the witness from the component structure
};

inline constexpr int kExhaustiveSubsetCap = 12;

/// Agents in `subset` (bitmask) only value goods owned inside the subset.
bool is_self_sufficient(const Market& market, std::uint32_t subset);

/// Self-sufficient, and some member owns a good no member values. Returns the
/// smallest such member.
std::optional<int> super_self_sufficient_witness(const Market& market, std::uint32_t subset);

/// Infeasible iff some agent subset is super self-sufficient. Exhaustive mode
/// throws SizeLimit above `cap` agents.
FeasibilityVerdict check_super_self_sufficiency(const Market& market, SelfSufficiencyMode mode,
                                                int cap = kExhaustiveSubsetCap);

/// Exhaustive mode, fanned out over subsets with OpenMP. Same verdict and
/// witness as the serial routine.
FeasibilityVerdict check_super_self_sufficiency_parallel(const Market& market,
                                                         int cap = kExhaustiveSubsetCap);

/// Arcs that lie inside a strongly connected component, i.e. on a directed
/// cycle. Every feasible circulation vanishes off this set.
struct FlowSupport {
  std::vector<bool> member;  // per arc id
  std::vector<int> arcs;     // ascending arc ids

  bool contains(int arc) const { return member[static_cast<std::size_t>(arc)]; }
  int size() const { return static_cast<int>(arcs.size()); }
};

FlowSupport flow_support(const Market& market);

/// Shortest directed cycle through `node` as a list of arc ids, ties broken
/// by lexicographic node order. Empty if the node lies on no cycle.
std::vector<int> shortest_cycle_through(const Market& market, int node);

/// Shortest cycle that uses arc `arc_id`; empty if the arc is on no cycle.
std::vector<int> shortest_cycle_using_arc(const Market& market, int arc_id);

/// Interior starting point from a cycle cover: y sums the indicator vectors of
/// the distinct cycles shortest_cycle_through(i) over all nodes i, p is the inflow and beta the
/// eliminated minimum. All coordinates are integers or exact quotients.
/// Throws NoCycleThroughNode if some node lies on no cycle.
RationalPoint cycle_cover_point(const Market& market);

}  // namespace adeq
