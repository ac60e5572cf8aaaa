#include "adeq/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <string>

#include <omp.h>

#include "adeq/errors.hpp"

namespace adeq {

namespace {

// Iterative Tarjan. Node and neighbour order are ascending, so the traversal
// is deterministic.
std::vector<int> tarjan_labels(const Market& market) {
  const int n = market.agents();
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      label(static_cast<std::size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> frames;
  int counter = 0, labels = 0;

  auto at = [](std::vector<int>& v, int k) -> int& { return v[static_cast<std::size_t>(k)]; };

  for (int root = 0; root < n; ++root) {
    if (at(index, root) >= 0) continue;
    frames.push_back({root, 0});
    at(index, root) = at(low, root) = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      auto& [v, next] = frames.back();
      auto out = market.out_arcs(v);
      if (next < out.size()) {
        int w = market.arc(out[next++]).to;
        if (at(index, w) < 0) {
          at(index, w) = at(low, w) = counter++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = true;
          frames.push_back({w, 0});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          at(low, v) = std::min(at(low, v), at(index, w));
        }
        continue;
      }
      if (at(low, v) == at(index, v)) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          at(label, w) = labels;
        } while (w != v);
        ++labels;
      }
      int finished = v;
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().first;
        at(low, parent) = std::min(at(low, parent), at(low, finished));
      }
    }
  }
  return label;
}

std::vector<int> reachable_from(const Market& market, int source) {
  std::vector<bool> seen(static_cast<std::size_t>(market.agents()), false);
  std::vector<int> todo{source};
  seen[static_cast<std::size_t>(source)] = true;
  while (!todo.empty()) {
    int v = todo.back();
    todo.pop_back();
    for (int id : market.out_arcs(v)) {
      int w = market.arc(id).to;
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        todo.push_back(w);
      }
    }
  }
  std::vector<int> nodes;
  for (int v = 0; v < market.agents(); ++v)
    if (seen[static_cast<std::size_t>(v)]) nodes.push_back(v);
  return nodes;
}

// BFS shortest path of arc ids from `source` to `target` (source != target or
// we want a non-trivial path). Returns empty if unreachable.
std::vector<int> shortest_path_arcs(const Market& market, int source, int target) {
  const int n = market.agents();
  std::vector<int> parent_arc(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<int> queue{source};
  seen[static_cast<std::size_t>(source)] = true;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int id : market.out_arcs(v)) {
      int w = market.arc(id).to;
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      parent_arc[static_cast<std::size_t>(w)] = id;
      if (w == target) {
        std::vector<int> path;
        for (int x = target; x != source;) {
          int a = parent_arc[static_cast<std::size_t>(x)];
          path.push_back(a);
          x = market.arc(a).from;
        }
        std::reverse(path.begin(), path.end());
        return path;
      }
      queue.push_back(w);
    }
  }
  return {};
}

}  // namespace

SccDecomposition scc(const Market& market) {
  const int n = market.agents();
  std::vector<int> raw = tarjan_labels(market);
  // Renumber by smallest member.
  std::vector<int> remap(static_cast<std::size_t>(n), -1);
  SccDecomposition result;
  result.component.assign(static_cast<std::size_t>(n), -1);
  for (int v = 0; v < n; ++v) {
    int& r = remap[static_cast<std::size_t>(raw[static_cast<std::size_t>(v)])];
    if (r < 0) {
      r = result.count();
      result.members.emplace_back();
    }
    result.component[static_cast<std::size_t>(v)] = r;
    result.members[static_cast<std::size_t>(r)].push_back(v);
  }
  std::set<std::pair<int, int>> edges;
  for (const Arc& a : market.arcs()) {
    int cf = result.component[static_cast<std::size_t>(a.from)];
    int ct = result.component[static_cast<std::size_t>(a.to)];
    if (cf != ct) edges.insert({cf, ct});
  }
  result.dag_edges.assign(edges.begin(), edges.end());
  return result;
}

FeasibilityVerdict check_star_condition(const Market& market) {
  SccDecomposition d = scc(market);
  for (int v = 0; v < market.agents(); ++v) {
    const auto& members = d.members[static_cast<std::size_t>(d.component[static_cast<std::size_t>(v)])];
    if (members.size() == 1 && !market.has_loop(v)) {
      FeasibilityVerdict verdict;
      verdict.feasible = false;
      verdict.witness_node = v;
      verdict.witness_set = reachable_from(market, v);
      return verdict;
    }
  }
  return {};
}

bool is_self_sufficient(const Market& market, std::uint32_t subset) {
  for (const Arc& a : market.arcs()) {
    bool buyer_in = (subset >> a.from) & 1u;
    bool owner_in = (subset >> a.to) & 1u;
    if (buyer_in && !owner_in) return false;
  }
  return true;
}

std::optional<int> super_self_sufficient_witness(const Market& market, std::uint32_t subset) {
  if (subset == 0 || !is_self_sufficient(market, subset)) return std::nullopt;
  for (int k = 0; k < market.agents(); ++k) {
    if (!((subset >> k) & 1u)) continue;
    bool wanted_inside = false;
    for (int id : market.in_arcs(k))
      if ((subset >> market.arc(id).from) & 1u) {
        wanted_inside = true;
        break;
      }
    if (!wanted_inside) return k;
  }
  return std::nullopt;
}

namespace {

FeasibilityVerdict verdict_from_subset(std::uint32_t subset, int witness, int n) {
  FeasibilityVerdict verdict;
  verdict.feasible = false;
  verdict.witness_node = witness;
  for (int v = 0; v < n; ++v)
    if ((subset >> v) & 1u) verdict.witness_set.push_back(v);
  return verdict;
}

void check_exhaustive_size(const Market& market, int cap) {
  if (market.agents() > cap || market.agents() > 31)
    throw SizeLimit("exhaustive self-sufficiency check limited to " + std::to_string(cap) +
                    " agents, market has " + std::to_string(market.agents()));
}

}  // namespace

FeasibilityVerdict check_super_self_sufficiency(const Market& market, SelfSufficiencyMode mode,
                                                int cap) {
  if (mode == SelfSufficiencyMode::GraphEquivalence) {
    // The set reachable from a loopless singleton component is super
    // self-sufficient, and conversely.
    return check_star_condition(market);
  }
  check_exhaustive_size(market, cap);
  const std::uint32_t limit = 1u << market.agents();
  for (std::uint32_t subset = 1; subset < limit; ++subset)
    if (auto k = super_self_sufficient_witness(market, subset))
      return verdict_from_subset(subset, *k, market.agents());
  return {};
}

FeasibilityVerdict check_super_self_sufficiency_parallel(const Market& market, int cap) {
  check_exhaustive_size(market, cap);
  const std::int64_t limit = std::int64_t{1} << market.agents();
  std::int64_t best = limit;
#pragma omp parallel for schedule(static) reduction(min : best)
  for (std::int64_t subset = 1; subset < limit; ++subset)
    if (subset < best && super_self_sufficient_witness(market, static_cast<std::uint32_t>(subset)))
      best = subset;
  if (best == limit) return {};
  auto subset = static_cast<std::uint32_t>(best);
  return verdict_from_subset(subset, *super_self_sufficient_witness(market, subset),
                             market.agents());
}

FlowSupport flow_support(const Market& market) {
  SccDecomposition d = scc(market);
  FlowSupport support;
  support.member.assign(static_cast<std::size_t>(market.arc_count()), false);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    if (d.component[static_cast<std::size_t>(a.from)] == d.component[static_cast<std::size_t>(a.to)]) {
      support.member[static_cast<std::size_t>(id)] = true;
      support.arcs.push_back(id);
    }
  }
  return support;
}

std::vector<int> shortest_cycle_through(const Market& market, int node) {
  if (auto loop = market.find_arc(node, node)) return {*loop};
  // Shortest cycle = arc node->w followed by shortest path w->node; BFS from
  // node with ascending adjacency gives the lexicographically first one.
  const int n = market.agents();
  std::vector<int> parent_arc(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::deque<int> queue{node};
  seen[static_cast<std::size_t>(node)] = true;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int id : market.out_arcs(v)) {
      int w = market.arc(id).to;
      if (w == node) {
        std::vector<int> cycle{id};
        for (int x = v; x != node;) {
          int a = parent_arc[static_cast<std::size_t>(x)];
          cycle.push_back(a);
          x = market.arc(a).from;
        }
        std::reverse(cycle.begin(), cycle.end());
        return cycle;
      }
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      parent_arc[static_cast<std::size_t>(w)] = id;
      queue.push_back(w);
    }
  }
  return {};
}

std::vector<int> shortest_cycle_using_arc(const Market& market, int arc_id) {
  const Arc& a = market.arc(arc_id);
  if (a.from == a.to) return {arc_id};
  std::vector<int> back = shortest_path_arcs(market, a.to, a.from);
  if (back.empty()) return {};
  std::vector<int> cycle{arc_id};
  cycle.insert(cycle.end(), back.begin(), back.end());
  return cycle;
}

}  // namespace adeq

namespace adeq {

RationalPoint cycle_cover_point(const Market& market) {
  const int n = market.agents();
  RationalPoint point;
  point.spending.assign(static_cast<std::size_t>(market.arc_count()), Rational(0));
  point.prices.assign(static_cast<std::size_t>(n), Rational(0));
  std::vector<std::vector<int>> used;
  for (int i = 0; i < n; ++i) {
    std::vector<int> cycle = shortest_cycle_through(market, i);
    if (cycle.empty()) throw NoCycleThroughNode("no directed cycle through agent " + std::to_string(i));
    std::vector<int> key = cycle;
    std::sort(key.begin(), key.end());
    if (std::find(used.begin(), used.end(), key) != used.end()) continue;
    used.push_back(std::move(key));
    for (int id : cycle) point.spending[static_cast<std::size_t>(id)] += 1;
  }
  for (int id = 0; id < market.arc_count(); ++id)
    point.prices[static_cast<std::size_t>(market.arc(id).to)] += point.spending[static_cast<std::size_t>(id)];
  point.beta = eliminate_beta(std::span<const Rational>(point.prices), market);
  return point;
}

}  // namespace adeq
