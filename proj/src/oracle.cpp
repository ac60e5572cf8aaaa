#include "adeq/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>

#include "adeq/errors.hpp"
#include "adeq/graph.hpp"

namespace adeq {
namespace {

struct Enumeration {
  std::vector<int> arcs;  // flow support
  std::uint64_t masks = 0;
};

Enumeration prepare(const Market& market, const OracleLimits& limits) {
  if (market.agents() > limits.max_agents)
    throw SizeLimit("oracle is limited to " + std::to_string(limits.max_agents) + " agents");
  if (market.arc_count() > limits.max_arcs)
    throw SizeLimit("oracle is limited to " + std::to_string(limits.max_arcs) + " arcs");
  Enumeration e;
  e.arcs = flow_support(market).arcs;
  e.masks = std::uint64_t{1} << e.arcs.size();
  return e;
}

// Every agent spends on some arc of the support and every good is bought.
bool covers(const Market& market, const Enumeration& e, std::uint64_t mask) {
  std::uint32_t buyers = 0, goods = 0;
  for (std::size_t s = 0; s < e.arcs.size(); ++s) {
    if (!(mask >> s & 1)) continue;
    buyers |= 1u << market.arc(e.arcs[s]).from;
    goods |= 1u << market.arc(e.arcs[s]).to;
  }
  std::uint32_t all = (1u << market.agents()) - 1;
  return buyers == all && goods == all;
}

std::optional<RationalSolution> solve_support(const Market& market, const Enumeration& e, std::uint64_t mask) {
  BindingSystem system;
  for (std::size_t s = 0; s < e.arcs.size(); ++s)
    if (mask >> s & 1) system.support.push_back(e.arcs[s]);
  system.tight_arcs = system.support;
  system.unit_prices = {0};
  system.pin_in_vertex = false;
  return solve_binding_system(market, system);
}

bool solution_less(const RationalSolution& a, const RationalSolution& b) {
  if (a.point.prices != b.point.prices) return a.point.prices < b.point.prices;
  return a.point.spending < b.point.spending;
}

bool solution_equal(const RationalSolution& a, const RationalSolution& b) {
  return a.point.prices == b.point.prices && a.point.spending == b.point.spending;
}

std::vector<RationalSolution> finish(std::vector<RationalSolution> found) {
  std::sort(found.begin(), found.end(), solution_less);
  found.erase(std::unique(found.begin(), found.end(), solution_equal), found.end());
  return found;
}

}  // namespace

std::vector<RationalSolution> oracle_solve(const Market& market, const OracleLimits& limits) {
  Enumeration e = prepare(market, limits);
  std::vector<RationalSolution> found;
  for (std::uint64_t mask = 1; mask < e.masks; ++mask) {
    if (!covers(market, e, mask)) continue;
    if (auto s = solve_support(market, e, mask)) found.push_back(std::move(*s));
  }
  return finish(std::move(found));
}

std::vector<RationalSolution> oracle_solve_parallel(const Market& market, const OracleLimits& limits, int jobs) {
  Enumeration e = prepare(market, limits);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
  std::vector<std::vector<RationalSolution>> partial(static_cast<std::size_t>(threads));
  const auto total = static_cast<std::int64_t>(e.masks);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
  for (std::int64_t mask = 1; mask < total; ++mask) {
    auto m = static_cast<std::uint64_t>(mask);
    if (!covers(market, e, m)) continue;
    if (auto s = solve_support(market, e, m))
      partial[static_cast<std::size_t>(omp_get_thread_num())].push_back(std::move(*s));
  }
  std::vector<RationalSolution> found;
  for (auto& part : partial)
    for (auto& s : part) found.push_back(std::move(s));
  return finish(std::move(found));
}

}  // namespace adeq
