#include "adeq/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adeq/errors.hpp"

namespace adeq {

Reduction reduce_to_bijective(const GeneralMarket& market) {
  auto report = validate(market);
  if (!report.ok()) throw ValidationError(report.violations.front());
  Reduction r;
  r.back_map.agents = market.agents;
  r.back_map.goods = market.goods;
  for (int g = 0; g < market.goods; ++g)
    for (int i = 0; i < market.agents; ++i) {
      const Rational& w = market.endowments[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)];
      if (w > 0) r.back_map.nodes.push_back({i, g, w});
    }
  const auto& nodes = r.back_map.nodes;
  std::vector<Arc> arcs;
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (std::size_t l = 0; l < nodes.size(); ++l) {
      const Rational& u =
          market.utilities[static_cast<std::size_t>(nodes[k].agent)][static_cast<std::size_t>(nodes[l].good)];
      if (u > 0) arcs.push_back({static_cast<int>(k), static_cast<int>(l), u * nodes[l].quantity});
    }
  r.market = Market(static_cast<int>(nodes.size()), std::move(arcs));
  for (const Arc& a : r.market.arcs()) r.back_map.arcs.emplace_back(a.from, a.to);
  return r;
}

namespace {

template <class T>
T as(const Rational& value) {
  if constexpr (std::is_same_v<T, Rational>) return value;
  else return value.get_d();
}

bool same_price(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, a, b}); }
bool same_price(const Rational& a, const Rational& b, double) { return a == b; }

template <class T>
BasicGeneralEquilibrium<T> aggregate(const BasicEquilibrium<T>& eq, const BackMap& bm, double tol) {
  const auto& nodes = bm.nodes;
  if (eq.prices.size() != nodes.size() || eq.allocation.size() != bm.arcs.size())
    throw DomainError("equilibrium does not match the reduced market");
  BasicGeneralEquilibrium<T> out;
  out.prices.assign(static_cast<std::size_t>(bm.goods), T(0));
  std::vector<int> priced_by(static_cast<std::size_t>(bm.goods), -1);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    auto g = static_cast<std::size_t>(nodes[k].good);
    T unit = eq.prices[k] / as<T>(nodes[k].quantity);
    if (priced_by[g] < 0) {
      out.prices[g] = unit;
      priced_by[g] = static_cast<int>(k);
    } else if (!same_price(out.prices[g], unit, tol)) {
      throw AggregationMismatch("copies " + std::to_string(priced_by[g]) + " and " + std::to_string(k) +
                                " of good " + std::to_string(g) + " disagree on the unit price");
    }
  }
  out.allocation.assign(static_cast<std::size_t>(bm.agents),
                        std::vector<std::vector<T>>(static_cast<std::size_t>(bm.agents),
                                                    std::vector<T>(static_cast<std::size_t>(bm.goods), T(0))));
  for (std::size_t id = 0; id < bm.arcs.size(); ++id) {
    const ReducedNode& buyer = nodes[static_cast<std::size_t>(bm.arcs[id].first)];
    const ReducedNode& lot = nodes[static_cast<std::size_t>(bm.arcs[id].second)];
    out.allocation[static_cast<std::size_t>(buyer.agent)][static_cast<std::size_t>(lot.agent)]
                  [static_cast<std::size_t>(lot.good)] += eq.allocation[id] * as<T>(lot.quantity);
  }
  return out;
}

template <class Family>
void note(Family& family, double violation, int where) {
  if (violation > family.violation) {
    family.violation = violation;
    family.where = where;
  }
}

template <class T>
VerificationReport verify_general(const BasicGeneralEquilibrium<T>& eq, const GeneralMarket& market, double tol) {
  constexpr bool exact = std::is_same_v<T, Rational>;
  const auto na = static_cast<std::size_t>(market.agents);
  const auto ng = static_cast<std::size_t>(market.goods);
  if (eq.prices.size() != ng || eq.allocation.size() != na) throw DomainError("equilibrium does not match the market");
  VerificationReport r;
  r.exact = exact;
  auto to_d = [](const T& v) {
    if constexpr (exact) return v.get_d();
    else return v;
  };
  auto bad = [&](const T& defect, T slack) {
    if constexpr (exact) return defect != 0;
    else return std::abs(defect) > slack;
  };
  T scale = T(1);
  for (const auto& p : eq.prices) scale = std::max(scale, p);

  for (std::size_t g = 0; g < ng; ++g)
    if (!(eq.prices[g] > T(0))) note(r.positivity, std::max(std::abs(to_d(eq.prices[g])), std::numeric_limits<double>::min()), static_cast<int>(g));

  for (std::size_t j = 0; j < na; ++j)
    for (std::size_t g = 0; g < ng; ++g) {
      T sold = T(0);
      for (std::size_t i = 0; i < na; ++i) {
        const T& x = eq.allocation[i][j][g];
        if (x < T(0) && bad(x, T(tol))) note(r.positivity, std::abs(to_d(x)), static_cast<int>(i));
        sold += x;
      }
      T owned = as<T>(market.endowments[j][g]);
      T defect = sold - owned;
      if (bad(defect, T(tol) * std::max(T(1), owned)))
        note(r.clearing, std::max(std::abs(to_d(defect)), std::numeric_limits<double>::min()), static_cast<int>(g));
    }

  for (std::size_t i = 0; i < na; ++i) {
    T income = T(0), spent = T(0);
    for (std::size_t g = 0; g < ng; ++g) income += as<T>(market.endowments[i][g]) * eq.prices[g];
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t g = 0; g < ng; ++g) spent += eq.allocation[i][j][g] * eq.prices[g];
    T defect = spent - income;
    if (bad(defect, T(tol) * scale))
      note(r.budget, std::max(std::abs(to_d(defect)), std::numeric_limits<double>::min()), static_cast<int>(i));

    bool any = false;
    T best = T(0);
    for (std::size_t g = 0; g < ng; ++g) {
      if (!(eq.prices[g] > T(0))) continue;
      T ratio = as<T>(market.utilities[i][g]) / eq.prices[g];
      if (!any || ratio > best) best = ratio;
      any = true;
    }
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t g = 0; g < ng; ++g) {
        const T& x = eq.allocation[i][j][g];
        bool bought;
        if constexpr (exact) bought = x > 0;
        else bought = x > tol;
        if (!bought || !(eq.prices[g] > T(0))) continue;
        T ratio = as<T>(market.utilities[i][g]) / eq.prices[g];
        bool worse;
        if constexpr (exact) worse = ratio < best;
        else worse = ratio < best * (1.0 - tol);
        if (worse) note(r.bang_per_buck, std::max(to_d(best - ratio) / std::max(to_d(best), 1e-300), std::numeric_limits<double>::min()), static_cast<int>(i));
      }
  }
  r.passed = r.max_violation() == 0.0;
  return r;
}

}  // namespace

GeneralEquilibrium aggregate_back(const Equilibrium& eq, const BackMap& back_map, double tol) {
  return aggregate(eq, back_map, tol);
}

ExactGeneralEquilibrium aggregate_back(const ExactEquilibrium& eq, const BackMap& back_map) {
  return aggregate(eq, back_map, 0.0);
}

VerificationReport verify_general_equilibrium(const GeneralEquilibrium& eq, const GeneralMarket& market, double tol) {
  return verify_general(eq, market, tol);
}

VerificationReport verify_general_equilibrium(const ExactGeneralEquilibrium& eq, const GeneralMarket& market) {
  return verify_general(eq, market, 0.0);
}

}  // namespace adeq
