#include "adeq/rationalize.hpp"

#include <algorithm>
#include <numeric>

#include "adeq/errors.hpp"
#include "adeq/exact_linear.hpp"

namespace adeq {

TightSet detect_tight_set(const CPPoint& point, const Market& market, const TightThresholds& thresholds) {
  const int n = market.agents();
  if (static_cast<int>(point.prices.size()) != n || static_cast<int>(point.beta.size()) != n ||
      static_cast<int>(point.spending.size()) != market.arc_count())
    throw DomainError("point does not match the market");
  TightSet set;
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    double pj = point.prices[static_cast<std::size_t>(a.to)];
    double bi = point.beta[static_cast<std::size_t>(a.from)];
    bool tight = market.weight(id) * bi >= (1.0 - thresholds.bpb) * pj;
    bool used = point.spending[static_cast<std::size_t>(id)] > thresholds.spending * pj;
    if (tight) set.tight_arcs.push_back(id);
    if (used) {
      if (!tight)
        throw InconsistentTightSet("arc " + std::to_string(a.from) + "->" + std::to_string(a.to) +
                                   " carries spending but is not bang-per-buck tight");
      set.support.push_back(id);
    }
  }
  for (int i = 0; i < n; ++i)
    if (point.prices[static_cast<std::size_t>(i)] <= 1.0 + thresholds.price) set.unit_prices.push_back(i);
  if (set.unit_prices.empty()) throw InconsistentTightSet("no price at the floor");
  return set;
}

namespace {

Integer max_denominator(const std::vector<Rational>& values) {
  Integer best = 1;
  for (const auto& v : values)
    if (v.get_den() > best) best = v.get_den();
  return best;
}

}  // namespace

std::optional<RationalSolution> certify(RationalPoint point, const Market& market) {
  const int n = market.agents();
  if (static_cast<int>(point.prices.size()) != n ||
      static_cast<int>(point.spending.size()) != market.arc_count())
    return std::nullopt;
  Rational low = *std::min_element(point.prices.begin(), point.prices.end());
  if (low <= 0) return std::nullopt;
  for (auto& v : point.prices) v /= low;
  for (auto& v : point.spending) v /= low;
  point.beta = eliminate_beta(point.prices, market);
  if (!is_feasible(point, market).feasible || !objective_is_exactly_zero(point, market)) return std::nullopt;
  ExactEquilibrium eq;
  try {
    eq = extract_equilibrium(point, market);
  } catch (const NotOptimal&) {
    return std::nullopt;
  }
  if (!verify_equilibrium(eq, market).passed) return std::nullopt;
  RationalSolution s;
  s.max_price_denominator = max_denominator(point.prices);
  s.max_spending_denominator = max_denominator(point.spending);
  s.max_allocation_denominator = max_denominator(eq.allocation);
  s.point = std::move(point);
  s.equilibrium = std::move(eq);
  return s;
}

std::optional<RationalSolution> solve_binding_system(const Market& market, const BindingSystem& system) {
  const int n = market.agents();
  const int k = static_cast<int>(system.support.size());
  const int vars = 2 * n + k;
  auto p = [](int i) { return i; };
  auto beta = [n](int i) { return n + i; };
  auto y = [n](int s) { return 2 * n + s; };

  exact::Matrix rows;
  std::vector<Rational> rhs;
  auto new_row = [&]() -> std::vector<Rational>& {
    rows.emplace_back(static_cast<std::size_t>(vars), Rational(0));
    rhs.emplace_back(0);
    return rows.back();
  };
  for (int j = 0; j < n; ++j) {
    auto& r = new_row();
    r[static_cast<std::size_t>(p(j))] = 1;
    for (int s = 0; s < k; ++s)
      if (market.arc(system.support[static_cast<std::size_t>(s)]).to == j) r[static_cast<std::size_t>(y(s))] = -1;
  }
  for (int i = 0; i < n; ++i) {
    auto& r = new_row();
    r[static_cast<std::size_t>(p(i))] = 1;
    for (int s = 0; s < k; ++s)
      if (market.arc(system.support[static_cast<std::size_t>(s)]).from == i) r[static_cast<std::size_t>(y(s))] = -1;
  }
  std::vector<bool> tight(static_cast<std::size_t>(market.arc_count()), false);
  for (int id : system.tight_arcs) {
    tight[static_cast<std::size_t>(id)] = true;
    const Arc& a = market.arc(id);
    auto& r = new_row();
    r[static_cast<std::size_t>(beta(a.from))] = a.utility;
    r[static_cast<std::size_t>(p(a.to))] -= 1;
  }
  const std::size_t pinned_from = rows.size();
  for (int i : system.unit_prices) {
    auto& r = new_row();
    r[static_cast<std::size_t>(p(i))] = 1;
    rhs.back() = 1;
  }

  auto to_point = [&](const std::vector<Rational>& x) {
    RationalPoint point;
    point.prices.assign(x.begin(), x.begin() + n);
    point.beta.assign(x.begin() + n, x.begin() + 2 * n);
    point.spending.assign(static_cast<std::size_t>(market.arc_count()), Rational(0));
    for (int s = 0; s < k; ++s)
      point.spending[static_cast<std::size_t>(system.support[static_cast<std::size_t>(s)])] =
          x[static_cast<std::size_t>(y(s))];
    return point;
  };

  exact::LinearSolution direct = exact::solve_fraction_free(rows, rhs);
  if (direct.status == exact::SolveStatus::Inconsistent) return std::nullopt;
  if (direct.status == exact::SolveStatus::Unique) return certify(to_point(direct.x), market);
  if (!system.pin_in_vertex) {
    rows.resize(pinned_from);
    rhs.resize(pinned_from);
  }

  exact::LinearProgram lp;
  lp.variables = vars;
  lp.eq_rows = std::move(rows);
  lp.eq_rhs = std::move(rhs);
  for (int id = 0; id < market.arc_count(); ++id) {
    if (tight[static_cast<std::size_t>(id)]) continue;
    const Arc& a = market.arc(id);
    std::vector<Rational> r(static_cast<std::size_t>(vars), Rational(0));
    r[static_cast<std::size_t>(beta(a.from))] = a.utility;
    r[static_cast<std::size_t>(p(a.to))] -= 1;
    lp.le_rows.push_back(std::move(r));
    lp.le_rhs.emplace_back(0);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<Rational> r(static_cast<std::size_t>(vars), Rational(0));
    r[static_cast<std::size_t>(p(i))] = -1;
    lp.le_rows.push_back(std::move(r));
    lp.le_rhs.emplace_back(-1);
  }
  lp.cost.assign(static_cast<std::size_t>(vars), Rational(0));
  for (int i = 0; i < n; ++i) lp.cost[static_cast<std::size_t>(p(i))] = 1;
  exact::LpResult vertex = exact::solve_lp(lp);
  if (vertex.status != exact::LpStatus::Optimal) return std::nullopt;
  return certify(to_point(vertex.x), market);
}

namespace {

RationalSolution rationalize_integer(const CPPoint& point, const Market& market) {
  CPPoint normalized = point;
  double low = *std::min_element(normalized.prices.begin(), normalized.prices.end());
  if (!(low > 0.0)) throw RoundingFailed("point has a non-positive price");
  for (auto& v : normalized.prices) v /= low;
  for (auto& v : normalized.spending) v /= low;
  normalized.beta = eliminate_beta(normalized.prices, market);

  std::string last = "no threshold produced a consistent tight set";
  for (double eps_t : {1e-5, 1e-4, 1e-6}) {
    for (double eps_y : {1e-6, 1e-5, 1e-7}) {
      TightSet set;
      try {
        set = detect_tight_set(normalized, market, {eps_y, eps_t, 1e-6});
      } catch (const InconsistentTightSet& e) {
        last = e.what();
        continue;
      }
      BindingSystem system{set.support, set.tight_arcs, set.unit_prices, true};
      if (auto s = solve_binding_system(market, system)) return *s;
      // Prices that only look equal to the floor: keep the smallest one at 1
      // and let the others float above it.
      int lowest = static_cast<int>(std::min_element(normalized.prices.begin(), normalized.prices.end()) -
                                    normalized.prices.begin());
      if (system.unit_prices.size() == 1) continue;
      system.unit_prices = {lowest};
      if (auto s = solve_binding_system(market, system)) return *s;
      last = "binding system at eps_t=" + std::to_string(eps_t) + ", eps_y=" + std::to_string(eps_y) +
             " has no certified solution";
    }
  }
  throw RoundingFailed(last);
}

}  // namespace

RationalSolution rationalize(const CPPoint& point, const Market& market) {
  if (market.has_integer_utilities()) return rationalize_integer(point, market);
  // Scaling agent i's utilities by c_i keeps prices and allocations and
  // divides beta_i by c_i.
  ScaledMarket scaled_market = scale_to_integer_utilities(market);
  CPPoint scaled_point = point;
  for (int i = 0; i < market.agents(); ++i)
    scaled_point.beta[static_cast<std::size_t>(i)] /= scaled_market.factors[static_cast<std::size_t>(i)].get_d();
  RationalSolution s = rationalize_integer(scaled_point, scaled_market.market);
  s.point.beta = eliminate_beta(s.point.prices, market);
  s.equilibrium.utilities = agent_utilities(s.equilibrium, market);
  return s;
}

template <class T>
BasicEquilibrium<T> sparsify_support(const BasicEquilibrium<T>& eq, const Market& market) {
  const int n = market.agents();
  if (static_cast<int>(eq.spending.size()) != market.arc_count() || static_cast<int>(eq.prices.size()) != n)
    throw DomainError("equilibrium does not match the market");
  std::vector<T> y = eq.spending;
  // Buyer i is node i, good j is node n + j; arc ij is an undirected edge.
  while (true) {
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(2 * n));  // (node, arc)
    std::vector<int> root(static_cast<std::size_t>(2 * n));
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](int v) {
      while (root[static_cast<std::size_t>(v)] != v) v = root[static_cast<std::size_t>(v)];
      return v;
    };
    int closing = -1;
    for (int id = 0; id < market.arc_count() && closing < 0; ++id) {
      if (!(y[static_cast<std::size_t>(id)] > 0)) continue;
      int u = market.arc(id).from, v = n + market.arc(id).to;
      int ru = find(u), rv = find(v);
      if (ru == rv) {
        closing = id;
        break;
      }
      root[static_cast<std::size_t>(ru)] = rv;
      adj[static_cast<std::size_t>(u)].push_back({v, id});
      adj[static_cast<std::size_t>(v)].push_back({u, id});
    }
    if (closing < 0) break;

    // Path in the forest from the good end of the closing edge to its buyer end.
    int start = n + market.arc(closing).to, goal = market.arc(closing).from;
    std::vector<int> via(static_cast<std::size_t>(2 * n), -2), parent(static_cast<std::size_t>(2 * n), -1);
    std::vector<int> stack{start};
    via[static_cast<std::size_t>(start)] = -1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == goal) break;
      for (auto [w, id] : adj[static_cast<std::size_t>(v)]) {
        if (via[static_cast<std::size_t>(w)] != -2) continue;
        via[static_cast<std::size_t>(w)] = id;
        parent[static_cast<std::size_t>(w)] = v;
        stack.push_back(w);
      }
    }
    std::vector<int> cycle{closing};
    for (int v = goal; v != start; v = parent[static_cast<std::size_t>(v)]) cycle.push_back(via[static_cast<std::size_t>(v)]);
    // Walking closing -> path alternates buyer/good ends, so alternate signs
    // keep every buyer and good total fixed.
    T eps = y[static_cast<std::size_t>(cycle[1])];
    for (std::size_t c = 1; c < cycle.size(); c += 2) eps = std::min(eps, y[static_cast<std::size_t>(cycle[c])]);
    for (std::size_t c = 0; c < cycle.size(); ++c) {
      auto& v = y[static_cast<std::size_t>(cycle[c])];
      if (c % 2 == 0) {
        v += eps;
      } else {
        v -= eps;
        if (v < T(0)) v = T(0);
      }
    }
  }
  std::vector<T> x(y.size());
  for (int id = 0; id < market.arc_count(); ++id)
    x[static_cast<std::size_t>(id)] = y[static_cast<std::size_t>(id)] / eq.prices[static_cast<std::size_t>(market.arc(id).to)];
  return make_equilibrium(market, eq.prices, std::move(x));
}

template BasicEquilibrium<double> sparsify_support(const BasicEquilibrium<double>&, const Market&);
template BasicEquilibrium<Rational> sparsify_support(const BasicEquilibrium<Rational>&, const Market&);

BitsizeBound bitsize_bound(int n, const Integer& max_utility) {
  if (n < 1) throw DomainError("n must be at least 1");
  if (max_utility < 1) throw DomainError("U must be at least 1");
  Integer u_n;
  mpz_pow_ui(u_n.get_mpz_t(), max_utility.get_mpz_t(), static_cast<unsigned long>(n));
  Integer squared;  // 4^(n-1) U^(2n) (n+3)^(2n+1)
  Integer base = n + 3;
  mpz_pow_ui(squared.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(2 * n + 1));
  squared *= u_n * u_n;
  mpz_mul_2exp(squared.get_mpz_t(), squared.get_mpz_t(), static_cast<mp_bitcnt_t>(2 * (n - 1)));
  return {ceil_sqrt(squared), factorial(static_cast<unsigned long>(n)) * u_n};
}

}  // namespace adeq
