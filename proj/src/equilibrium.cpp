#include "adeq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adeq/errors.hpp"

namespace adeq {

namespace {

template <class T>
T utility_of(const Market& market, int id) {
  if constexpr (std::is_same_v<T, double>)
    return market.weight(id);
  else
    return market.arc(id).utility;
}

template <class T>
void check_dimensions(const BasicEquilibrium<T>& eq, const Market& market) {
  if (eq.prices.size() != static_cast<std::size_t>(market.agents()) ||
      eq.allocation.size() != static_cast<std::size_t>(market.arc_count()))
    throw DomainError("equilibrium dimensions do not match the market");
}

void note(VerificationReport::Family& family, double violation, int where) {
  if (violation > family.violation) {
    family.violation = violation;
    family.where = where;
  }
}

double positive_double(const Rational& r) {
  return std::max(r.get_d(), std::numeric_limits<double>::min());
}

}  // namespace

template <class T>
BasicEquilibrium<T> make_equilibrium(const Market& market, std::vector<T> prices,
                                     std::vector<T> allocation) {
  BasicEquilibrium<T> eq;
  eq.prices = std::move(prices);
  eq.allocation = std::move(allocation);
  check_dimensions(eq, market);
  eq.spending.resize(eq.allocation.size());
  for (int id = 0; id < market.arc_count(); ++id)
    eq.spending[static_cast<std::size_t>(id)] =
        eq.prices[static_cast<std::size_t>(market.arc(id).to)] * eq.allocation[static_cast<std::size_t>(id)];
  eq.utilities = agent_utilities(eq, market);
  return eq;
}

template <class T>
BasicEquilibrium<T> normalize_min_price(const BasicEquilibrium<T>& eq) {
  if (eq.prices.empty()) return eq;
  T low = *std::min_element(eq.prices.begin(), eq.prices.end());
  if (!(low > 0)) throw DomainError("cannot normalize non-positive prices");
  BasicEquilibrium<T> out = eq;
  for (T& p : out.prices) p /= low;
  for (T& y : out.spending) y /= low;
  // Exactly 1 at the argmin regardless of rounding.
  for (std::size_t k = 0; k < eq.prices.size(); ++k)
    if (eq.prices[k] == low) out.prices[k] = T(1);
  return out;
}

template <class T>
std::vector<T> agent_utilities(const BasicEquilibrium<T>& eq, const Market& market) {
  std::vector<T> u(static_cast<std::size_t>(market.agents()), T(0));
  for (int id = 0; id < market.arc_count(); ++id)
    u[static_cast<std::size_t>(market.arc(id).from)] +=
        utility_of<T>(market, id) * eq.allocation[static_cast<std::size_t>(id)];
  return u;
}

Equilibrium extract_equilibrium(const CPPoint& point, const Market& market, double tol) {
  double low = *std::min_element(point.prices.begin(), point.prices.end());
  if (!(low > 0.0)) throw NotOptimal("non-positive price");
  CPPoint normalized = scaled(point, 1.0 / low);
  double high = *std::max_element(normalized.prices.begin(), normalized.prices.end());
  FeasibilityReport feasibility = is_feasible(normalized, market, tol * std::max(1.0, high));
  if (!feasibility.feasible)
    throw NotOptimal("point violates the program constraints by " +
                     std::to_string(feasibility.max_violation()));
  double value = objective(normalized, market);
  if (value > tol)
    throw NotOptimal("objective " + std::to_string(value) + " exceeds tolerance " + std::to_string(tol));
  std::vector<double> x(static_cast<std::size_t>(market.arc_count()));
  for (int id = 0; id < market.arc_count(); ++id)
    x[static_cast<std::size_t>(id)] = point.spending[static_cast<std::size_t>(id)] /
                                      point.prices[static_cast<std::size_t>(market.arc(id).to)];
  std::vector<double> prices = normalized.prices;
  for (std::size_t k = 0; k < prices.size(); ++k)
    if (point.prices[k] == low) prices[k] = 1.0;
  return make_equilibrium(market, std::move(prices), std::move(x));
}

ExactEquilibrium extract_equilibrium(const RationalPoint& point, const Market& market) {
  RationalPoint copy = point;
  Rational low = *std::min_element(copy.prices.begin(), copy.prices.end());
  if (low <= 0) throw NotOptimal("non-positive price");
  if (low < 1) copy = scaled(copy, 1 / low);
  if (!is_feasible(copy, market).feasible) throw NotOptimal("point is not exactly feasible");
  if (!objective_is_exactly_zero(copy, market))
    throw NotOptimal("spending on an arc that is not best bang-per-buck");
  std::vector<Rational> x(static_cast<std::size_t>(market.arc_count()));
  for (int id = 0; id < market.arc_count(); ++id)
    x[static_cast<std::size_t>(id)] = point.spending[static_cast<std::size_t>(id)] /
                                      point.prices[static_cast<std::size_t>(market.arc(id).to)];
  std::vector<Rational> prices = point.prices;
  return normalize_min_price(make_equilibrium(market, std::move(prices), std::move(x)));
}

double VerificationReport::max_violation() const {
  return std::max({clearing.violation, budget.violation, bang_per_buck.violation, positivity.violation});
}

VerificationReport verify_equilibrium(const Equilibrium& eq, const Market& market, double tol) {
  check_dimensions(eq, market);
  const int n = market.agents();
  VerificationReport report;
  double scale = 1.0;
  for (double p : eq.prices) scale = std::max(scale, p);

  for (int i = 0; i < n; ++i) {
    double p = eq.prices[static_cast<std::size_t>(i)];
    if (!(p > 0.0)) note(report.positivity, std::isnan(p) ? 1.0 : std::max(-p, std::numeric_limits<double>::min()), i);
  }
  std::vector<double> sold(static_cast<std::size_t>(n), 0.0), spent(static_cast<std::size_t>(n), 0.0),
      best(static_cast<std::size_t>(n), 0.0);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    double x = eq.allocation[static_cast<std::size_t>(id)];
    double pj = eq.prices[static_cast<std::size_t>(a.to)];
    sold[static_cast<std::size_t>(a.to)] += x;
    spent[static_cast<std::size_t>(a.from)] += x * pj;
    note(report.positivity, -x, id);
    best[static_cast<std::size_t>(a.from)] = std::max(best[static_cast<std::size_t>(a.from)], market.weight(id) / pj);
  }
  for (int j = 0; j < n; ++j) note(report.clearing, std::abs(sold[static_cast<std::size_t>(j)] - 1.0), j);
  for (int i = 0; i < n; ++i)
    note(report.budget, std::abs(spent[static_cast<std::size_t>(i)] - eq.prices[static_cast<std::size_t>(i)]) / scale, i);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    if (eq.allocation[static_cast<std::size_t>(id)] <= tol) continue;
    double ratio = market.weight(id) / eq.prices[static_cast<std::size_t>(a.to)];
    note(report.bang_per_buck, 1.0 - ratio / best[static_cast<std::size_t>(a.from)], id);
  }
  // Budget residuals are already divided by the price scale.
  report.passed = report.max_violation() <= tol;
  return report;
}

VerificationReport verify_equilibrium(const ExactEquilibrium& eq, const Market& market) {
  check_dimensions(eq, market);
  const int n = market.agents();
  VerificationReport report;
  report.exact = true;
  for (int i = 0; i < n; ++i)
    if (eq.prices[static_cast<std::size_t>(i)] <= 0) note(report.positivity, 1.0, i);
  if (report.positivity.violation > 0) {
    report.passed = false;
    return report;
  }
  std::vector<Rational> sold(static_cast<std::size_t>(n)), spent(static_cast<std::size_t>(n)),
      best(static_cast<std::size_t>(n));
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    const Rational& x = eq.allocation[static_cast<std::size_t>(id)];
    const Rational& pj = eq.prices[static_cast<std::size_t>(a.to)];
    sold[static_cast<std::size_t>(a.to)] += x;
    spent[static_cast<std::size_t>(a.from)] += x * pj;
    if (x < 0) note(report.positivity, positive_double(-x), id);
    Rational ratio = a.utility / pj;
    if (ratio > best[static_cast<std::size_t>(a.from)]) best[static_cast<std::size_t>(a.from)] = ratio;
  }
  for (int j = 0; j < n; ++j)
    if (sold[static_cast<std::size_t>(j)] != 1)
      note(report.clearing, positive_double(abs(sold[static_cast<std::size_t>(j)] - 1)), j);
  for (int i = 0; i < n; ++i)
    if (spent[static_cast<std::size_t>(i)] != eq.prices[static_cast<std::size_t>(i)])
      note(report.budget, positive_double(abs(spent[static_cast<std::size_t>(i)] - eq.prices[static_cast<std::size_t>(i)])), i);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    if (eq.allocation[static_cast<std::size_t>(id)] <= 0) continue;
    Rational ratio = a.utility / eq.prices[static_cast<std::size_t>(a.to)];
    if (ratio != best[static_cast<std::size_t>(a.from)])
      note(report.bang_per_buck, positive_double(1 - ratio / best[static_cast<std::size_t>(a.from)]), id);
  }
  report.passed = report.max_violation() == 0.0;
  return report;
}

CPPoint embed_equilibrium(const Equilibrium& eq, const Market& market, double tol) {
  VerificationReport report = verify_equilibrium(eq, market, tol);
  if (!report.passed) throw VerificationFailed("equilibrium does not verify; cannot embed");
  double low = *std::min_element(eq.prices.begin(), eq.prices.end());
  double alpha = 1.0 / std::min(1.0, low);
  CPPoint point;
  point.prices = eq.prices;
  for (double& p : point.prices) p *= alpha;
  point.spending.resize(static_cast<std::size_t>(market.arc_count()));
  for (int id = 0; id < market.arc_count(); ++id)
    point.spending[static_cast<std::size_t>(id)] =
        point.prices[static_cast<std::size_t>(market.arc(id).to)] * eq.allocation[static_cast<std::size_t>(id)];
  point.beta = eliminate_beta(std::span<const double>(point.prices), market);
  return point;
}

RationalPoint embed_equilibrium(const ExactEquilibrium& eq, const Market& market) {
  if (!verify_equilibrium(eq, market).passed)
    throw VerificationFailed("equilibrium does not verify; cannot embed");
  Rational low = *std::min_element(eq.prices.begin(), eq.prices.end());
  Rational alpha = 1 / std::min(Rational(1), low);
  RationalPoint point;
  point.prices = eq.prices;
  for (Rational& p : point.prices) p *= alpha;
  point.spending.resize(static_cast<std::size_t>(market.arc_count()));
  for (int id = 0; id < market.arc_count(); ++id)
    point.spending[static_cast<std::size_t>(id)] =
        point.prices[static_cast<std::size_t>(market.arc(id).to)] * eq.allocation[static_cast<std::size_t>(id)];
  point.beta = eliminate_beta(std::span<const Rational>(point.prices), market);
  return point;
}

template <class T>
BasicEquilibrium<T> convex_combine(const BasicEquilibrium<T>& eq1, const BasicEquilibrium<T>& eq2,
                                   const T& lambda, const Market& market) {
  check_dimensions(eq1, market);
  check_dimensions(eq2, market);
  const T mu = T(1) - lambda;
  std::vector<T> prices(eq1.prices.size());
  for (std::size_t k = 0; k < prices.size(); ++k) prices[k] = lambda * eq1.prices[k] + mu * eq2.prices[k];
  BasicEquilibrium<T> out;
  out.prices = prices;
  out.spending.resize(eq1.spending.size());
  out.allocation.resize(eq1.spending.size());
  for (int id = 0; id < market.arc_count(); ++id) {
    auto k = static_cast<std::size_t>(id);
    out.spending[k] = lambda * eq1.spending[k] + mu * eq2.spending[k];
    out.allocation[k] = out.spending[k] / out.prices[static_cast<std::size_t>(market.arc(id).to)];
  }
  out.utilities = agent_utilities(out, market);
  return out;
}

ExactEquilibrium to_exact(const Equilibrium& eq) {
  ExactEquilibrium out;
  auto convert = [](const std::vector<double>& v) {
    std::vector<Rational> r;
    r.reserve(v.size());
    for (double d : v) r.push_back(exact_from_double(d));
    return r;
  };
  out.prices = convert(eq.prices);
  out.allocation = convert(eq.allocation);
  out.spending = convert(eq.spending);
  out.utilities = convert(eq.utilities);
  return out;
}

Equilibrium to_double(const ExactEquilibrium& eq) {
  Equilibrium out;
  auto convert = [](const std::vector<Rational>& v) {
    std::vector<double> d;
    d.reserve(v.size());
    for (const Rational& r : v) d.push_back(r.get_d());
    return d;
  };
  out.prices = convert(eq.prices);
  out.allocation = convert(eq.allocation);
  out.spending = convert(eq.spending);
  out.utilities = convert(eq.utilities);
  return out;
}

template Equilibrium make_equilibrium(const Market&, std::vector<double>, std::vector<double>);
template ExactEquilibrium make_equilibrium(const Market&, std::vector<Rational>, std::vector<Rational>);
template Equilibrium normalize_min_price(const Equilibrium&);
template ExactEquilibrium normalize_min_price(const ExactEquilibrium&);
template std::vector<double> agent_utilities(const Equilibrium&, const Market&);
template std::vector<Rational> agent_utilities(const ExactEquilibrium&, const Market&);
template Equilibrium convex_combine(const Equilibrium&, const Equilibrium&, const double&, const Market&);
template ExactEquilibrium convex_combine(const ExactEquilibrium&, const ExactEquilibrium&, const Rational&,
                                         const Market&);

}  // namespace adeq
