#include "adeq/cp_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "adeq/errors.hpp"

namespace adeq {

namespace {

template <class T>
std::vector<T> eliminate_beta_impl(std::span<const T> prices, const Market& market) {
  const int n = market.agents();
  if (static_cast<int>(prices.size()) != n) throw DomainError("price vector has wrong length");
  std::vector<T> beta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto out = market.out_arcs(i);
    if (out.empty()) throw DomainError("agent " + std::to_string(i) + " has no outgoing arc");
    bool first = true;
    for (int id : out) {
      T candidate;
      if constexpr (std::is_same_v<T, double>)
        candidate = prices[static_cast<std::size_t>(market.arc(id).to)] / market.weight(id);
      else
        candidate = prices[static_cast<std::size_t>(market.arc(id).to)] / market.arc(id).utility;
      if (first || candidate < beta[static_cast<std::size_t>(i)]) beta[static_cast<std::size_t>(i)] = candidate;
      first = false;
    }
  }
  return beta;
}

void note(FeasibilityReport::Family& family, double violation, int where) {
  if (violation > family.violation) {
    family.violation = violation;
    family.where = where;
  }
}

void check_shapes(std::size_t prices, std::size_t beta, std::size_t spending, const Market& market) {
  if (prices != static_cast<std::size_t>(market.agents()) ||
      beta != static_cast<std::size_t>(market.agents()) ||
      spending != static_cast<std::size_t>(market.arc_count()))
    throw DomainError("point dimensions do not match the market");
}

}  // namespace

double objective(const CPPoint& point, const Market& market) {
  check_shapes(point.prices.size(), point.beta.size(), point.spending.size(), market);
  const int n = market.agents();
  for (int i = 0; i < n; ++i) {
    if (!(point.beta[static_cast<std::size_t>(i)] > 0.0))
      throw DomainError("beta_" + std::to_string(i) + " must be positive");
    if (!(point.prices[static_cast<std::size_t>(i)] > 0.0))
      throw DomainError("p_" + std::to_string(i) + " must be positive");
  }
  // Rewritten through the balance residuals so that, on feasible points, the
  // value is a sum of nonnegative per-arc terms y_ij log(p_j / (u_ij beta_i))
  // and does not cancel.
  std::vector<double> in_res(point.prices), out_res(point.prices);
  double value = 0.0;
  for (int id = 0; id < market.arc_count(); ++id) {
    double y = point.spending[static_cast<std::size_t>(id)];
    if (y == 0.0) continue;
    const Arc& a = market.arc(id);
    double pj = point.prices[static_cast<std::size_t>(a.to)];
    double bi = point.beta[static_cast<std::size_t>(a.from)];
    value += y * std::log(pj / (market.weight(id) * bi));
    in_res[static_cast<std::size_t>(a.to)] -= y;
    out_res[static_cast<std::size_t>(a.from)] -= y;
  }
  for (int i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(i);
    value += std::log(point.prices[k]) * in_res[k] - std::log(point.beta[k]) * out_res[k];
  }
  return value;
}

std::vector<double> eliminate_beta(std::span<const double> prices, const Market& market) {
  return eliminate_beta_impl<double>(prices, market);
}

std::vector<Rational> eliminate_beta(std::span<const Rational> prices, const Market& market) {
  return eliminate_beta_impl<Rational>(prices, market);
}

double FeasibilityReport::max_violation() const {
  return std::max({column_balance.violation, row_balance.violation, bang_per_buck.violation,
                   price_floor.violation, nonnegativity.violation});
}

FeasibilityReport is_feasible(const CPPoint& point, const Market& market, double tol) {
  check_shapes(point.prices.size(), point.beta.size(), point.spending.size(), market);
  const int n = market.agents();
  FeasibilityReport report;
  std::vector<double> in(static_cast<std::size_t>(n), 0.0), out(static_cast<std::size_t>(n), 0.0);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    double y = point.spending[static_cast<std::size_t>(id)];
    in[static_cast<std::size_t>(a.to)] += y;
    out[static_cast<std::size_t>(a.from)] += y;
    note(report.nonnegativity, -y, id);
    double excess = market.weight(id) * point.beta[static_cast<std::size_t>(a.from)] -
                    point.prices[static_cast<std::size_t>(a.to)];
    note(report.bang_per_buck, excess, id);
  }
  for (int i = 0; i < n; ++i) {
    double p = point.prices[static_cast<std::size_t>(i)];
    note(report.column_balance, std::abs(in[static_cast<std::size_t>(i)] - p), i);
    note(report.row_balance, std::abs(out[static_cast<std::size_t>(i)] - p), i);
    note(report.price_floor, 1.0 - p, i);
    note(report.nonnegativity, -point.beta[static_cast<std::size_t>(i)], i);
  }
  report.feasible = report.max_violation() <= tol;
  return report;
}

FeasibilityReport is_feasible(const RationalPoint& point, const Market& market) {
  check_shapes(point.prices.size(), point.beta.size(), point.spending.size(), market);
  const int n = market.agents();
  FeasibilityReport report;
  report.exact = true;
  auto exact_note = [](FeasibilityReport::Family& family, const Rational& violation, int where) {
    if (violation > 0) note(family, std::max(violation.get_d(), std::numeric_limits<double>::min()), where);
  };
  std::vector<Rational> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    const Rational& y = point.spending[static_cast<std::size_t>(id)];
    in[static_cast<std::size_t>(a.to)] += y;
    out[static_cast<std::size_t>(a.from)] += y;
    exact_note(report.nonnegativity, -y, id);
    exact_note(report.bang_per_buck,
               a.utility * point.beta[static_cast<std::size_t>(a.from)] -
                   point.prices[static_cast<std::size_t>(a.to)],
               id);
  }
  for (int i = 0; i < n; ++i) {
    const Rational& p = point.prices[static_cast<std::size_t>(i)];
    exact_note(report.column_balance, abs(in[static_cast<std::size_t>(i)] - p), i);
    exact_note(report.row_balance, abs(out[static_cast<std::size_t>(i)] - p), i);
    exact_note(report.price_floor, 1 - p, i);
    exact_note(report.nonnegativity, -point.beta[static_cast<std::size_t>(i)], i);
  }
  report.feasible = report.max_violation() == 0.0;
  return report;
}

bool objective_is_exactly_zero(const RationalPoint& point, const Market& market) {
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    if (point.spending[static_cast<std::size_t>(id)] != 0 &&
        a.utility * point.beta[static_cast<std::size_t>(a.from)] !=
            point.prices[static_cast<std::size_t>(a.to)])
      return false;
  }
  return true;
}

CPPoint to_double(const RationalPoint& point) {
  CPPoint out;
  auto convert = [](const std::vector<Rational>& v) {
    std::vector<double> d;
    d.reserve(v.size());
    for (const Rational& r : v) d.push_back(r.get_d());
    return d;
  };
  out.prices = convert(point.prices);
  out.beta = convert(point.beta);
  out.spending = convert(point.spending);
  return out;
}

CPPoint scaled(const CPPoint& point, double factor) {
  CPPoint out = point;
  for (double& v : out.prices) v *= factor;
  for (double& v : out.beta) v *= factor;
  for (double& v : out.spending) v *= factor;
  return out;
}

RationalPoint scaled(const RationalPoint& point, const Rational& factor) {
  RationalPoint out = point;
  for (Rational& v : out.prices) v *= factor;
  for (Rational& v : out.beta) v *= factor;
  for (Rational& v : out.spending) v *= factor;
  return out;
}

}  // namespace adeq
