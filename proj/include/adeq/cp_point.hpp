#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adeq/market.hpp"
#include "adeq/rational.hpp"

namespace adeq {

/// A point (p, y, beta) of the flow-type program: prices p, inverse best
/// bang-per-buck beta, and money flow y per arc (indexed by arc id; arcs off
/// the flow support carry zero).
template <class T>
struct BasicCPPoint {
  std::vector<T> prices;
  std::vector<T> beta;
  std::vector<T> spending;

  friend bool operator==(const BasicCPPoint&, const BasicCPPoint&) = default;
};

using CPPoint = BasicCPPoint<double>;
using RationalPoint = BasicCPPoint<Rational>;

/// sum_i p_i log(p_i / beta_i) - sum_ij y_ij log u_ij. Throws DomainError if
/// some beta_i <= 0 or p_i <= 0.
double objective(const CPPoint& point, const Market& market);

/// beta_i = min over arcs ij of p_j / u_ij, the best beta for fixed prices.
std::vector<double> eliminate_beta(std::span<const double> prices, const Market& market);
std::vector<Rational> eliminate_beta(std::span<const Rational> prices, const Market& market);

/// Worst violation in each constraint family; arc/agent of the worst entry.
struct FeasibilityReport {
  struct Family {
    double violation = 0.0;
    int where = -1;  // arc id or agent
  };
  Family column_balance;  // sum_i y_ij = p_j
  Family row_balance;     // sum_j y_ij = p_i
  Family bang_per_buck;   // u_ij beta_i <= p_j
  Family price_floor;     // p_i >= 1
  Family nonnegativity;   // y, beta >= 0
  bool feasible = true;
  bool exact = false;

  double max_violation() const;
};

/// Numeric check: every family within `tol`.
FeasibilityReport is_feasible(const CPPoint& point, const Market& market, double tol);

/// Exact check over the rationals.
FeasibilityReport is_feasible(const RationalPoint& point, const Market& market);

/// True iff u_ij beta_i = p_j on every arc with y_ij > 0, which makes the
/// objective vanish arc by arc on a feasible point.
bool objective_is_exactly_zero(const RationalPoint& point, const Market& market);

CPPoint to_double(const RationalPoint& point);

/// Multiplies every coordinate by `factor`.
CPPoint scaled(const CPPoint& point, double factor);
RationalPoint scaled(const RationalPoint& point, const Rational& factor);

}  // namespace adeq
