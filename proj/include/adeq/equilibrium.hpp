#pragma once

#include <type_traits>
#include <vector>

#include "adeq/cp_point.hpp"
#include "adeq/market.hpp"
#include "adeq/rational.hpp"

namespace adeq {

/// Prices per good, allocation x and spending y = p_j x_ij per arc id, and
/// the resulting utility per agent.
template <class T>
struct BasicEquilibrium {
  std::vector<T> prices;
  std::vector<T> allocation;
  std::vector<T> spending;
  std::vector<T> utilities;

  static constexpr bool exact = std::is_same_v<T, Rational>;

  friend bool operator==(const BasicEquilibrium&, const BasicEquilibrium&) = default;
};

using Equilibrium = BasicEquilibrium<double>;
using ExactEquilibrium = BasicEquilibrium<Rational>;

/// Fills spending and utilities from prices and allocation.
template <class T>
BasicEquilibrium<T> make_equilibrium(const Market& market, std::vector<T> prices,
                                     std::vector<T> allocation);

/// Rescales prices and spending so that the smallest price is 1.
template <class T>
BasicEquilibrium<T> normalize_min_price(const BasicEquilibrium<T>& eq);

template <class T>
std::vector<T> agent_utilities(const BasicEquilibrium<T>& eq, const Market& market);

/// x_ij = y_ij / p_j, normalized to min price 1. Throws NotOptimal when the
/// point is infeasible or its objective exceeds `tol` (after normalization).
Equilibrium extract_equilibrium(const CPPoint& point, const Market& market, double tol = 1e-8);

/// Exact flavour: requires exact feasibility and u_ij beta_i = p_j on every
/// arc with positive spending.
ExactEquilibrium extract_equilibrium(const RationalPoint& point, const Market& market);

struct VerificationReport {
  struct Family {
    double violation = 0.0;
    int where = -1;  // good, agent or arc id
  };
  Family clearing;       // sum_i x_ij = 1
  Family budget;         // sum_j x_ij p_j = p_i
  Family bang_per_buck;  // x_ij > 0 only on best bang-per-buck arcs
  Family positivity;     // p > 0, x >= 0
  bool passed = true;
  bool exact = false;

  double max_violation() const;
};

/// Numeric verification. Money-valued residuals are compared against
/// tol * max(1, max_i p_i); the bang-per-buck check uses relative slack `tol`
/// and ignores arcs with x_ij <= tol.
VerificationReport verify_equilibrium(const Equilibrium& eq, const Market& market, double tol);

/// Exact verification over the rationals.
VerificationReport verify_equilibrium(const ExactEquilibrium& eq, const Market& market);

/// Embeds an equilibrium as an optimal point: alpha = 1 / min(1, min_i p_i), p = alpha p', y_ij = p_j x_ij,
/// beta = eliminate_beta(p). Throws VerificationFailed if eq does not verify.
CPPoint embed_equilibrium(const Equilibrium& eq, const Market& market, double tol = 1e-8);
RationalPoint embed_equilibrium(const ExactEquilibrium& eq, const Market& market);

/// Linear combination of (y, p): lambda * eq1 + (1 - lambda) * eq2, with x
/// recomputed as y_ij / p_j. The result is not re-verified here.
template <class T>
BasicEquilibrium<T> convex_combine(const BasicEquilibrium<T>& eq1, const BasicEquilibrium<T>& eq2,
                                   const T& lambda, const Market& market);

ExactEquilibrium to_exact(const Equilibrium& eq);
Equilibrium to_double(const ExactEquilibrium& eq);

}  // namespace adeq
