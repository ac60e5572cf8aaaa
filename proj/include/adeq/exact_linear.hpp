#pragma once

#include <vector>

#include "adeq/rational.hpp"

namespace adeq::exact {

using Matrix = std::vector<std::vector<Rational>>;

enum class SolveStatus { Unique, Underdetermined, Inconsistent };

struct LinearSolution {
  SolveStatus status = SolveStatus::Inconsistent;
  int rank = 0;
  /// A particular solution with every free variable set to zero; empty when
  /// the system is inconsistent.
  std::vector<Rational> x;
  std::vector<int> free_columns;
};

/// Solves A x = b with fraction-free (Bareiss) elimination over the integers:
/// each row is cleared of denominators, pivots are chosen by magnitude, and
/// every intermediate entry is a minor of the scaled system.
LinearSolution solve_fraction_free(const Matrix& a, const std::vector<Rational>& b);

/// Determinant of a square matrix by the same elimination.
Rational determinant(const Matrix& a);

/// min cost.x  s.t.  eq_rows x = eq_rhs,  le_rows x <= le_rhs,  x >= 0.
struct LinearProgram {
  int variables = 0;
  Matrix eq_rows;
  std::vector<Rational> eq_rhs;
  Matrix le_rows;
  std::vector<Rational> le_rhs;
  std::vector<Rational> cost;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  /// A basic optimal solution, i.e. a vertex of the feasible region.
  std::vector<Rational> x;
  Rational value;
};

/// Two-phase dense tableau simplex with Bland's rule. Deterministic: the same
/// program always returns the same vertex.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace adeq::exact
