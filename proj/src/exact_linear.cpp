#include "adeq/exact_linear.hpp"

#include <algorithm>
#include <cstdlib>

#include "adeq/errors.hpp"

namespace adeq::exact {

namespace {

using IntMatrix = std::vector<std::vector<Integer>>;

struct Echelon {
  IntMatrix m;
  std::vector<int> pivot_columns;
  int swaps = 0;
};

// Row-echelon form of the integer matrix over its first `cols` columns.
Echelon bareiss(IntMatrix m, int cols) {
  Echelon e;
  const int rows = static_cast<int>(m.size());
  const int width = rows == 0 ? 0 : static_cast<int>(m[0].size());
  Integer prev = 1;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    for (int k = r; k < rows; ++k) {
      const Integer& v = m[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
      if (sgn(v) == 0) continue;
      if (best < 0 || mpz_cmpabs(v.get_mpz_t(), m[static_cast<std::size_t>(best)][static_cast<std::size_t>(c)].get_mpz_t()) > 0) best = k;
    }
    if (best < 0) continue;
    if (best != r) {
      std::swap(m[static_cast<std::size_t>(best)], m[static_cast<std::size_t>(r)]);
      ++e.swaps;
    }
    const auto& pivot_row = m[static_cast<std::size_t>(r)];
    const Integer& pivot = pivot_row[static_cast<std::size_t>(c)];
    Integer scratch;
    for (int i = r + 1; i < rows; ++i) {
      auto& row = m[static_cast<std::size_t>(i)];
      const Integer factor = row[static_cast<std::size_t>(c)];
      for (int j = c + 1; j < width; ++j) {
        auto& cell = row[static_cast<std::size_t>(j)];
        if (sgn(factor) == 0) {
          if (prev != 1) {
            scratch = pivot * cell;
            mpz_divexact(cell.get_mpz_t(), scratch.get_mpz_t(), prev.get_mpz_t());
          } else {
            cell *= pivot;
          }
          continue;
        }
        scratch = pivot * cell - factor * pivot_row[static_cast<std::size_t>(j)];
        mpz_divexact(cell.get_mpz_t(), scratch.get_mpz_t(), prev.get_mpz_t());
      }
      row[static_cast<std::size_t>(c)] = 0;
    }
    prev = pivot;
    e.pivot_columns.push_back(c);
    ++r;
  }
  e.m = std::move(m);
  return e;
}

IntMatrix scale_rows(const Matrix& a, const std::vector<Rational>* b) {
  IntMatrix m;
  m.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    Integer den = 1;
    for (const Rational& v : a[i]) den = lcm(den, v.get_den());
    if (b) den = lcm(den, (*b)[i].get_den());
    std::vector<Integer> row;
    row.reserve(a[i].size() + (b ? 1 : 0));
    for (const Rational& v : a[i]) row.push_back(v.get_num() * (den / v.get_den()));
    if (b) row.push_back((*b)[i].get_num() * (den / (*b)[i].get_den()));
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace

LinearSolution solve_fraction_free(const Matrix& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw DomainError("row count of A and b differ");
  const int cols = a.empty() ? 0 : static_cast<int>(a[0].size());
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != cols) throw DomainError("ragged matrix");
  Echelon e = bareiss(scale_rows(a, &b), cols);
  const int rank = static_cast<int>(e.pivot_columns.size());
  LinearSolution result;
  result.rank = rank;
  for (std::size_t i = static_cast<std::size_t>(rank); i < e.m.size(); ++i)
    if (sgn(e.m[i][static_cast<std::size_t>(cols)]) != 0) {
      result.status = SolveStatus::Inconsistent;
      return result;
    }
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : e.pivot_columns) is_pivot[static_cast<std::size_t>(c)] = true;
  for (int c = 0; c < cols; ++c)
    if (!is_pivot[static_cast<std::size_t>(c)]) result.free_columns.push_back(c);
  result.status = result.free_columns.empty() ? SolveStatus::Unique : SolveStatus::Underdetermined;
  result.x.assign(static_cast<std::size_t>(cols), Rational(0));
  for (int k = rank - 1; k >= 0; --k) {
    const auto& row = e.m[static_cast<std::size_t>(k)];
    const int c = e.pivot_columns[static_cast<std::size_t>(k)];
    Rational acc(row[static_cast<std::size_t>(cols)]);
    for (int j = c + 1; j < cols; ++j)
      if (sgn(row[static_cast<std::size_t>(j)]) != 0 && sgn(result.x[static_cast<std::size_t>(j)]) != 0)
        acc -= Rational(row[static_cast<std::size_t>(j)]) * result.x[static_cast<std::size_t>(j)];
    acc /= Rational(row[static_cast<std::size_t>(c)]);
    result.x[static_cast<std::size_t>(c)] = acc;
  }
  return result;
}

Rational determinant(const Matrix& a) {
  const std::size_t n = a.size();
  for (const auto& row : a)
    if (row.size() != n) throw DomainError("determinant of a non-square matrix");
  if (n == 0) return Rational(1);
  Integer den_product = 1;
  IntMatrix m = scale_rows(a, nullptr);
  for (const auto& row : a) {
    Integer den = 1;
    for (const Rational& v : row) den = lcm(den, v.get_den());
    den_product *= den;
  }
  Echelon e = bareiss(std::move(m), static_cast<int>(n));
  if (e.pivot_columns.size() < n) return Rational(0);
  Rational det(e.m[n - 1][n - 1], den_product);
  det.canonicalize();
  return (e.swaps % 2) ? Rational(-det) : det;
}

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : t_(rows + 1, std::vector<Rational>(cols + 1)), basis_(rows, -1), cols_(cols) {}

  Rational& at(std::size_t r, std::size_t c) { return t_[r][c]; }
  Rational& rhs(std::size_t r) { return t_[r][cols_]; }
  std::vector<Rational>& objective() { return t_.back(); }
  std::size_t rows() const { return t_.size() - 1; }
  std::size_t cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t c) {
    auto& prow = t_[r];
    const Rational inv = 1 / prow[c];
    for (auto& v : prow)
      if (sgn(v) != 0) v *= inv;
    Rational factor;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (i == r || sgn(t_[i][c]) == 0) continue;
      factor = t_[i][c];
      auto& row = t_[i];
      for (std::size_t j = 0; j <= cols_; ++j)
        if (sgn(prow[j]) != 0) row[j] -= factor * prow[j];
    }
    basis_[r] = static_cast<int>(c);
  }

  // Bland's rule on the objective row; `allowed` masks entering columns.
  // Returns false if unbounded.
  bool optimize(const std::vector<bool>& allowed) {
    for (;;) {
      auto& z = objective();
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < cols_; ++j)
        if (allowed[j] && sgn(z[j]) < 0) {
          entering = j;
          break;
        }
      if (entering == cols_) return true;
      std::size_t leaving = rows();
      Rational best_ratio, ratio;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (sgn(t_[i][entering]) <= 0) continue;
        ratio = t_[i][cols_] / t_[i][entering];
        if (leaving == rows() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leaving])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving == rows()) return false;
      pivot(leaving, entering);
    }
  }

  void drop_row(std::size_t r) {
    t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  std::vector<std::vector<Rational>> t_;
  std::vector<int> basis_;
  std::size_t cols_;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
  const std::size_t n = static_cast<std::size_t>(lp.variables);
  const std::size_t eq = lp.eq_rows.size();
  const std::size_t le = lp.le_rows.size();
  if (lp.eq_rhs.size() != eq || lp.le_rhs.size() != le || lp.cost.size() != n)
    throw DomainError("linear program dimensions are inconsistent");
  const std::size_t rows = eq + le;
  const std::size_t slack0 = n, art0 = n + le, cols = n + le + rows;

  Tableau tab(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const bool is_eq = r < eq;
    const auto& src = is_eq ? lp.eq_rows[r] : lp.le_rows[r - eq];
    if (src.size() != n) throw DomainError("linear program row has wrong length");
    Rational rhs = is_eq ? lp.eq_rhs[r] : lp.le_rhs[r - eq];
    const bool flip = rhs < 0;
    for (std::size_t j = 0; j < n; ++j)
      if (sgn(src[j]) != 0) tab.at(r, j) = flip ? Rational(-src[j]) : src[j];
    if (!is_eq) tab.at(r, slack0 + (r - eq)) = flip ? -1 : 1;
    tab.at(r, art0 + r) = 1;
    tab.rhs(r) = flip ? Rational(-rhs) : rhs;
    tab.basis()[r] = static_cast<int>(art0 + r);
  }
  // Phase I: minimize the sum of artificials.
  auto& z = tab.objective();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j <= cols; ++j)
      if (j < art0 || j == cols) z[j] -= tab.at(r, j);
  std::vector<bool> allowed(cols, true);
  tab.optimize(allowed);
  LpResult result;
  if (sgn(tab.objective()[cols]) != 0) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  // Pivot remaining artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < tab.rows();) {
    if (static_cast<std::size_t>(tab.basis()[r]) < art0) {
      ++r;
      continue;
    }
    std::size_t c = 0;
    while (c < art0 && sgn(tab.at(r, c)) == 0) ++c;
    if (c < art0) {
      tab.pivot(r, c);
      ++r;
    } else {
      tab.drop_row(r);
    }
  }
  // Phase II.
  for (std::size_t j = 0; j <= cols; ++j) tab.objective()[j] = 0;
  for (std::size_t j = 0; j < n; ++j) tab.objective()[j] = lp.cost[j];
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const auto b = static_cast<std::size_t>(tab.basis()[r]);
    if (b >= n || sgn(lp.cost[b]) == 0) continue;
    const Rational cb = lp.cost[b];
    for (std::size_t j = 0; j <= cols; ++j)
      if (sgn(tab.at(r, j)) != 0) tab.objective()[j] -= cb * tab.at(r, j);
  }
  for (std::size_t j = art0; j < cols; ++j) allowed[j] = false;
  if (!tab.optimize(allowed)) {
    result.status = LpStatus::Unbounded;
    return result;
  }
  result.status = LpStatus::Optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    const auto b = static_cast<std::size_t>(tab.basis()[r]);
    if (b < n) result.x[b] = tab.rhs(r);
  }
  result.value = 0;
  for (std::size_t j = 0; j < n; ++j) result.value += lp.cost[j] * result.x[j];
  return result;
}

}  // namespace adeq::exact
