#include "adeq/cp_solver.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>

#include "adeq/equilibrium.hpp"
#include "adeq/errors.hpp"
#include "adeq/graph.hpp"
#include "adeq/rationalize.hpp"

namespace adeq {

void SolverConfig::check(int agents) const {
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (!(price_cap >= agents)) throw DomainError("price_cap must be at least the number of agents");
  if (!(barrier_growth > 1.0)) throw DomainError("barrier_growth must exceed 1");
  if (!(initial_epsilon > 0.0)) throw DomainError("initial_epsilon must be positive");
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::Converged: return "Converged";
    case TerminationReason::IterationLimit: return "IterationLimit";
    case TerminationReason::PriceCapHit: return "PriceCapHit";
    case TerminationReason::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Variables are laid out as z = (p_0..p_{n-1}, beta_0..beta_{n-1}, y_s for
// each support arc s).
class BarrierProblem {
 public:
  BarrierProblem(const Market& market, const FlowSupport& support, const SccDecomposition& comps)
      : market_(market), n_(market.agents()), m_(support.size()), support_(support.arcs) {
    log_u_.resize(static_cast<std::size_t>(market.arc_count()));
    for (int id = 0; id < market.arc_count(); ++id)
      log_u_[static_cast<std::size_t>(id)] = std::log(market.weight(id));

    std::vector<bool> dropped(static_cast<std::size_t>(n_), false);
    for (const auto& members : comps.members) dropped[static_cast<std::size_t>(members.front())] = true;
    int rows = n_ + 1;
    for (int i = 0; i < n_; ++i)
      if (!dropped[static_cast<std::size_t>(i)]) ++rows;
    a_ = MatrixXd::Zero(rows, dim());
    b_ = VectorXd::Zero(rows);
    for (int j = 0; j < n_; ++j) a_(j, p(j)) = 1.0;
    for (int s = 0; s < m_; ++s) a_(market.arc(arc_of(s)).to, y(s)) -= 1.0;
    int row = n_;
    std::vector<int> row_of(static_cast<std::size_t>(n_), -1);
    for (int i = 0; i < n_; ++i) {
      if (dropped[static_cast<std::size_t>(i)]) continue;
      row_of[static_cast<std::size_t>(i)] = row;
      a_(row, p(i)) = 1.0;
      ++row;
    }
    for (int s = 0; s < m_; ++s) {
      int r = row_of[static_cast<std::size_t>(market.arc(arc_of(s)).from)];
      if (r >= 0) a_(r, y(s)) -= 1.0;
    }
    for (int i = 0; i < n_; ++i) a_(row, p(i)) = 1.0;
    b_(row) = n_;
  }

  int dim() const { return 2 * n_ + m_; }
  int p(int i) const { return i; }
  int beta(int i) const { return n_ + i; }
  int y(int s) const { return 2 * n_ + s; }
  int arc_of(int s) const { return support_[static_cast<std::size_t>(s)]; }
  int agents() const { return n_; }
  int support_size() const { return m_; }
  int inequality_count() const { return m_ + n_ + market_.arc_count(); }
  const MatrixXd& a() const { return a_; }
  const VectorXd& b() const { return b_; }

  bool strictly_feasible(const VectorXd& z) const {
    for (int s = 0; s < m_; ++s)
      if (!(z(y(s)) > 0.0)) return false;
    for (int i = 0; i < n_; ++i)
      if (!(z(beta(i)) > 0.0)) return false;
    for (int id = 0; id < market_.arc_count(); ++id)
      if (!(slack(z, id) > 0.0)) return false;
    return true;
  }

  double slack(const VectorXd& z, int id) const {
    const Arc& a = market_.arc(id);
    return z(p(a.to)) - market_.weight(id) * z(beta(a.from));
  }

  // Objective through the per-arc gaps plus balance residual terms; equal to
  // sum p log(p/beta) - sum y log u everywhere, without the cancellation.
  double objective(const VectorXd& z) const {
    std::vector<double> in_res(static_cast<std::size_t>(n_)), out_res(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) in_res[static_cast<std::size_t>(i)] = out_res[static_cast<std::size_t>(i)] = z(p(i));
    double value = 0.0;
    for (int s = 0; s < m_; ++s) {
      int id = arc_of(s);
      const Arc& a = market_.arc(id);
      value += z(y(s)) * (std::log(z(p(a.to)) / z(beta(a.from))) - log_u_[static_cast<std::size_t>(id)]);
      in_res[static_cast<std::size_t>(a.to)] -= z(y(s));
      out_res[static_cast<std::size_t>(a.from)] -= z(y(s));
    }
    for (int i = 0; i < n_; ++i)
      value += std::log(z(p(i))) * in_res[static_cast<std::size_t>(i)] -
               std::log(z(beta(i))) * out_res[static_cast<std::size_t>(i)];
    return value;
  }

  double barrier(const VectorXd& z, double t) const {
    double value = t * objective(z);
    for (int s = 0; s < m_; ++s) value -= std::log(z(y(s)));
    for (int i = 0; i < n_; ++i) value -= std::log(z(beta(i)));
    for (int id = 0; id < market_.arc_count(); ++id) value -= std::log(slack(z, id));
    return value;
  }

  void derivatives(const VectorXd& z, double t, VectorXd& grad, MatrixXd& hess) const {
    grad = VectorXd::Zero(dim());
    hess = MatrixXd::Zero(dim(), dim());
    for (int i = 0; i < n_; ++i) {
      double pi = z(p(i)), bi = z(beta(i));
      grad(p(i)) += t * (std::log(pi / bi) + 1.0);
      grad(beta(i)) += -t * pi / bi;
      hess(p(i), p(i)) += t / pi;
      hess(p(i), beta(i)) -= t / bi;
      hess(beta(i), p(i)) -= t / bi;
      hess(beta(i), beta(i)) += t * pi / (bi * bi);
      double g = 1.0 / bi;
      grad(beta(i)) -= g;
      hess(beta(i), beta(i)) += g * g;
    }
    for (int s = 0; s < m_; ++s) {
      grad(y(s)) += -t * log_u_[static_cast<std::size_t>(arc_of(s))];
      double g = 1.0 / z(y(s));
      grad(y(s)) -= g;
      hess(y(s), y(s)) += g * g;
    }
    for (int id = 0; id < market_.arc_count(); ++id) {
      const Arc& a = market_.arc(id);
      double u = market_.weight(id);
      double g = 1.0 / slack(z, id);
      int pj = p(a.to), bi = beta(a.from);
      grad(pj) -= g;
      grad(bi) += u * g;
      hess(pj, pj) += g * g;
      hess(bi, bi) += u * u * g * g;
      hess(pj, bi) -= u * g * g;
      hess(bi, pj) -= u * g * g;
    }
  }

  // Largest step keeping every inequality strictly positive (unbounded: inf).
  double max_step(const VectorXd& z, const VectorXd& dz) const {
    double best = std::numeric_limits<double>::infinity();
    auto limit = [&](double value, double rate) {
      if (rate < 0.0) best = std::min(best, -value / rate);
    };
    for (int s = 0; s < m_; ++s) limit(z(y(s)), dz(y(s)));
    for (int i = 0; i < n_; ++i) limit(z(beta(i)), dz(beta(i)));
    for (int id = 0; id < market_.arc_count(); ++id) {
      const Arc& a = market_.arc(id);
      limit(slack(z, id), dz(p(a.to)) - market_.weight(id) * dz(beta(a.from)));
    }
    return best;
  }

  CPPoint to_point(const VectorXd& z) const {
    CPPoint point;
    point.prices.resize(static_cast<std::size_t>(n_));
    point.beta.resize(static_cast<std::size_t>(n_));
    point.spending.assign(static_cast<std::size_t>(market_.arc_count()), 0.0);
    for (int i = 0; i < n_; ++i) {
      point.prices[static_cast<std::size_t>(i)] = z(p(i));
      point.beta[static_cast<std::size_t>(i)] = z(beta(i));
    }
    for (int s = 0; s < m_; ++s) point.spending[static_cast<std::size_t>(arc_of(s))] = z(y(s));
    return point;
  }

 private:
  const Market& market_;
  int n_;
  int m_;
  std::vector<int> support_;
  std::vector<double> log_u_;
  MatrixXd a_;
  VectorXd b_;
};

// Min price 1, beta at its eliminated (hard) minimum, spending clipped at 0.
CPPoint normalized(CPPoint point, const Market& market) {
  double lo = *std::min_element(point.prices.begin(), point.prices.end());
  for (auto& v : point.prices) v /= lo;
  for (auto& v : point.spending) v = std::max(0.0, v / lo);
  point.beta = eliminate_beta(point.prices, market);
  return point;
}

struct Candidate {
  CPPoint point;
  double objective = std::numeric_limits<double>::infinity();
  double violation = std::numeric_limits<double>::infinity();
};

Candidate evaluate(const CPPoint& raw, const Market& market, double tol) {
  Candidate c;
  c.point = normalized(raw, market);
  try {
    c.objective = objective(c.point, market);
  } catch (const DomainError&) {
    return c;
  }
  c.violation = is_feasible(c.point, market, tol).max_violation();
  return c;
}

bool verifies(const Candidate& c, const Market& market, double tol) {
  if (!(c.objective <= tol) || !(c.violation <= tol)) return false;
  try {
    return verify_equilibrium(extract_equilibrium(c.point, market, tol), market, tol).passed;
  } catch (const Error&) {
    return false;
  }
}

// Snaps the iterate onto the arcs that look tight: solves a weighted
// least-squares correction subject to balance, u beta = p on the tight arcs,
// zero flow elsewhere and a fixed price sum.
std::optional<Candidate> polish(const BarrierProblem& problem, const VectorXd& z, const Market& market,
                                double tol) {
  const int n = problem.agents();
  CPPoint current = problem.to_point(z);
  std::vector<double> hard = eliminate_beta(current.prices, market);
  std::vector<double> gap(static_cast<std::size_t>(problem.support_size()));
  for (int s = 0; s < problem.support_size(); ++s) {
    const Arc& a = market.arc(problem.arc_of(s));
    gap[static_cast<std::size_t>(s)] =
        1.0 - market.weight(problem.arc_of(s)) * hard[static_cast<std::size_t>(a.from)] /
                  current.prices[static_cast<std::size_t>(a.to)];
  }
  double scale = z.head(n).sum();

  std::optional<Candidate> best;
  for (double theta : {1e-7, 1e-6, 1e-5, 1e-8, 1e-4, 1e-3, 1e-9}) {
    std::vector<int> tight;
    for (int s = 0; s < problem.support_size(); ++s)
      if (gap[static_cast<std::size_t>(s)] <= theta) tight.push_back(s);
    const int k = static_cast<int>(tight.size());
    const int vars = 2 * n + k;
    const int rows = 2 * n + k + 1;
    MatrixXd c = MatrixXd::Zero(rows, vars);
    VectorXd d = VectorXd::Zero(rows);
    VectorXd v0(vars), w(vars);
    for (int i = 0; i < n; ++i) {
      v0(i) = current.prices[static_cast<std::size_t>(i)];
      v0(n + i) = hard[static_cast<std::size_t>(i)];
      c(i, i) = 1.0;
      c(n + i, i) = 1.0;
      c(rows - 1, i) = 1.0;
    }
    for (int t = 0; t < k; ++t) {
      int id = problem.arc_of(tight[static_cast<std::size_t>(t)]);
      const Arc& a = market.arc(id);
      v0(2 * n + t) = current.spending[static_cast<std::size_t>(id)];
      c(a.to, 2 * n + t) -= 1.0;
      c(n + a.from, 2 * n + t) -= 1.0;
      c(2 * n + t, n + a.from) = market.weight(id);
      c(2 * n + t, a.to) = -1.0;
    }
    d(rows - 1) = scale;
    for (int q = 0; q < vars; ++q) {
      double mag = std::max(std::abs(v0(q)), 1e-12 * scale);
      w(q) = mag * mag;
    }
    VectorXd r = d - c * v0;
    MatrixXd cw = c * w.asDiagonal();
    MatrixXd normal = cw * c.transpose();
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(normal);
    VectorXd lambda = cod.solve(r);
    VectorXd v = v0 + cw.transpose() * lambda;
    if (!v.allFinite() || (c * v - d).lpNorm<Eigen::Infinity>() > 1e-10 * scale) continue;

    CPPoint snapped;
    snapped.prices.assign(v.data(), v.data() + n);
    if (*std::min_element(snapped.prices.begin(), snapped.prices.end()) <= 0.0) continue;
    snapped.beta.assign(static_cast<std::size_t>(n), 0.0);
    snapped.spending.assign(static_cast<std::size_t>(market.arc_count()), 0.0);
    bool negative = false;
    for (int t = 0; t < k; ++t) {
      double value = v(2 * n + t);
      if (value < -1e-12 * scale) negative = true;
      snapped.spending[static_cast<std::size_t>(problem.arc_of(tight[static_cast<std::size_t>(t)]))] =
          std::max(0.0, value);
    }
    if (negative) continue;
    Candidate cand = evaluate(snapped, market, tol);
    if (!verifies(cand, market, tol)) continue;
    if (!best || cand.objective < best->objective) best = std::move(cand);
    if (best->objective <= 1e-3 * tol) break;
  }
  return best;
}

// Least-squares snap first; when that cannot find a nonnegative flow on the
// tight arcs (degenerate faces), round the iterate exactly instead.
std::optional<Candidate> crossover(const BarrierProblem& problem, const VectorXd& z, const Market& market,
                                   double tol, bool exact_fallback) {
  if (auto snapped = polish(problem, z, market, tol)) return snapped;
  if (!exact_fallback) return std::nullopt;
  try {
    Candidate cand = evaluate(to_double(rationalize(problem.to_point(z), market).point), market, tol);
    if (verifies(cand, market, tol)) return cand;
  } catch (const Error&) {
  }
  return std::nullopt;
}

VectorXd starting_point(const BarrierProblem& problem, const Market& market, const FlowSupport& support,
                        double epsilon) {
  RationalPoint cover = cycle_cover_point(market);
  const int n = market.agents();
  std::vector<double> y(static_cast<std::size_t>(market.arc_count()), 0.0);
  for (int id = 0; id < market.arc_count(); ++id)
    y[static_cast<std::size_t>(id)] = 2.0 * cover.spending[static_cast<std::size_t>(id)].get_d();
  for (int id : support.arcs)
    for (int c : shortest_cycle_using_arc(market, id)) y[static_cast<std::size_t>(c)] += epsilon;
  std::vector<double> prices(static_cast<std::size_t>(n), 0.0);
  for (int id = 0; id < market.arc_count(); ++id)
    prices[static_cast<std::size_t>(market.arc(id).to)] += y[static_cast<std::size_t>(id)];
  double total = 0.0;
  for (double v : prices) total += v;
  double factor = n / total;
  std::vector<double> beta = eliminate_beta(prices, market);

  VectorXd z(problem.dim());
  for (int i = 0; i < n; ++i) {
    z(problem.p(i)) = prices[static_cast<std::size_t>(i)] * factor;
    z(problem.beta(i)) = 0.5 * beta[static_cast<std::size_t>(i)] * factor;
  }
  for (int s = 0; s < problem.support_size(); ++s)
    z(problem.y(s)) = y[static_cast<std::size_t>(problem.arc_of(s))] * factor;
  return z;
}

void check_solvable(const Market& market) {
  auto report = validate(market);
  if (!report.ok()) throw ValidationError(report.violations.front());
  auto verdict = check_star_condition(market);
  if (!verdict.feasible)
    throw InfeasibleMarket("agent " + std::to_string(*verdict.witness_node) +
                           " forms a singleton component without a loop");
}

}  // namespace

SolveResult solve(const Market& market, const SolverConfig& config) {
  auto started = std::chrono::steady_clock::now();
  check_solvable(market);
  config.check(market.agents());

  const FlowSupport support = flow_support(market);
  const SccDecomposition comps = scc(market);
  const BarrierProblem problem(market, support, comps);
  const int dim = problem.dim();
  const int rows = static_cast<int>(problem.a().rows());
  const double tol = config.tolerance;
  const double inequalities = problem.inequality_count();

  VectorXd z = starting_point(problem, market, support, config.initial_epsilon);
  double t = std::max(1.0, inequalities / std::max(problem.objective(z), 1e-12));

  SolveResult result;
  SolveReport& report = result.report;
  Candidate best = evaluate(problem.to_point(z), market, tol);
  auto finish = [&](TerminationReason reason, Candidate chosen) {
    report.reason = reason;
    report.objective = chosen.objective;
    report.max_violation = chosen.violation;
    result.point = std::move(chosen.point);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
  };

  VectorXd grad;
  MatrixXd hess;
  MatrixXd kkt = MatrixXd::Zero(dim + rows, dim + rows);
  VectorXd rhs(dim + rows);
  kkt.block(dim, 0, rows, dim) = problem.a();
  kkt.block(0, dim, dim, rows) = problem.a().transpose();

  while (true) {
    // Centering at the current barrier weight.
    bool centered = false;
    while (report.iterations < config.max_iterations) {
      problem.derivatives(z, t, grad, hess);
      kkt.topLeftCorner(dim, dim) = hess;
      rhs.head(dim) = -grad;
      rhs.tail(rows) = problem.b() - problem.a() * z;
      VectorXd sol = Eigen::PartialPivLU<MatrixXd>(kkt).solve(rhs);
      if (!sol.allFinite()) {
        if (config.polish)
          if (auto snapped = crossover(problem, z, market, tol, true)) {
            report.polished = true;
            return finish(TerminationReason::Converged, std::move(*snapped));
          }
        return finish(TerminationReason::NumericalFailure, best);
      }
      VectorXd dz = sol.head(dim);
      report.kkt_residual = (grad + problem.a().transpose() * sol.tail(rows)).lpNorm<Eigen::Infinity>() / t;
      double decrement = dz.dot(hess * dz);
      ++report.iterations;

      double step = std::min(1.0, 0.99 * problem.max_step(z, dz));
      double phi = problem.barrier(z, t);
      double slope = grad.dot(dz);
      VectorXd trial = z + step * dz;
      while (step > 1e-14) {
        trial = z + step * dz;
        if (problem.strictly_feasible(trial)) {
          double value = problem.barrier(trial, t);
          if (std::isfinite(value) && (slope >= 0.0 || value <= phi + 0.01 * step * slope)) break;
        }
        step *= 0.5;
      }
      if (step <= 1e-14) {
        centered = true;  // no further progress at this weight
        break;
      }
      z = trial;
      if (decrement / 2.0 <= 1e-9) {
        centered = true;
        break;
      }
    }
    ++report.barrier_rounds;

    double min_price = z.head(problem.agents()).minCoeff();
    double max_price = z.head(problem.agents()).maxCoeff();
    report.duality_measure = inequalities / (t * min_price);
    Candidate current = evaluate(problem.to_point(z), market, tol);
    if (current.objective + current.violation < best.objective + best.violation) best = current;

    if (max_price / min_price >= 0.99 * config.price_cap) return finish(TerminationReason::PriceCapHit, best);
    // The optimum is 0, so a feasible iterate's objective is its own gap; the
    // barrier bound can stall on markets with a continuum of equilibria.
    if (current.objective <= tol && current.violation <= tol &&
        (report.duality_measure <= tol || verifies(current, market, tol))) {
      if (config.polish) {
        const bool current_ok = verifies(current, market, tol);
        if (auto snapped = crossover(problem, z, market, tol, !current_ok);
            snapped && (snapped->objective <= current.objective || !current_ok)) {
          report.polished = true;
          return finish(TerminationReason::Converged, std::move(*snapped));
        }
      }
      return finish(TerminationReason::Converged, current);
    }
    if (config.polish && centered && report.duality_measure <= 1e-2) {
      if (auto snapped = crossover(problem, z, market, tol, report.duality_measure <= 1e-6)) {
        report.polished = true;
        report.duality_measure = std::max(0.0, snapped->objective);
        return finish(TerminationReason::Converged, std::move(*snapped));
      }
    }
    if (report.iterations >= config.max_iterations) {
      if (config.polish && report.duality_measure <= 1e-6)
        if (auto snapped = crossover(problem, z, market, tol, true)) {
          report.polished = true;
          return finish(TerminationReason::Converged, std::move(*snapped));
        }
      return finish(TerminationReason::IterationLimit, best);
    }
    t *= config.barrier_growth;
  }
}

std::vector<BatchOutcome> solve_batch(std::span<const Market> markets, const SolverConfig& config, int jobs) {
  std::vector<BatchOutcome> out(markets.size());
  const auto count = static_cast<std::ptrdiff_t>(markets.size());
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    auto& slot = out[static_cast<std::size_t>(k)];
    try {
      slot.result = solve(markets[static_cast<std::size_t>(k)], config);
    } catch (const InfeasibleMarket& e) {
      slot.infeasible = true;
      slot.error = e.what();
    } catch (const std::exception& e) {
      slot.error = e.what();
    }
  }
  return out;
}

std::vector<BatchOutcome> solve_batch_serial(std::span<const Market> markets, const SolverConfig& config) {
  std::vector<BatchOutcome> out(markets.size());
  for (std::size_t k = 0; k < markets.size(); ++k) {
    try {
      out[k].result = solve(markets[k], config);
    } catch (const InfeasibleMarket& e) {
      out[k].infeasible = true;
      out[k].error = e.what();
    } catch (const std::exception& e) {
      out[k].error = e.what();
    }
  }
  return out;
}

namespace {

struct ReducedState {
  std::vector<double> prices;
  std::vector<double> beta;
  std::vector<int> argmin;  // defining arc per agent
};

ReducedState reduced_state(std::span<const double> spending, const Market& market) {
  if (static_cast<int>(spending.size()) != market.arc_count())
    throw DomainError("spending vector has wrong length");
  const int n = market.agents();
  ReducedState s;
  s.prices.assign(static_cast<std::size_t>(n), 0.0);
  for (int id = 0; id < market.arc_count(); ++id)
    s.prices[static_cast<std::size_t>(market.arc(id).to)] += spending[static_cast<std::size_t>(id)];
  for (int i = 0; i < n; ++i)
    if (!(s.prices[static_cast<std::size_t>(i)] > 0.0))
      throw DomainError("inflow of agent " + std::to_string(i) + " must be positive");
  s.beta.assign(static_cast<std::size_t>(n), 0.0);
  s.argmin.assign(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int id : market.out_arcs(i)) {
      double v = s.prices[static_cast<std::size_t>(market.arc(id).to)] / market.weight(id);
      if (s.argmin[static_cast<std::size_t>(i)] < 0 || v < s.beta[static_cast<std::size_t>(i)]) {
        s.beta[static_cast<std::size_t>(i)] = v;
        s.argmin[static_cast<std::size_t>(i)] = id;
      }
    }
    if (s.argmin[static_cast<std::size_t>(i)] < 0)
      throw DomainError("agent " + std::to_string(i) + " has no outgoing arc");
  }
  return s;
}

}  // namespace

double reduced_objective(std::span<const double> spending, const Market& market) {
  ReducedState s = reduced_state(spending, market);
  double value = 0.0;
  for (std::size_t i = 0; i < s.prices.size(); ++i)
    value += s.prices[i] * (std::log(s.prices[i]) - std::log(s.beta[i]));
  for (int id = 0; id < market.arc_count(); ++id)
    value -= spending[static_cast<std::size_t>(id)] * std::log(market.weight(id));
  return value;
}

std::vector<double> reduced_gradient(std::span<const double> spending, const Market& market) {
  ReducedState s = reduced_state(spending, market);
  const std::size_t n = s.prices.size();
  // dF/dp_j: direct terms plus the dependence of every beta_k whose minimum
  // is attained on an arc into j.
  std::vector<double> dp(n);
  for (std::size_t j = 0; j < n; ++j) dp[j] = std::log(s.prices[j]) + 1.0 - std::log(s.beta[j]);
  for (std::size_t k = 0; k < n; ++k) {
    auto j = static_cast<std::size_t>(market.arc(s.argmin[k]).to);
    dp[j] -= s.prices[k] / s.prices[j];
  }
  std::vector<double> grad(static_cast<std::size_t>(market.arc_count()));
  for (int id = 0; id < market.arc_count(); ++id)
    grad[static_cast<std::size_t>(id)] =
        dp[static_cast<std::size_t>(market.arc(id).to)] - std::log(market.weight(id));
  return grad;
}

}  // namespace adeq
