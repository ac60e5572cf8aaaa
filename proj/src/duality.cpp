#include "adeq/duality.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "adeq/errors.hpp"

namespace adeq {
namespace {

constexpr mpfr_prec_t kPrecision = 128;

// Closed interval [lo, hi] with outward rounding.
class Interval {
 public:
  Interval() {
    mpfr_init2(lo_, kPrecision);
    mpfr_init2(hi_, kPrecision);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  explicit Interval(const Rational& value) : Interval() {
    mpfr_set_q(lo_, value.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, value.get_mpq_t(), MPFR_RNDU);
  }
  Interval(const Interval& other) : Interval() {
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  Interval& operator=(const Interval& other) {
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
    return *this;
  }
  ~Interval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  // Requires a positive argument.
  static Interval log(const Rational& value) {
    Interval r(value);
    mpfr_log(r.lo_, r.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, r.hi_, MPFR_RNDU);
    return r;
  }

  Interval& operator+=(const Interval& other) {
    mpfr_add(lo_, lo_, other.lo_, MPFR_RNDD);
    mpfr_add(hi_, hi_, other.hi_, MPFR_RNDU);
    return *this;
  }
  Interval& operator-=(const Interval& other) {
    mpfr_sub(lo_, lo_, other.hi_, MPFR_RNDD);
    mpfr_sub(hi_, hi_, other.lo_, MPFR_RNDU);
    return *this;
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_t t;
    mpfr_init2(t, kPrecision);
    bool first = true;
    for (auto x : {a.lo_, a.hi_})
      for (auto y : {b.lo_, b.hi_}) {
        mpfr_mul(t, x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t, r.lo_)) mpfr_set(r.lo_, t, MPFR_RNDD);
        mpfr_mul(t, x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t, r.hi_)) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    mpfr_clear(t);
    return r;
  }

  bool certainly_below(const Interval& other) const { return mpfr_lessequal_p(hi_, other.lo_); }
  bool certainly_above(const Interval& other) const { return mpfr_greater_p(lo_, other.hi_); }
  bool contains(const Rational& value) const {
    return mpfr_cmp_q(lo_, value.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, value.get_mpq_t()) >= 0;
  }
  double distance_to(const Rational& value) const {
    if (contains(value)) return 0.0;
    double v = value.get_d();
    return std::max(mpfr_get_d(lo_, MPFR_RNDN) - v, v - mpfr_get_d(hi_, MPFR_RNDN));
  }

 private:
  mpfr_t lo_;
  mpfr_t hi_;
};

template <class Family>
void note(Family& family, double residual, int where) {
  if (residual > family.residual) {
    family.residual = residual;
    family.where = where;
  }
}

void check_sizes(std::size_t agents, std::size_t arcs, const Market& market) {
  if (static_cast<int>(agents) != market.agents() || static_cast<int>(arcs) != market.arc_count())
    throw DomainError("vector sizes do not match the market");
}

std::vector<double> agent_values(const std::vector<double>& x, const Market& market) {
  std::vector<double> u(static_cast<std::size_t>(market.agents()), 0.0);
  for (int id = 0; id < market.arc_count(); ++id)
    u[static_cast<std::size_t>(market.arc(id).from)] += market.weight(id) * x[static_cast<std::size_t>(id)];
  return u;
}

std::vector<Rational> agent_values(const std::vector<Rational>& x, const Market& market) {
  std::vector<Rational> u(static_cast<std::size_t>(market.agents()), Rational(0));
  for (int id = 0; id < market.arc_count(); ++id)
    u[static_cast<std::size_t>(market.arc(id).from)] += market.arc(id).utility * x[static_cast<std::size_t>(id)];
  return u;
}

template <class T>
std::vector<T> inflow(const std::vector<T>& x, const Market& market) {
  std::vector<T> in(static_cast<std::size_t>(market.agents()), T(0));
  for (int id = 0; id < market.arc_count(); ++id)
    in[static_cast<std::size_t>(market.arc(id).to)] += x[static_cast<std::size_t>(id)];
  return in;
}

}  // namespace

double KKTReport::max_residual() const {
  return std::max({kkt1.residual, kkt1_slack.residual, kkt2.residual, kkt3.residual, kkt3b.residual,
                   complementary.residual, sign.residual, gap.residual});
}

DualCertificate self_dual_certificate(const Equilibrium& eq, const Market& market, double tol) {
  if (!verify_equilibrium(eq, market, tol).passed)
    throw VerificationFailed("equilibrium does not verify; no certificate");
  Equilibrium normal = normalize_min_price(eq);
  std::vector<double> beta = eliminate_beta(normal.prices, market);
  DualCertificate cert;
  for (std::size_t i = 0; i < normal.prices.size(); ++i) {
    cert.delta.push_back(std::log(normal.prices[i]));
    cert.gamma.push_back(std::log(beta[i]));
  }
  cert.w = normal.allocation;
  cert.tau.assign(normal.prices.size(), 0.0);
  return cert;
}

ExactDualCertificate self_dual_certificate(const ExactEquilibrium& eq, const Market& market) {
  if (!verify_equilibrium(eq, market).passed)
    throw VerificationFailed("equilibrium does not verify; no certificate");
  ExactEquilibrium normal = normalize_min_price(eq);
  ExactDualCertificate cert;
  cert.exp_delta = normal.prices;
  cert.exp_gamma = eliminate_beta(normal.prices, market);
  cert.w = normal.allocation;
  cert.tau.assign(normal.prices.size(), Rational(0));
  return cert;
}

KKTReport verify_kkt(const CPPoint& point, const DualCertificate& cert, const Market& market, double tol) {
  check_sizes(point.prices.size(), point.spending.size(), market);
  check_sizes(cert.delta.size(), cert.w.size(), market);
  check_sizes(cert.gamma.size(), cert.w.size(), market);
  check_sizes(cert.tau.size(), cert.w.size(), market);
  const int n = market.agents();
  KKTReport r;
  std::vector<double> into(static_cast<std::size_t>(n), 0.0), value(static_cast<std::size_t>(n), 0.0),
      money(static_cast<std::size_t>(n), 0.0);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    auto k = static_cast<std::size_t>(id);
    double lu = std::log(market.weight(id));
    double defect = cert.gamma[i] - cert.delta[j] + lu;  // <= 0
    note(r.kkt1, std::max(0.0, defect), id);
    note(r.kkt1_slack, std::abs(point.spending[k] * defect), id);
    double w = cert.w[k];
    note(r.sign, std::max(0.0, -w), id);
    note(r.complementary, std::abs(w * (point.prices[j] - market.weight(id) * point.beta[i])), id);
    into[j] += w;
    value[i] += market.weight(id) * w;
    money[i] += point.prices[j] * w;
  }
  double tau_sum = 0.0;
  for (int ii = 0; ii < n; ++ii) {
    auto i = static_cast<std::size_t>(ii);
    double p = point.prices[i], b = point.beta[i];
    note(r.kkt2, std::abs(cert.delta[i] - cert.gamma[i] + into[i] + cert.tau[i] - std::log(p / b) - 1.0), ii);
    note(r.kkt3, std::abs(value[i] - p / b), ii);
    note(r.kkt3b, std::abs(p - money[i]), ii);
    note(r.sign, std::max(0.0, -cert.tau[i]), ii);
    note(r.complementary, std::abs(cert.tau[i] * (p - 1.0)), ii);
    tau_sum += cert.tau[i];
  }
  double obj = std::numeric_limits<double>::infinity();
  try {
    obj = objective(point, market);
  } catch (const DomainError&) {
  }
  note(r.gap, std::abs(obj - tau_sum), -1);
  double scale = 1.0;
  for (double p : point.prices) scale = std::max(scale, p);
  r.passed = std::isfinite(r.max_residual()) && r.max_residual() <= tol * scale;
  return r;
}

KKTReport verify_kkt(const RationalPoint& point, const ExactDualCertificate& cert, const Market& market) {
  check_sizes(point.prices.size(), point.spending.size(), market);
  check_sizes(cert.exp_delta.size(), cert.w.size(), market);
  check_sizes(cert.exp_gamma.size(), cert.w.size(), market);
  check_sizes(cert.tau.size(), cert.w.size(), market);
  const int n = market.agents();
  KKTReport r;
  r.exact = true;
  bool ok = true;
  for (std::size_t i = 0; i < cert.exp_delta.size(); ++i)
    if (cert.exp_delta[i] <= 0 || cert.exp_gamma[i] <= 0 || point.prices[i] <= 0 || point.beta[i] <= 0) {
      r.passed = false;
      note(r.sign, std::numeric_limits<double>::infinity(), static_cast<int>(i));
      return r;
    }
  auto fail = [&](KKTReport::Family& family, const Rational& defect, int where) {
    ok = false;
    note(family, std::max(std::abs(defect.get_d()), std::numeric_limits<double>::min()), where);
  };

  std::vector<Rational> into(static_cast<std::size_t>(n)), value(static_cast<std::size_t>(n)),
      money(static_cast<std::size_t>(n));
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    auto k = static_cast<std::size_t>(id);
    // exp of gamma_i - delta_j + log u_ij, compared against 1
    Rational ratio = a.utility * cert.exp_gamma[i] / cert.exp_delta[j];
    if (ratio > 1) fail(r.kkt1, ratio - 1, id);
    if (point.spending[k] != 0 && ratio != 1) fail(r.kkt1_slack, point.spending[k] * (ratio - 1), id);
    const Rational& w = cert.w[k];
    if (w < 0) fail(r.sign, w, id);
    Rational slack = point.prices[j] - a.utility * point.beta[i];
    if (w != 0 && slack != 0) fail(r.complementary, w * slack, id);
    into[j] += w;
    value[i] += a.utility * w;
    money[i] += point.prices[j] * w;
  }
  Rational tau_sum = 0;
  for (int ii = 0; ii < n; ++ii) {
    auto i = static_cast<std::size_t>(ii);
    const Rational& p = point.prices[i];
    const Rational& b = point.beta[i];
    // log(a) + c = log(b) with rational a, b, c forces c = 0 and a = b.
    Rational rational_part = into[i] + cert.tau[i] - 1;
    if (cert.exp_delta[i] / cert.exp_gamma[i] != p / b || rational_part != 0)
      fail(r.kkt2,
           rational_part + std::log(cert.exp_delta[i].get_d() / cert.exp_gamma[i].get_d()) - std::log(p.get_d() / b.get_d()),
           ii);
    if (value[i] != p / b) fail(r.kkt3, value[i] - p / b, ii);
    if (money[i] != p) fail(r.kkt3b, money[i] - p, ii);
    if (cert.tau[i] < 0) fail(r.sign, cert.tau[i], ii);
    if (cert.tau[i] != 0 && p != 1) fail(r.complementary, cert.tau[i] * (p - 1), ii);
    tau_sum += cert.tau[i];
  }

  Interval obj;
  for (int ii = 0; ii < n; ++ii) {
    auto i = static_cast<std::size_t>(ii);
    obj += Interval(point.prices[i]) * Interval::log(point.prices[i] / point.beta[i]);
  }
  for (int id = 0; id < market.arc_count(); ++id) {
    const Rational& y = point.spending[static_cast<std::size_t>(id)];
    if (y != 0) obj -= Interval(y) * Interval::log(market.arc(id).utility);
  }
  if (!obj.contains(tau_sum)) {
    ok = false;
    note(r.gap, std::max(obj.distance_to(tau_sum), std::numeric_limits<double>::min()), -1);
  }
  r.passed = ok;
  return r;
}

DualCertificate to_double(const ExactDualCertificate& cert) {
  DualCertificate out;
  for (const auto& v : cert.exp_delta) out.delta.push_back(std::log(v.get_d()));
  for (const auto& v : cert.exp_gamma) out.gamma.push_back(std::log(v.get_d()));
  for (const auto& v : cert.w) out.w.push_back(v.get_d());
  for (const auto& v : cert.tau) out.tau.push_back(v.get_d());
  return out;
}

bool verify_cpj(const Equilibrium& eq, const Market& market, double tol) {
  check_sizes(eq.prices.size(), eq.allocation.size(), market);
  std::vector<double> u = agent_values(eq.allocation, market);
  std::vector<double> in = inflow(eq.allocation, market);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    if (eq.allocation[static_cast<std::size_t>(id)] < -tol) return false;
    if (!(u[i] > 0.0)) return false;
    double lhs = std::log(eq.prices[i]) - std::log(eq.prices[j]);
    if (lhs > std::log(u[i]) - std::log(market.weight(id)) + tol) return false;
  }
  for (double s : in)
    if (std::abs(s - 1.0) > tol) return false;
  return true;
}

bool verify_cpj(const ExactEquilibrium& eq, const Market& market) {
  check_sizes(eq.prices.size(), eq.allocation.size(), market);
  std::vector<Rational> u = agent_values(eq.allocation, market);
  std::vector<Rational> in = inflow(eq.allocation, market);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    if (eq.allocation[static_cast<std::size_t>(id)] < 0 || u[i] <= 0) return false;
    // q_i - q_j <= log U_i - log u_ij  <=>  u_ij p_i <= U_i p_j
    if (a.utility * eq.prices[i] > u[i] * eq.prices[j]) return false;
  }
  return std::all_of(in.begin(), in.end(), [](const Rational& s) { return s == 1; });
}

bool cpc_feasible(const CornetPoint& point, const Market& market, double tol) {
  check_sizes(point.q.size(), point.x.size(), market);
  std::vector<double> u = agent_values(point.x, market);
  std::vector<double> in = inflow(point.x, market);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    if (point.x[static_cast<std::size_t>(id)] < -tol) return false;
    double bound = u[i] - market.weight(id) * std::exp(point.q[i] - point.q[j]);
    if (point.t > bound + tol * std::max(1.0, u[i])) return false;
  }
  return std::all_of(in.begin(), in.end(), [tol](double s) { return s <= 1.0 + tol; });
}

bool verify_cpc(const Equilibrium& eq, const Market& market, double tol) {
  check_sizes(eq.prices.size(), eq.allocation.size(), market);
  CornetPoint point;
  point.x = eq.allocation;
  for (double p : eq.prices) point.q.push_back(std::log(p));
  return cpc_feasible(point, market, tol);
}

bool verify_cpc(const ExactEquilibrium& eq, const Market& market) {
  check_sizes(eq.prices.size(), eq.allocation.size(), market);
  std::vector<Rational> u = agent_values(eq.allocation, market);
  std::vector<Rational> in = inflow(eq.allocation, market);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    if (eq.allocation[static_cast<std::size_t>(id)] < 0) return false;
    // 0 <= U_i - u_ij p_i / p_j
    if (a.utility * eq.prices[i] > u[i] * eq.prices[j]) return false;
  }
  return std::all_of(in.begin(), in.end(), [](const Rational& s) { return s <= 1; });
}

DualCertificate cpd_from_cpc(const CornetPoint& point) {
  DualCertificate cert;
  cert.delta = point.q;
  cert.gamma.assign(point.q.size(), 0.0);
  cert.w = point.x;
  cert.tau.assign(point.q.size(), point.t);
  return cert;
}

CpdReport verify_cpd(const DualCertificate& cert, const Market& market, double tol) {
  check_sizes(cert.delta.size(), cert.w.size(), market);
  check_sizes(cert.tau.size(), cert.w.size(), market);
  CpdReport r;
  std::vector<double> into = inflow(cert.w, market);
  std::vector<double> value = agent_values(cert.w, market);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    r.max_violation = std::max(r.max_violation, -cert.w[static_cast<std::size_t>(id)]);
    if (!(value[i] > 0.0)) {
      r.max_violation = std::numeric_limits<double>::infinity();
      continue;
    }
    double lhs = cert.delta[i] - cert.delta[j] + cert.tau[i];
    double rhs = 1.0 - into[i] + std::log(value[i]) - std::log(market.weight(id));
    r.max_violation = std::max(r.max_violation, lhs - rhs);
  }
  for (double t : cert.tau) {
    r.max_violation = std::max(r.max_violation, -t);
    r.objective += t;
  }
  r.feasible = r.max_violation <= tol;
  return r;
}

CpdReport verify_cpd(const ExactDualCertificate& cert, const Market& market) {
  check_sizes(cert.exp_delta.size(), cert.w.size(), market);
  check_sizes(cert.tau.size(), cert.w.size(), market);
  CpdReport r;
  auto violate = [&r](double amount) {
    r.feasible = false;
    r.max_violation = std::max(r.max_violation, std::max(amount, std::numeric_limits<double>::min()));
  };
  for (const auto& d : cert.exp_delta)
    if (d <= 0) {
      violate(std::numeric_limits<double>::infinity());
      return r;
    }
  std::vector<Rational> into = inflow(cert.w, market);
  std::vector<Rational> value = agent_values(cert.w, market);
  for (int id = 0; id < market.arc_count(); ++id) {
    const Arc& a = market.arc(id);
    auto i = static_cast<std::size_t>(a.from), j = static_cast<std::size_t>(a.to);
    if (cert.w[static_cast<std::size_t>(id)] < 0) violate(-cert.w[static_cast<std::size_t>(id)].get_d());
    if (value[i] <= 0) {
      violate(std::numeric_limits<double>::infinity());
      continue;
    }
    // log(ratio) <= c with ratio = e^{delta_i - delta_j} u_ij / W_i
    Rational ratio = cert.exp_delta[i] * a.utility / (cert.exp_delta[j] * value[i]);
    Rational c = 1 - into[i] - cert.tau[i];
    if (c == 0) {
      if (ratio > 1) violate(std::log(ratio.get_d()));
      continue;
    }
    Interval lhs = Interval::log(ratio);
    Interval rhs(c);
    if (!lhs.certainly_below(rhs)) violate(std::max(0.0, std::log(ratio.get_d()) - c.get_d()));
  }
  Rational total = 0;
  for (const auto& t : cert.tau) {
    if (t < 0) violate(-t.get_d());
    total += t;
  }
  r.objective = total.get_d();
  return r;
}

}  // namespace adeq
