#pragma once

#include <vector>

#include "adeq/cp_point.hpp"
#include "adeq/equilibrium.hpp"
#include "adeq/market.hpp"
#include "adeq/rational.hpp"

namespace adeq {

/// Lagrange multipliers of the flow-type program: delta (column balance) and
/// gamma (row balance) in log space, w per arc id for u_ij beta_i <= p_j, tau
/// per agent for p_i >= 1.
struct DualCertificate {
  std::vector<double> delta;
  std::vector<double> gamma;
  std::vector<double> w;
  std::vector<double> tau;
};

/// Exact certificate with the log-space multipliers stored through their
/// exponentials: delta_i = log exp_delta_i, gamma_i = log exp_gamma_i.
struct ExactDualCertificate {
  std::vector<Rational> exp_delta;
  std::vector<Rational> exp_gamma;
  std::vector<Rational> w;
  std::vector<Rational> tau;
};

struct KKTReport {
  struct Family {
    double residual = 0.0;
    int where = -1;  // arc id or agent
  };
  Family kkt1;           // -delta_j + gamma_i <= -log u_ij
  Family kkt1_slack;     // y_ij (delta_j - gamma_i - log u_ij) = 0
  Family kkt2;           // delta_i - gamma_i + sum_j w_ji + tau_i = log(p_i/beta_i) + 1
  Family kkt3;           // sum_j u_ij w_ij = p_i / beta_i
  Family kkt3b;          // p_i = sum_j p_j w_ij
  Family complementary;  // tau_i (p_i - 1) = 0, w_ij (p_j - u_ij beta_i) = 0
  Family sign;           // w, tau >= 0
  Family gap;            // objective = sum_i tau_i
  bool passed = true;
  bool exact = false;

  double max_residual() const;
};

/// delta = log p, gamma = log beta, w = x, tau = 0 for the min-price-1
/// normalization of eq. Throws VerificationFailed if eq does not verify at tol.
DualCertificate self_dual_certificate(const Equilibrium& eq, const Market& market, double tol = 1e-8);
ExactDualCertificate self_dual_certificate(const ExactEquilibrium& eq, const Market& market);

/// Residuals are absolute; the check is residual <= tol * max(1, max_i p_i)
/// for every family.
KKTReport verify_kkt(const CPPoint& point, const DualCertificate& cert, const Market& market, double tol);

/// Exact check. Log terms cancel symbolically except in the gap identity,
/// whose objective is enclosed in a 128-bit interval.
KKTReport verify_kkt(const RationalPoint& point, const ExactDualCertificate& cert, const Market& market);

DualCertificate to_double(const ExactDualCertificate& cert);

/// With q = log p: q_i - q_j <= log(U_i) - log u_ij on every arc and every
/// good fully sold.
bool verify_cpj(const Equilibrium& eq, const Market& market, double tol);
bool verify_cpj(const ExactEquilibrium& eq, const Market& market);

/// Point (t, x, q) of the max-t program whose optimum t = 0 characterizes
/// equilibria with p = exp(q).
struct CornetPoint {
  double t = 0.0;
  std::vector<double> x;  // per arc id
  std::vector<double> q;  // per agent
};

/// t <= U_i - u_ij exp(q_i - q_j) on every arc, sum_j x_ji <= 1, x >= 0.
bool cpc_feasible(const CornetPoint& point, const Market& market, double tol);

/// The point built from eq with t = 0 and q = log p is feasible.
bool verify_cpc(const Equilibrium& eq, const Market& market, double tol);
bool verify_cpc(const ExactEquilibrium& eq, const Market& market);

/// delta = q, w = x, tau_i = t.
DualCertificate cpd_from_cpc(const CornetPoint& point);

struct CpdReport {
  bool feasible = true;
  double max_violation = 0.0;
  double objective = 0.0;  // sum_i tau_i
};

/// delta_i - delta_j + tau_i <= 1 - sum_k w_ki + log(sum_k u_ik w_ik) - log u_ij
/// on every arc, w >= 0, tau >= 0.
CpdReport verify_cpd(const DualCertificate& cert, const Market& market, double tol);

/// Exact flavour: arcs whose right-hand constant 1 - sum_k w_ki - tau_i is
/// zero reduce to a rational comparison; the rest are decided by 128-bit
/// interval arithmetic and count as violated when undecided.
CpdReport verify_cpd(const ExactDualCertificate& cert, const Market& market);

}  // namespace adeq
