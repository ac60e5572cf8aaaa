#include "cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <sstream>

#include "adeq/cp_solver.hpp"
#include "adeq/duality.hpp"
#include "adeq/errors.hpp"
#include "adeq/graph.hpp"
#include "adeq/instance_gen.hpp"
#include "adeq/io.hpp"
#include "adeq/oracle.hpp"
#include "adeq/rationalize.hpp"
#include "adeq/reduction.hpp"

namespace adeq::cli {
namespace {

using io::json;

struct Outcome {
  int code = kSuccess;
  json doc;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 500;
  double pmax = 1e9;
  double verify_tol = 1e-6;
  bool exact = false;
};

GeneralMarket as_general(const Market& m) {
  GeneralMarket g;
  g.agents = g.goods = m.agents();
  const auto n = static_cast<std::size_t>(m.agents());
  g.utilities = m.to_matrix();
  g.endowments.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) g.endowments[i][i] = 1;
  return g;
}

std::string describe(const FeasibilityVerdict& v) {
  std::ostringstream s;
  s << "agent " << *v.witness_node << " cannot keep a positive price; forced set {";
  for (std::size_t k = 0; k < v.witness_set.size(); ++k) s << (k ? "," : "") << v.witness_set[k];
  s << "}";
  return s.str();
}

// Both verdicts; the exhaustive one only where the subset count is small.
json feasibility_json(const Market& m, bool& feasible) {
  json doc;
  doc["agents"] = m.agents();
  doc["validation"] = io::to_json(validate(m));
  FeasibilityVerdict star = check_star_condition(m);
  doc["star"] = io::to_json(star);
  if (m.agents() <= kExhaustiveSubsetCap)
    doc["super_self_sufficiency"] =
        io::to_json(check_super_self_sufficiency(m, SelfSufficiencyMode::Exhaustive));
  else
    doc["super_self_sufficiency"] = nullptr;
  feasible = star.feasible;
  doc["feasible"] = feasible;
  return doc;
}

void attach_certificate(json& doc, const json& cert, const KKTReport& kkt) {
  doc["certificate"] = cert;
  doc["certificate"]["residuals"] = io::to_json(kkt);
}

Outcome solve_bijective(const Market& m, const SolveOptions& opt, std::ostream& err) {
  Outcome o;
  FeasibilityVerdict star = check_star_condition(m);
  if (!star.feasible) {
    o.doc["feasibility"] = io::to_json(star);
    err << "infeasible: " << describe(star) << '\n';
    o.code = kInfeasible;
    return o;
  }
  SolverConfig cfg;
  cfg.tolerance = opt.tol;
  cfg.max_iterations = opt.max_iter;
  cfg.price_cap = opt.pmax;
  SolveResult r = solve(m, cfg);
  o.doc["report"] = io::to_json(r.report);
  o.doc["solution"] = io::to_json(r.point, m);
  o.doc["solution"]["objective"] = r.report.objective;
  if (!r.converged()) {
    err << "solver stopped: " << to_string(r.report.reason) << " after " << r.report.iterations
        << " Newton steps (objective " << r.report.objective << ", violation " << r.report.max_violation << ")\n";
    o.code = kNotConverged;
    return o;
  }
  Equilibrium eq = extract_equilibrium(r.point, m, opt.tol);
  VerificationReport vr = verify_equilibrium(eq, m, opt.verify_tol);
  o.doc["equilibrium"] = io::to_json(eq, m);
  o.doc["verification"] = io::to_json(vr);
  if (!vr.passed) {
    err << "extracted prices do not verify (worst violation " << vr.max_violation() << ")\n";
    o.code = kVerification;
    return o;
  }
  DualCertificate cert = self_dual_certificate(eq, m, opt.verify_tol);
  KKTReport kkt = verify_kkt(embed_equilibrium(eq, m, opt.verify_tol), cert, m, opt.verify_tol);
  attach_certificate(o.doc, io::to_json(cert, m), kkt);
  if (!kkt.passed) {
    err << "self-dual certificate fails the KKT check (residual " << kkt.max_residual() << ")\n";
    o.code = kVerification;
    return o;
  }
  if (opt.exact) {
    RationalSolution rs = rationalize(r.point, m);
    VerificationReport evr = verify_equilibrium(rs.equilibrium, m);
    ExactDualCertificate ecert = self_dual_certificate(rs.equilibrium, m);
    KKTReport ekkt = verify_kkt(rs.point, ecert, m);
    o.doc["rational"] = io::to_json(rs, m);
    o.doc["equilibrium"] = io::to_json(rs.equilibrium, m);
    o.doc["verification"] = io::to_json(evr);
    attach_certificate(o.doc, io::to_json(ecert, m), ekkt);
    if (!evr.passed || !ekkt.passed) {
      err << "rational solution failed exact verification\n";
      o.code = kVerification;
    }
  }
  return o;
}

Outcome solve_general(const GeneralMarket& gm, const SolveOptions& opt, std::ostream& err) {
  Reduction red = reduce_to_bijective(gm);
  Outcome o = solve_bijective(red.market, opt, err);
  json reduced = std::move(o.doc);
  o.doc = json::object();
  o.doc["reduced"] = std::move(reduced);
  o.doc["reduced"]["market"] = io::to_json(red.market);
  o.doc["back_map"] = io::to_json(red.back_map);
  if (o.code != kSuccess) return o;
  VerificationReport vr;
  if (opt.exact) {
    auto eq = io::parse_exact_equilibrium(o.doc["reduced"]["equilibrium"], red.market);
    ExactGeneralEquilibrium ge = aggregate_back(eq, red.back_map);
    vr = verify_general_equilibrium(ge, gm);
    o.doc["equilibrium"] = io::to_json(ge);
  } else {
    auto eq = io::parse_equilibrium(o.doc["reduced"]["equilibrium"], red.market);
    GeneralEquilibrium ge = aggregate_back(eq, red.back_map, opt.verify_tol);
    vr = verify_general_equilibrium(ge, gm, opt.verify_tol);
    o.doc["equilibrium"] = io::to_json(ge);
  }
  o.doc["verification"] = io::to_json(vr);
  if (!vr.passed) {
    err << "aggregated equilibrium does not verify on the general market\n";
    o.code = kVerification;
  }
  return o;
}

Outcome solve_document(const io::InstanceDocument& d, const SolveOptions& opt, std::ostream& err) {
  Outcome o = d.is_general() ? solve_general(std::get<GeneralMarket>(d.market), opt, err)
                             : solve_bijective(std::get<Market>(d.market), opt, err);
  if (d.name) o.doc["instance"] = *d.name;
  return o;
}

// Maps library exceptions to exit codes and an error document.
template <class F>
Outcome guarded(F&& body, std::ostream& err) {
  auto fail = [&](int code, const char* kind, const std::exception& e) {
    err << kind << ": " << e.what() << '\n';
    Outcome o;
    o.code = code;
    o.doc = {{"error", kind}, {"message", e.what()}};
    return o;
  };
  try {
    return body();
  } catch (const ParseError& e) {
    return fail(kUsage, "parse", e);
  } catch (const IoError& e) {
    return fail(kUsage, "io", e);
  } catch (const SizeLimit& e) {
    return fail(kUsage, "size-limit", e);
  } catch (const DomainError& e) {
    return fail(kUsage, "domain", e);
  } catch (const ValidationError& e) {
    return fail(kInfeasible, "invalid-market", e);
  } catch (const InfeasibleMarket& e) {
    return fail(kInfeasible, "infeasible", e);
  } catch (const NotOptimal& e) {
    return fail(kNotConverged, "not-optimal", e);
  } catch (const VerificationFailed& e) {
    return fail(kVerification, "verification", e);
  } catch (const RoundingFailed& e) {
    return fail(kVerification, "rounding", e);
  } catch (const AggregationMismatch& e) {
    return fail(kVerification, "aggregation", e);
  } catch (const InconsistentTightSet& e) {
    return fail(kVerification, "tight-set", e);
  } catch (const json::exception& e) {
    return fail(kUsage, "parse", e);
  } catch (const std::exception& e) {
    return fail(kUsage, "internal", e);
  }
}

std::vector<io::InstanceDocument> load_instances(const std::vector<std::string>& paths, bool& batch) {
  std::vector<io::InstanceDocument> docs;
  batch = paths.size() > 1;
  for (const auto& path : paths) {
    json doc = io::read_file(path);
    if (doc.is_array()) {
      batch = true;
      for (const json& item : doc) docs.push_back(io::parse_instance(item));
    } else {
      docs.push_back(io::parse_instance(doc));
    }
  }
  return docs;
}

Outcome cmd_check(const std::string& path, std::ostream& err) {
  io::InstanceDocument d = io::parse_instance(io::read_file(path));
  Outcome o;
  Market m;
  if (d.is_general()) {
    m = reduce_to_bijective(std::get<GeneralMarket>(d.market)).market;
    o.doc["reduced"] = true;
  } else {
    m = std::get<Market>(d.market);
  }
  bool feasible = false;
  json verdicts = feasibility_json(m, feasible);
  o.doc.update(verdicts);
  if (!feasible) {
    err << "infeasible: " << describe(check_star_condition(m)) << '\n';
    o.code = kInfeasible;
  }
  return o;
}

Outcome cmd_solve(const std::vector<std::string>& paths, const SolveOptions& opt, int jobs, std::ostream& err) {
  bool batch = false;
  auto docs = load_instances(paths, batch);
  if (docs.empty()) throw ParseError("no instances given");
  if (!batch) return guarded([&] { return solve_document(docs.front(), opt, err); }, err);

  std::vector<Outcome> outcomes(docs.size());
  std::vector<std::string> notes(docs.size());
  const int threads = jobs > 0 ? jobs : 1;
  const auto count = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t k = 0; k < count; ++k) {
    std::ostringstream local;
    outcomes[static_cast<std::size_t>(k)] =
        guarded([&] { return solve_document(docs[static_cast<std::size_t>(k)], opt, local); }, local);
    notes[static_cast<std::size_t>(k)] = local.str();
  }
  Outcome all;
  all.doc = json::array();
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (!notes[k].empty()) err << "[" << k << "] " << notes[k];
    outcomes[k].doc["exit_code"] = outcomes[k].code;
    all.doc.push_back(std::move(outcomes[k].doc));
    all.code = std::max(all.code, outcomes[k].code);
  }
  return all;
}

void name_failures(const VerificationReport& r, std::vector<std::string>& failed) {
  auto add = [&](const char* name, const VerificationReport::Family& f) {
    if (f.violation > 0) failed.push_back(std::string(name) + " (at " + std::to_string(f.where) + ")");
  };
  add("clearing", r.clearing);
  add("budget", r.budget);
  add("bang-per-buck", r.bang_per_buck);
  add("positivity", r.positivity);
}

Outcome cmd_verify(const std::string& instance, const std::string& solution, bool exact, double tol,
                   std::ostream& err) {
  Market m = io::parse_market(io::read_file(instance));
  json sol = io::read_file(solution);
  const json& eqdoc = sol.is_object() && sol.contains("equilibrium") ? sol.at("equilibrium") : sol;
  Outcome o;
  std::vector<std::string> failed;
  bool passed = true;
  auto family = [&](const char* name, bool ok, json detail) {
    o.doc[name] = std::move(detail);
    if (!ok) {
      passed = false;
      failed.push_back(name);
    }
  };
  o.doc["exact"] = exact;
  if (exact) {
    ExactEquilibrium eq = io::parse_exact_equilibrium(eqdoc, m);
    VerificationReport vr = verify_equilibrium(eq, m);
    o.doc["equilibrium"] = io::to_json(vr);
    if (!vr.passed) {
      passed = false;
      name_failures(vr, failed);
    } else {
      RationalPoint pt = embed_equilibrium(eq, m);
      FeasibilityReport fr = is_feasible(pt, m);
      bool zero = objective_is_exactly_zero(pt, m);
      family("embedding", fr.feasible && zero, {{"feasibility", io::to_json(fr)}, {"objective_zero", zero}});
      ExactDualCertificate cert = self_dual_certificate(eq, m);
      KKTReport kkt = verify_kkt(pt, cert, m);
      family("kkt", kkt.passed, io::to_json(kkt));
      bool cpj = verify_cpj(eq, m);
      family("cpj", cpj, cpj);
      bool cpc = verify_cpc(eq, m);
      family("cpc", cpc, cpc);
      CpdReport cpd = verify_cpd(cert, m);
      family("cpd", cpd.feasible && cpd.objective == 0.0, io::to_json(cpd));
    }
  } else {
    Equilibrium eq = io::parse_equilibrium(eqdoc, m);
    VerificationReport vr = verify_equilibrium(eq, m, tol);
    o.doc["equilibrium"] = io::to_json(vr);
    if (!vr.passed) {
      passed = false;
      name_failures(vr, failed);
    } else {
      CPPoint pt = embed_equilibrium(eq, m, tol);
      FeasibilityReport fr = is_feasible(pt, m, tol);
      double obj = objective(pt, m);
      bool zero = std::abs(obj) <= tol * std::max(1.0, *std::max_element(pt.prices.begin(), pt.prices.end()));
      family("embedding", fr.feasible && zero, {{"feasibility", io::to_json(fr)}, {"objective", obj}});
      DualCertificate cert = self_dual_certificate(eq, m, tol);
      KKTReport kkt = verify_kkt(pt, cert, m, tol);
      family("kkt", kkt.passed, io::to_json(kkt));
      bool cpj = verify_cpj(eq, m, tol);
      family("cpj", cpj, cpj);
      bool cpc = verify_cpc(eq, m, tol);
      family("cpc", cpc, cpc);
      CpdReport cpd = verify_cpd(cert, m, tol);
      family("cpd", cpd.feasible && std::abs(cpd.objective) <= tol, io::to_json(cpd));
    }
  }
  o.doc["passed"] = passed;
  if (!passed) {
    err << "verification failed:";
    for (const auto& f : failed) err << ' ' << f;
    err << '\n';
    o.code = kVerification;
  }
  return o;
}

Outcome cmd_rationalize(const std::string& instance, const std::string& solution, bool sparsify, double tol,
                        std::ostream& err) {
  Market m = io::parse_market(io::read_file(instance));
  json sol = io::read_file(solution);
  CPPoint point;
  if (sol.contains("solution")) {
    point = io::parse_point(sol.at("solution"), m);
  } else if (sol.contains("spending")) {
    point = io::parse_point(sol, m);
  } else {
    const json& eqdoc = sol.contains("equilibrium") ? sol.at("equilibrium") : sol;
    point = embed_equilibrium(io::parse_equilibrium(eqdoc, m), m, tol);
  }
  RationalSolution rs = rationalize(point, m);
  Outcome o;
  o.doc = io::to_json(rs, m);
  VerificationReport vr = verify_equilibrium(rs.equilibrium, m);
  o.doc["verification"] = io::to_json(vr);
  if (sparsify) {
    ExactEquilibrium sparse = sparsify_support(rs.equilibrium, m);
    o.doc["sparse_equilibrium"] = io::to_json(sparse, m);
    vr = verify_equilibrium(sparse, m);
  }
  if (!vr.passed) {
    err << "rational solution failed exact verification\n";
    o.code = kVerification;
  }
  return o;
}

Outcome cmd_oracle(const std::string& path, int jobs, std::ostream& err) {
  Market m = io::parse_market(io::read_file(path));
  auto found = jobs == 1 ? oracle_solve(m) : oracle_solve_parallel(m, {}, jobs);
  Outcome o;
  o.doc = json::array();
  for (const auto& s : found) o.doc.push_back(io::to_json(s.equilibrium, m));
  err << found.size() << " equilibri" << (found.size() == 1 ? "um" : "a") << " found\n";
  if (found.empty()) o.code = kInfeasible;
  return o;
}

struct GenOptions {
  GenSpec spec;
  bool general = false;
  int goods = 3;
  int max_endowment = 3;
  std::string mode = "force-star";
  std::string output;
};

Outcome cmd_gen(GenOptions g, std::ostream& err) {
  io::InstanceDocument d;
  d.seed = g.spec.seed;
  if (g.general) {
    GeneralGenSpec spec;
    spec.agents = g.spec.agents;
    spec.goods = g.goods;
    spec.density = g.spec.density;
    spec.max_utility = g.spec.max_utility;
    spec.max_endowment = g.max_endowment;
    spec.seed = g.spec.seed;
    d.market = generate_general(spec);
  } else {
    g.spec.mode = parse_feasibility_mode(g.mode);
    d.market = generate(g.spec);
  }
  Outcome o;
  o.doc = io::to_json(d);
  if (!g.output.empty()) {
    io::write_file(g.output, o.doc);
    err << "wrote " << g.output << '\n';
  }
  return o;
}

Outcome cmd_reduce(const std::string& path, const std::string& output, const std::string& back_map,
                   std::ostream& err) {
  io::InstanceDocument d = io::parse_instance(io::read_file(path));
  GeneralMarket gm = d.is_general() ? std::get<GeneralMarket>(d.market) : as_general(std::get<Market>(d.market));
  Reduction red = reduce_to_bijective(gm);
  Outcome o;
  o.doc["market"] = io::to_json(red.market);
  o.doc["back_map"] = io::to_json(red.back_map);
  if (!output.empty()) io::write_file(output, o.doc["market"]);
  if (!back_map.empty()) io::write_file(back_map, o.doc["back_map"]);
  err << gm.agents << " agents x " << gm.goods << " goods -> " << red.market.agents() << " nodes, "
      << red.market.arc_count() << " arcs\n";
  return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear exchange market equilibria: solve, certify and round to exact rationals", "adeq"};
  app.require_subcommand(1);

  std::string instance, solution;
  std::vector<std::string> instances;
  SolveOptions sopt;
  int jobs = 0;
  bool exact = false, sparsify = false;
  double tol = 1e-6;

  auto* check = app.add_subcommand("check", "Feasibility verdicts with witnesses");
  check->add_option("instance", instance, "Instance file")->required();

  auto* solve_cmd = app.add_subcommand("solve", "Solve, verify and certify; --exact also rounds");
  solve_cmd->add_option("instances", instances, "Instance files (a file may hold an array)")->required();
  solve_cmd->add_option("--tol", sopt.tol, "Solver tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iter", sopt.max_iter, "Newton step limit")->capture_default_str();
  solve_cmd->add_option("--pmax", sopt.pmax, "Cap on max/min price ratio")->capture_default_str();
  solve_cmd->add_option("--verify-tol", sopt.verify_tol, "Tolerance of the numeric checks")->capture_default_str();
  solve_cmd->add_flag("--exact", sopt.exact, "Round to an exact rational equilibrium");
  solve_cmd->add_option("--jobs", jobs, "Threads for batch inputs")->check(CLI::NonNegativeNumber);

  auto* verify_cmd = app.add_subcommand("verify", "Check a solution against every characterization");
  verify_cmd->add_option("instance", instance, "Instance file")->required();
  verify_cmd->add_option("solution", solution, "Equilibrium or solve output")->required();
  verify_cmd->add_flag("--exact", exact, "Exact rational checks");
  verify_cmd->add_option("--tol", tol, "Numeric tolerance")->capture_default_str();

  auto* rat = app.add_subcommand("rationalize", "Round a numeric solution to an exact equilibrium");
  rat->add_option("instance", instance, "Instance file")->required();
  rat->add_option("solution", solution, "Solve output, point or equilibrium")->required();
  rat->add_flag("--sparsify", sparsify, "Also reduce the support to a forest");
  rat->add_option("--tol", tol, "Tolerance for embedding an equilibrium")->capture_default_str();

  auto* oracle = app.add_subcommand("oracle", "All vertex equilibria of a tiny market by support enumeration");
  oracle->add_option("instance", instance, "Instance file")->required();
  oracle->add_option("--jobs", jobs, "Threads; 1 runs the serial enumeration")->check(CLI::NonNegativeNumber);

  GenOptions gen_opt;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--agents", gen_opt.spec.agents, "Number of agents")->capture_default_str();
  gen->add_option("--density", gen_opt.spec.density, "Arc probability")->capture_default_str();
  gen->add_option("--max-utility", gen_opt.spec.max_utility, "Utilities drawn from 1..U")->capture_default_str();
  gen->add_option("--seed", gen_opt.spec.seed, "RNG seed")->capture_default_str();
  gen->add_option("--mode", gen_opt.mode, "force-star or raw")->capture_default_str();
  gen->add_flag("--general", gen_opt.general, "General market with endowments");
  gen->add_option("--goods", gen_opt.goods, "Goods (general only)")->capture_default_str();
  gen->add_option("--max-endowment", gen_opt.max_endowment, "Endowments drawn from 0..W (general only)")
      ->capture_default_str();
  gen->add_option("-o,--output", gen_opt.output, "Write the instance here as well");

  std::string output, back_map;
  auto* reduce = app.add_subcommand("reduce", "Reduce a general market to a bijective one");
  reduce->add_option("instance", instance, "General (or bijective) instance file")->required();
  reduce->add_option("-o,--output", output, "Write the reduced instance here");
  reduce->add_option("--back-map", back_map, "Write the back-map here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  Outcome o = guarded(
      [&]() -> Outcome {
        if (*check) return cmd_check(instance, err);
        if (*solve_cmd) return cmd_solve(instances, sopt, jobs, err);
        if (*verify_cmd) return cmd_verify(instance, solution, exact, tol, err);
        if (*rat) return cmd_rationalize(instance, solution, sparsify, tol, err);
        if (*oracle) return cmd_oracle(instance, jobs, err);
        if (*gen) return cmd_gen(gen_opt, err);
        return cmd_reduce(instance, output, back_map, err);
      },
      err);
  out << o.doc.dump(2) << '\n';
  return o.code;
}

}  // namespace adeq::cli
