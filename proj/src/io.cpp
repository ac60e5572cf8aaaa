#include "adeq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "adeq/errors.hpp"

namespace adeq::io {
namespace {

std::size_t idx(int v) { return static_cast<std::size_t>(v); }

const json& field(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

int parse_count(const json& doc, const char* key, int minimum) {
  const json& v = field(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < minimum)
    throw ParseError(std::string("field '") + key + "' must be an integer >= " + std::to_string(minimum));
  return static_cast<int>(v.get<long long>());
}

std::vector<std::vector<Rational>> parse_matrix(const json& doc, const char* key, int rows, int cols) {
  const json& m = field(doc, key);
  if (!m.is_array() || static_cast<int>(m.size()) != rows)
    throw ParseError(std::string("'") + key + "' must have " + std::to_string(rows) + " rows");
  std::vector<std::vector<Rational>> out(idx(rows));
  for (int r = 0; r < rows; ++r) {
    const json& row = m[idx(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ParseError(std::string("row ") + std::to_string(r) + " of '" + key + "' must have " +
                       std::to_string(cols) + " entries");
    for (const json& v : row) out[idx(r)].push_back(parse_number(v));
  }
  return out;
}

json matrix_json(const std::vector<std::vector<Rational>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) {
      if (v.get_den() == 1 && v.get_num().fits_slong_p())
        r.push_back(v.get_num().get_si());
      else
        r.push_back(to_string(v));
    }
    out.push_back(std::move(r));
  }
  return out;
}

template <class T>
json value_json(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) return exact_json(v);
  else return json(v);
}

template <class T>
json vector_json(const std::vector<T>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(value_json(v));
  return out;
}

template <class T>
json arc_list(const std::vector<T>& values, const Market& market, const char* a, const char* b, const char* key) {
  json out = json::array();
  for (int id = 0; id < market.arc_count(); ++id) {
    const T& v = values[idx(id)];
    if (v == T(0)) continue;
    out.push_back({{a, market.arc(id).from}, {b, market.arc(id).to}, {key, value_json(v)}});
  }
  return out;
}

template <class Family>
json family_json(const Family& f) {
  return {{"violation", f.violation}, {"where", f.where}};
}

json kkt_family(const KKTReport::Family& f) { return {{"residual", f.residual}, {"where", f.where}}; }

template <class T>
T convert(const Rational& v) {
  if constexpr (std::is_same_v<T, Rational>) return v;
  else return v.get_d();
}

template <class T>
BasicEquilibrium<T> parse_eq(const json& doc, const Market& market) {
  const json& prices = field(doc, "prices");
  const json& allocations = field(doc, "allocations");
  if (!prices.is_array() || !allocations.is_array()) throw ParseError("prices and allocations must be arrays");
  if (static_cast<int>(prices.size()) != market.agents())
    throw VerificationFailed("equilibrium has " + std::to_string(prices.size()) + " prices for " +
                             std::to_string(market.agents()) + " agents");
  std::vector<T> p;
  for (const json& v : prices) p.push_back(convert<T>(parse_number(v)));
  std::vector<T> x(idx(market.arc_count()), T(0));
  for (const json& entry : allocations) {
    int agent = field(entry, "agent").get<int>();
    int good = field(entry, "good").get<int>();
    T amount = convert<T>(parse_number(field(entry, "x")));
    if (agent < 0 || agent >= market.agents() || good < 0 || good >= market.agents())
      throw VerificationFailed("allocation index out of range");
    auto id = market.find_arc(agent, good);
    if (!id) {
      if (amount == T(0)) continue;
      throw VerificationFailed("allocation on " + std::to_string(agent) + "->" + std::to_string(good) +
                               ", which is not an arc of the market");
    }
    x[idx(*id)] += amount;
  }
  return make_equilibrium(market, std::move(p), std::move(x));
}

template <class T>
json eq_json(const BasicEquilibrium<T>& eq, const Market& market) {
  return {{"prices", vector_json(eq.prices)},
          {"allocations", arc_list(eq.allocation, market, "agent", "good", "x")},
          {"utilities", vector_json(eq.utilities)},
          {"exact", BasicEquilibrium<T>::exact}};
}

template <class T>
json point_json(const BasicCPPoint<T>& point, const Market& market) {
  return {{"prices", vector_json(point.prices)},
          {"beta", vector_json(point.beta)},
          {"spending", arc_list(point.spending, market, "from", "to", "y")}};
}

template <class T>
json general_eq_json(const BasicGeneralEquilibrium<T>& eq) {
  json allocations = json::array();
  for (std::size_t i = 0; i < eq.allocation.size(); ++i)
    for (std::size_t j = 0; j < eq.allocation[i].size(); ++j)
      for (std::size_t g = 0; g < eq.allocation[i][j].size(); ++g)
        if (eq.allocation[i][j][g] != T(0))
          allocations.push_back({{"buyer", i}, {"seller", j}, {"good", g}, {"x", value_json(eq.allocation[i][j][g])}});
  return {{"prices", vector_json(eq.prices)},
          {"allocations", std::move(allocations)},
          {"exact", std::is_same_v<T, Rational>}};
}

}  // namespace

Rational parse_number(const json& value) {
  if (value.is_number_integer()) {
    if (value.is_number_unsigned()) return Rational(Integer(std::to_string(value.get<unsigned long long>())));
    return Rational(Integer(std::to_string(value.get<long long>())));
  }
  if (value.is_number_float()) {
    double d = value.get<double>();
    if (!std::isfinite(d)) throw ParseError("non-finite number");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  }
  if (value.is_string()) return parse_rational(value.get<std::string>());
  throw ParseError("expected a number or a rational string, got " + value.dump());
}

json exact_json(const Rational& value) { return to_string(value); }

InstanceDocument parse_instance(const json& doc) {
  if (!doc.is_object()) throw ParseError("instance must be a JSON object");
  std::string kind = doc.value("kind", std::string("bijective"));
  InstanceDocument out;
  if (kind == "bijective") {
    int n = parse_count(doc, "agents", 1);
    auto u = parse_matrix(doc, "utilities", n, n);
    try {
      out.market = Market::from_matrix(u);
    } catch (const ValidationError& e) {
      throw ParseError(e.what());
    }
  } else if (kind == "general") {
    GeneralMarket gm;
    gm.agents = parse_count(doc, "agents", 1);
    gm.goods = parse_count(doc, "goods", 1);
    gm.utilities = parse_matrix(doc, "utilities", gm.agents, gm.goods);
    gm.endowments = parse_matrix(doc, "endowments", gm.agents, gm.goods);
    out.market = std::move(gm);
  } else {
    throw ParseError("unknown instance kind '" + kind + "'");
  }
  if (doc.contains("name") && doc["name"].is_string()) out.name = doc["name"].get<std::string>();
  if (doc.contains("seed") && doc["seed"].is_number_unsigned()) out.seed = doc["seed"].get<std::uint64_t>();
  return out;
}

json to_json(const Market& market) {
  return {{"kind", "bijective"}, {"agents", market.agents()}, {"utilities", matrix_json(market.to_matrix())}};
}

json to_json(const GeneralMarket& market) {
  return {{"kind", "general"},
          {"agents", market.agents},
          {"goods", market.goods},
          {"utilities", matrix_json(market.utilities)},
          {"endowments", matrix_json(market.endowments)}};
}

json to_json(const InstanceDocument& doc) {
  json out = std::visit([](const auto& m) { return to_json(m); }, doc.market);
  if (doc.name) out["name"] = *doc.name;
  if (doc.seed) out["seed"] = *doc.seed;
  return out;
}

Market parse_market(const json& doc) {
  InstanceDocument d = parse_instance(doc);
  if (d.is_general()) throw ParseError("expected a bijective instance");
  return std::get<Market>(d.market);
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

json to_json(const FeasibilityVerdict& verdict) {
  json out = {{"feasible", verdict.feasible}, {"witness_set", verdict.witness_set}};
  out["witness_node"] = verdict.witness_node ? json(*verdict.witness_node) : json(nullptr);
  return out;
}

json to_json(const ValidationReport& report) { return {{"ok", report.ok()}, {"violations", report.violations}}; }

json to_json(const FeasibilityReport& r) {
  return {{"feasible", r.feasible},
          {"exact", r.exact},
          {"column_balance", family_json(r.column_balance)},
          {"row_balance", family_json(r.row_balance)},
          {"bang_per_buck", family_json(r.bang_per_buck)},
          {"price_floor", family_json(r.price_floor)},
          {"nonnegativity", family_json(r.nonnegativity)}};
}

json to_json(const VerificationReport& r) {
  return {{"passed", r.passed},
          {"exact", r.exact},
          {"clearing", family_json(r.clearing)},
          {"budget", family_json(r.budget)},
          {"bang_per_buck", family_json(r.bang_per_buck)},
          {"positivity", family_json(r.positivity)}};
}

json to_json(const KKTReport& r) {
  return {{"passed", r.passed},
          {"exact", r.exact},
          {"kkt1", kkt_family(r.kkt1)},
          {"kkt1_slack", kkt_family(r.kkt1_slack)},
          {"kkt2", kkt_family(r.kkt2)},
          {"kkt3", kkt_family(r.kkt3)},
          {"kkt3b", kkt_family(r.kkt3b)},
          {"complementary", kkt_family(r.complementary)},
          {"sign", kkt_family(r.sign)},
          {"gap", kkt_family(r.gap)}};
}

json to_json(const CpdReport& r) {
  return {{"feasible", r.feasible}, {"max_violation", r.max_violation}, {"objective", r.objective}};
}

json to_json(const SolveReport& r) {
  return {{"reason", to_string(r.reason)},
          {"iterations", r.iterations},
          {"barrier_rounds", r.barrier_rounds},
          {"objective", r.objective},
          {"max_violation", r.max_violation},
          {"kkt_residual", r.kkt_residual},
          {"duality_measure", r.duality_measure},
          {"polished", r.polished},
          {"wall_seconds", r.wall_seconds}};
}

json to_json(const CPPoint& point, const Market& market) { return point_json(point, market); }
json to_json(const RationalPoint& point, const Market& market) { return point_json(point, market); }

json to_json(const Equilibrium& eq, const Market& market) { return eq_json(eq, market); }
json to_json(const ExactEquilibrium& eq, const Market& market) { return eq_json(eq, market); }

CPPoint parse_point(const json& doc, const Market& market) {
  const json& prices = field(doc, "prices");
  if (!prices.is_array() || static_cast<int>(prices.size()) != market.agents())
    throw VerificationFailed("point has the wrong number of prices");
  CPPoint point;
  for (const json& v : prices) point.prices.push_back(parse_number(v).get_d());
  if (doc.contains("beta")) {
    for (const json& v : doc.at("beta")) point.beta.push_back(parse_number(v).get_d());
    if (static_cast<int>(point.beta.size()) != market.agents()) throw ParseError("beta has the wrong length");
  } else {
    point.beta = eliminate_beta(point.prices, market);
  }
  point.spending.assign(idx(market.arc_count()), 0.0);
  for (const json& entry : field(doc, "spending")) {
    int from = field(entry, "from").get<int>();
    int to = field(entry, "to").get<int>();
    if (from < 0 || from >= market.agents() || to < 0 || to >= market.agents())
      throw VerificationFailed("spending index out of range");
    auto id = market.find_arc(from, to);
    if (!id) throw VerificationFailed("spending on " + std::to_string(from) + "->" + std::to_string(to) +
                                      ", which is not an arc of the market");
    point.spending[idx(*id)] += parse_number(field(entry, "y")).get_d();
  }
  return point;
}

Equilibrium parse_equilibrium(const json& doc, const Market& market) { return parse_eq<double>(doc, market); }

ExactEquilibrium parse_exact_equilibrium(const json& doc, const Market& market) {
  return parse_eq<Rational>(doc, market);
}

json to_json(const RationalSolution& s, const Market& market) {
  json out = point_json(s.point, market);
  out["equilibrium"] = eq_json(s.equilibrium, market);
  out["denominators"] = {{"price", s.max_price_denominator.get_str()},
                         {"spending", s.max_spending_denominator.get_str()},
                         {"allocation", s.max_allocation_denominator.get_str()}};
  return out;
}

json to_json(const DualCertificate& cert, const Market& market) {
  return {{"delta", cert.delta},
          {"gamma", cert.gamma},
          {"w", arc_list(cert.w, market, "from", "to", "w")},
          {"tau", cert.tau},
          {"exact", false}};
}

json to_json(const ExactDualCertificate& cert, const Market& market) {
  DualCertificate approx = to_double(cert);
  return {{"delta", approx.delta},
          {"gamma", approx.gamma},
          {"exp_delta", vector_json(cert.exp_delta)},
          {"exp_gamma", vector_json(cert.exp_gamma)},
          {"w", arc_list(cert.w, market, "from", "to", "w")},
          {"tau", vector_json(cert.tau)},
          {"exact", true}};
}

json to_json(const BackMap& bm) {
  json nodes = json::array();
  for (const auto& node : bm.nodes)
    nodes.push_back({{"agent", node.agent}, {"good", node.good}, {"quantity", exact_json(node.quantity)}});
  json arcs = json::array();
  for (const auto& [from, to] : bm.arcs) arcs.push_back({from, to});
  return {{"agents", bm.agents}, {"goods", bm.goods}, {"nodes", std::move(nodes)}, {"arcs", std::move(arcs)}};
}

BackMap parse_back_map(const json& doc) {
  BackMap bm;
  bm.agents = parse_count(doc, "agents", 1);
  bm.goods = parse_count(doc, "goods", 1);
  for (const json& node : field(doc, "nodes"))
    bm.nodes.push_back({field(node, "agent").get<int>(), field(node, "good").get<int>(),
                        parse_number(field(node, "quantity"))});
  for (const json& arc : field(doc, "arcs")) {
    if (!arc.is_array() || arc.size() != 2) throw ParseError("back-map arcs must be [buyer, lot] pairs");
    bm.arcs.emplace_back(arc[0].get<int>(), arc[1].get<int>());
  }
  return bm;
}

json to_json(const GeneralEquilibrium& eq) { return general_eq_json(eq); }
json to_json(const ExactGeneralEquilibrium& eq) { return general_eq_json(eq); }

}  // namespace adeq::io
