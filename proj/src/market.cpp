#include "adeq/market.hpp"

#include <algorithm>
#include <string>

#include "adeq/errors.hpp"

namespace adeq {

Market::Market(int agents, std::vector<Arc> arcs) : agents_(agents) {
  if (agents < 0) throw ValidationError("negative agent count");
  std::erase_if(arcs, [](const Arc& a) { return a.utility == 0; });
  for (const Arc& a : arcs) {
    if (a.from < 0 || a.from >= agents || a.to < 0 || a.to >= agents)
      throw ValidationError("arc (" + std::to_string(a.from) + "," + std::to_string(a.to) +
                            ") out of range");
    if (a.utility < 0)
      throw ValidationError("negative utility on arc (" + std::to_string(a.from) + "," +
                            std::to_string(a.to) + ")");
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
    return a.from != b.from ? a.from < b.from : a.to < b.to;
  });
  for (std::size_t k = 1; k < arcs.size(); ++k)
    if (arcs[k].from == arcs[k - 1].from && arcs[k].to == arcs[k - 1].to)
      throw ValidationError("duplicate arc (" + std::to_string(arcs[k].from) + "," +
                            std::to_string(arcs[k].to) + ")");
  arcs_ = std::move(arcs);
  weights_.reserve(arcs_.size());
  out_.assign(static_cast<std::size_t>(agents_), {});
  in_.assign(static_cast<std::size_t>(agents_), {});
  for (std::size_t id = 0; id < arcs_.size(); ++id) {
    weights_.push_back(arcs_[id].utility.get_d());
    out_[static_cast<std::size_t>(arcs_[id].from)].push_back(static_cast<int>(id));
    in_[static_cast<std::size_t>(arcs_[id].to)].push_back(static_cast<int>(id));
  }
}

Market Market::from_matrix(const std::vector<std::vector<Rational>>& utilities) {
  const int n = static_cast<int>(utilities.size());
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i) {
    const auto& row = utilities[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != n)
      throw ValidationError("utility matrix row " + std::to_string(i) + " has " +
                            std::to_string(row.size()) + " entries, expected " +
                            std::to_string(n));
    for (int j = 0; j < n; ++j)
      if (row[static_cast<std::size_t>(j)] != 0)
        arcs.push_back({i, j, row[static_cast<std::size_t>(j)]});
  }
  return Market(n, std::move(arcs));
}

std::optional<int> Market::find_arc(int from, int to) const {
  if (from < 0 || from >= agents_) return std::nullopt;
  for (int id : out_arcs(from))
    if (arcs_[static_cast<std::size_t>(id)].to == to) return id;
  return std::nullopt;
}

Rational Market::max_utility() const {
  Rational best = 0;
  for (const Arc& a : arcs_) best = std::max(best, a.utility);
  return best;
}

bool Market::has_integer_utilities() const {
  return std::all_of(arcs_.begin(), arcs_.end(),
                     [](const Arc& a) { return a.utility.get_den() == 1; });
}

std::vector<std::vector<Rational>> Market::to_matrix() const {
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(agents_),
                                       std::vector<Rational>(static_cast<std::size_t>(agents_)));
  for (const Arc& a : arcs_)
    m[static_cast<std::size_t>(a.from)][static_cast<std::size_t>(a.to)] = a.utility;
  return m;
}

ValidationReport validate(const Market& market) {
  ValidationReport report;
  if (market.agents() < 1) report.violations.push_back("market has no agents");
  for (int i = 0; i < market.agents(); ++i) {
    if (market.out_arcs(i).empty())
      report.violations.push_back("agent " + std::to_string(i) + " has no outgoing arc");
    if (market.in_arcs(i).empty())
      report.violations.push_back("agent " + std::to_string(i) + " has no incoming arc");
  }
  return report;
}

ValidationReport validate(const GeneralMarket& m) {
  ValidationReport report;
  auto shape_ok = [&](const std::vector<std::vector<Rational>>& table, const char* name) {
    if (static_cast<int>(table.size()) != m.agents) {
      report.violations.push_back(std::string(name) + " has wrong number of rows");
      return false;
    }
    for (const auto& row : table)
      if (static_cast<int>(row.size()) != m.goods) {
        report.violations.push_back(std::string(name) + " has a row of wrong length");
        return false;
      }
    return true;
  };
  if (m.agents < 1) report.violations.push_back("market has no agents");
  if (m.goods < 1) report.violations.push_back("market has no goods");
  if (!shape_ok(m.utilities, "utilities") || !shape_ok(m.endowments, "endowments")) return report;

  for (int i = 0; i < m.agents; ++i) {
    Rational held = 0, valued = 0;
    for (int g = 0; g < m.goods; ++g) {
      const Rational& u = m.utilities[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)];
      const Rational& w = m.endowments[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)];
      if (u < 0)
        report.violations.push_back("negative utility for agent " + std::to_string(i) +
                                    ", good " + std::to_string(g));
      if (w < 0)
        report.violations.push_back("negative endowment for agent " + std::to_string(i) +
                                    ", good " + std::to_string(g));
      held += w;
      valued += u;
    }
    if (held <= 0) report.violations.push_back("agent " + std::to_string(i) + " holds no good");
    if (valued <= 0)
      report.violations.push_back("agent " + std::to_string(i) + " values no good");
  }
  for (int g = 0; g < m.goods; ++g) {
    Rational total = 0;
    for (int i = 0; i < m.agents; ++i)
      total += m.endowments[static_cast<std::size_t>(i)][static_cast<std::size_t>(g)];
    if (total <= 0)
      report.violations.push_back("good " + std::to_string(g) + " has zero total endowment");
  }
  return report;
}

ScaledMarket scale_to_integer_utilities(const Market& market) {
  const int n = market.agents();
  std::vector<Rational> factors(static_cast<std::size_t>(n), Rational(1));
  for (int i = 0; i < n; ++i) {
    Integer den = 1;
    for (int id : market.out_arcs(i)) den = lcm(den, market.arc(id).utility.get_den());
    factors[static_cast<std::size_t>(i)] = Rational(den);
  }
  std::vector<Arc> arcs(market.arcs().begin(), market.arcs().end());
  for (Arc& a : arcs) {
    a.utility *= factors[static_cast<std::size_t>(a.from)];
    a.utility.canonicalize();
  }
  return {Market(n, std::move(arcs)), std::move(factors)};
}

}  // namespace adeq
