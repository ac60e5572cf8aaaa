#include "adeq/instance_gen.hpp"

#include <random>

#include "adeq/errors.hpp"

namespace adeq {

FeasibilityMode parse_feasibility_mode(const std::string& text) {
  if (text == "force-star") return FeasibilityMode::ForceStar;
  if (text == "raw") return FeasibilityMode::Raw;
  throw ParseError("unknown feasibility mode '" + text + "' (expected force-star or raw)");
}

const char* to_string(FeasibilityMode mode) {
  return mode == FeasibilityMode::ForceStar ? "force-star" : "raw";
}

namespace {

double unit_interval(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

std::uint64_t bounded(std::uint64_t word, int bound) { return 1 + word % static_cast<std::uint64_t>(bound); }

}  // namespace

Market generate(const GenSpec& spec) {
  if (spec.agents < 1) throw DomainError("agents must be at least 1");
  if (spec.max_utility < 1) throw DomainError("max_utility must be at least 1");
  if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw DomainError("density must lie in [0, 1]");
  std::mt19937_64 rng(spec.seed);
  const int n = spec.agents;
  std::vector<Arc> arcs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double presence = unit_interval(rng());
      auto utility = static_cast<long>(bounded(rng(), spec.max_utility));
      bool planted = spec.mode == FeasibilityMode::ForceStar && j == (i + 1) % n;
      if (planted || presence < spec.density) arcs.push_back({i, j, Rational(utility)});
    }
  return Market(n, std::move(arcs));
}

GeneralMarket generate_general(const GeneralGenSpec& spec) {
  if (spec.agents < 1 || spec.goods < 1) throw DomainError("agents and goods must be at least 1");
  if (spec.max_utility < 1 || spec.max_endowment < 1) throw DomainError("maxima must be at least 1");
  if (!(spec.density >= 0.0 && spec.density <= 1.0)) throw DomainError("density must lie in [0, 1]");
  std::mt19937_64 rng(spec.seed);
  const auto na = static_cast<std::size_t>(spec.agents);
  const auto ng = static_cast<std::size_t>(spec.goods);
  GeneralMarket m;
  m.agents = spec.agents;
  m.goods = spec.goods;
  m.utilities.assign(na, std::vector<Rational>(ng, Rational(0)));
  m.endowments.assign(na, std::vector<Rational>(ng, Rational(0)));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t g = 0; g < ng; ++g) {
      double presence = unit_interval(rng());
      auto utility = static_cast<long>(bounded(rng(), spec.max_utility));
      if (presence < spec.density) m.utilities[i][g] = utility;
    }
    std::size_t favourite = static_cast<std::size_t>(rng() % ng);
    if (m.utilities[i][favourite] == 0) m.utilities[i][favourite] = static_cast<long>(bounded(rng(), spec.max_utility));
  }
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t g = 0; g < ng; ++g)
      m.endowments[i][g] = static_cast<long>(rng() % static_cast<std::uint64_t>(spec.max_endowment + 1));
  for (std::size_t g = 0; g < ng; ++g) {
    bool held = false;
    for (std::size_t i = 0; i < na; ++i) held = held || m.endowments[i][g] > 0;
    if (!held) m.endowments[g % na][g] = 1;
  }
  for (std::size_t i = 0; i < na; ++i) {
    bool holds = false;
    for (std::size_t g = 0; g < ng; ++g) holds = holds || m.endowments[i][g] > 0;
    if (!holds) m.endowments[i][i % ng] = 1;
  }
  return m;
}

}  // namespace adeq
