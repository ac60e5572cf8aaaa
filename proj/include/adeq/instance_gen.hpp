#pragma once

#include <cstdint>
#include <string>

#include "adeq/market.hpp"

namespace adeq {

enum class FeasibilityMode { ForceStar, Raw };

/// Parses "force-star" / "raw"; throws ParseError.
FeasibilityMode parse_feasibility_mode(const std::string& text);
const char* to_string(FeasibilityMode mode);

struct GenSpec {
  int agents = 3;
  double density = 0.3;  // in [0, 1]
  int max_utility = 10;
  std::uint64_t seed = 0;
  FeasibilityMode mode = FeasibilityMode::ForceStar;
};

/// Stream discipline: one mt19937_64 seeded with `seed`; for each ordered
/// pair (i, j) in row-major order draw a presence word, then a utility word,
/// whether or not the arc is kept. Presence is (word >> 11) * 2^-53 < density;
/// utility is 1 + word % max_utility. ForceStar adds the cycle
/// 0 -> 1 -> ... -> n-1 -> 0 (a loop when n = 1) with the pair's drawn
/// utility, which makes the market strongly connected. Throws DomainError
/// for agents < 1, max_utility < 1 or density outside [0, 1].
Market generate(const GenSpec& spec);

struct GeneralGenSpec {
  int agents = 3;
  int goods = 3;
  double density = 0.5;
  int max_utility = 5;
  int max_endowment = 3;
  std::uint64_t seed = 0;
};

/// Random general market. Utilities use the same per-pair stream as generate
/// over (agent, good); each agent then gets one guaranteed positive utility.
/// Endowments are drawn per (agent, good) in [0, max_endowment], after which
/// good g is given to agent g mod agents if nobody holds it and every agent
/// without goods receives one unit of good i mod goods. Every utility is
/// positive when density = 1.
GeneralMarket generate_general(const GeneralGenSpec& spec);

}  // namespace adeq
