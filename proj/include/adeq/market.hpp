#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adeq/rational.hpp"

namespace adeq {

/// Agent `from` values the good owned by agent `to` at `utility` > 0.
struct Arc {
  int from = 0;
  int to = 0;
  Rational utility;

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Bijective linear exchange market: agent i owns one unit of good i.
///
/// Arcs are stored sorted by (from, to); arc ids index that order and are
/// used by every per-arc vector in the library. Zero-utility pairs are not
/// arcs. Structural problems (bad indices, negative utilities, duplicates)
/// throw ValidationError; the standing in/out-arc assumption is checked by
/// validate() instead so that such markets can still be inspected.
class Market {
 public:
  Market() = default;
  Market(int agents, std::vector<Arc> arcs);

  /// Builds from a dense n x n utility matrix; zero entries are not arcs.
  static Market from_matrix(const std::vector<std::vector<Rational>>& utilities);

  int agents() const { return agents_; }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  std::span<const Arc> arcs() const { return arcs_; }
  const Arc& arc(int id) const { return arcs_[static_cast<std::size_t>(id)]; }

  /// Utility of an arc as a double, for the numeric solver.
  double weight(int id) const { return weights_[static_cast<std::size_t>(id)]; }

  std::span<const int> out_arcs(int agent) const { return out_[static_cast<std::size_t>(agent)]; }
  std::span<const int> in_arcs(int agent) const { return in_[static_cast<std::size_t>(agent)]; }

  std::optional<int> find_arc(int from, int to) const;
  bool has_loop(int agent) const { return find_arc(agent, agent).has_value(); }

  /// Largest utility as a rational.
  Rational max_utility() const;
  bool has_integer_utilities() const;

  std::vector<std::vector<Rational>> to_matrix() const;

  friend bool operator==(const Market& a, const Market& b) {
    return a.agents_ == b.agents_ && a.arcs_ == b.arcs_;
  }

 private:
  int agents_ = 0;
  std::vector<Arc> arcs_;
  std::vector<double> weights_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks n >= 1 and that every agent has an incoming and an outgoing arc.
ValidationReport validate(const Market& market);

/// Exchange market with an arbitrary set of goods and endowments.
struct GeneralMarket {
  int agents = 0;
  int goods = 0;
  std::vector<std::vector<Rational>> utilities;   // agents x goods, >= 0
  std::vector<std::vector<Rational>> endowments;  // agents x goods, >= 0

  friend bool operator==(const GeneralMarket&, const GeneralMarket&) = default;
};

ValidationReport validate(const GeneralMarket& market);

struct ScaledMarket {
  Market market;
  /// Positive per-agent multipliers applied to each utility row.
  std::vector<Rational> factors;
};

/// Clears the denominators of each agent's utility row separately.
ScaledMarket scale_to_integer_utilities(const Market& market);

}  // namespace adeq
