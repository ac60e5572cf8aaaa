#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "adeq/cp_solver.hpp"
#include "adeq/duality.hpp"
#include "adeq/equilibrium.hpp"
#include "adeq/graph.hpp"
#include "adeq/market.hpp"
#include "adeq/rationalize.hpp"
#include "adeq/reduction.hpp"

namespace adeq::io {

using nlohmann::json;

struct InstanceDocument {
  std::variant<Market, GeneralMarket> market;
  std::optional<std::string> name;
  std::optional<std::uint64_t> seed;

  bool is_general() const { return std::holds_alternative<GeneralMarket>(market); }
};

/// Accepts integers, finite JSON numbers (read through their shortest
/// round-trip decimal, so 0.1 is 1/10), and strings holding "p/q" or a
/// decimal. Throws ParseError.
Rational parse_number(const json& value);

/// "p/q", or "p" for integers.
json exact_json(const Rational& value);

InstanceDocument parse_instance(const json& doc);
json to_json(const InstanceDocument& doc);
json to_json(const Market& market);
json to_json(const GeneralMarket& market);

/// Bijective markets only; throws ParseError for general documents.
Market parse_market(const json& doc);

json read_file(const std::string& path);
void write_file(const std::string& path, const json& doc);

json to_json(const FeasibilityVerdict& verdict);
json to_json(const ValidationReport& report);
json to_json(const FeasibilityReport& report);
json to_json(const VerificationReport& report);
json to_json(const KKTReport& report);
json to_json(const CpdReport& report);
json to_json(const SolveReport& report);

json to_json(const CPPoint& point, const Market& market);
json to_json(const RationalPoint& point, const Market& market);

/// Reads {"prices", "beta", "spending"}; beta defaults to eliminate_beta.
CPPoint parse_point(const json& doc, const Market& market);

json to_json(const Equilibrium& eq, const Market& market);
json to_json(const ExactEquilibrium& eq, const Market& market);

/// Reads {"prices", "allocations"}; utilities are recomputed. Strings are
/// accepted in the numeric flavour too.
Equilibrium parse_equilibrium(const json& doc, const Market& market);
ExactEquilibrium parse_exact_equilibrium(const json& doc, const Market& market);

json to_json(const RationalSolution& solution, const Market& market);

json to_json(const DualCertificate& cert, const Market& market);
json to_json(const ExactDualCertificate& cert, const Market& market);

json to_json(const BackMap& back_map);
BackMap parse_back_map(const json& doc);

json to_json(const GeneralEquilibrium& eq);
json to_json(const ExactGeneralEquilibrium& eq);

}  // namespace adeq::io
