#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "adeq/equilibrium.hpp"
#include "adeq/market.hpp"
#include "adeq/rational.hpp"

namespace adeq::testing {

inline Market matrix(const std::vector<std::vector<int>>& u) {
  std::vector<std::vector<Rational>> q;
  for (const auto& row : u) q.emplace_back(row.begin(), row.end());
  return Market::from_matrix(q);
}

// u_01 = 1, u_10 = 1, u_11 = 4. Arc ids: 0 = (0,1), 1 = (1,0), 2 = (1,1).
inline Market market_w() { return matrix({{0, 1}, {1, 4}}); }
inline Market two_cycle() { return matrix({{0, 1}, {1, 0}}); }
inline Market uniform_2x2() { return matrix({{1, 1}, {1, 1}}); }
inline Market infeasible_pair() { return matrix({{0, 1}, {0, 1}}); }

inline Rational q(const char* text) { return parse_rational(text); }

// Equilibrium of W found by support enumeration, frozen.
inline ExactEquilibrium equilibrium_w() {
  return make_equilibrium<Rational>(market_w(), {1, 4}, {q("1/4"), 1, q("3/4")});
}

inline RationalPoint point_w() {
  RationalPoint p;
  p.prices = {1, 4};
  p.beta = {4, 1};
  p.spending = {1, 1, 3};
  return p;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("adeq_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string write(const std::string& name, const std::string& text) const {
    auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace adeq::testing
