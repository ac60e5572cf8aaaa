#include <gtest/gtest.h>

#include <sstream>

#include "adeq/io.hpp"
#include "cli.hpp"
#include "support.hpp"

using adeq::io::json;

namespace {

struct CliRun {
  int code;
  json out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = adeq::cli::run_cli(args, out, err);
  json doc;
  try {
    doc = json::parse(out.str());
  } catch (const json::exception&) {
    doc = out.str();
  }
  return {code, doc, err.str()};
}

constexpr const char* kW = R"({"kind":"bijective","agents":2,"utilities":[[0,1],[1,4]]})";
constexpr const char* kPair = R"({"kind":"bijective","agents":2,"utilities":[[0,1],[0,1]]})";
constexpr const char* kTwoCycle = R"({"agents":2,"utilities":[[0,1],[1,0]]})";

}  // namespace

TEST(CliCheck, Examples) {
  adeq::testing::TempDir dir;
  CliRun bad = run({"check", dir.write("pair.json", kPair)});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(bad.out["star"]["witness_node"], 0);
  EXPECT_FALSE(bad.out["super_self_sufficiency"]["feasible"].get<bool>());
  EXPECT_NE(bad.err.find("infeasible"), std::string::npos);

  CliRun ok = run({"check", dir.write("two.json", kTwoCycle)});
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(ok.out["feasible"].get<bool>());

  CliRun broken = run({"check", dir.write("broken.json", "{\"agents\": ")});
  EXPECT_EQ(broken.code, 1);
  EXPECT_EQ(run({"check", dir.file("missing.json")}).code, 1);
}

TEST(CliSolve, WorkedInstanceExact) {
  adeq::testing::TempDir dir;
  CliRun r = run({"solve", dir.write("w.json", kW), "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out["equilibrium"]["prices"], json::array({"1", "4"}));
  EXPECT_TRUE(r.out["certificate"]["residuals"]["passed"].get<bool>());
  EXPECT_EQ(r.out["report"]["reason"], "Converged");
  EXPECT_TRUE(r.out.contains("rational"));
}

TEST(CliSolve, FailurePaths) {
  adeq::testing::TempDir dir;
  EXPECT_EQ(run({"solve", dir.write("pair.json", kPair)}).code, 2);
  CliRun stuck = run({"solve", dir.write("w.json", kW), "--tol", "1e-20", "--max-iter", "1"});
  EXPECT_EQ(stuck.code, 3);
  EXPECT_EQ(stuck.out["report"]["reason"], "IterationLimit");
  EXPECT_EQ(run({"solve", dir.file("w.json"), "--max-iter", "0"}).code, 1);
  EXPECT_EQ(run({"solve"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliSolve, BatchWithJobs) {
  adeq::testing::TempDir dir;
  std::string batch = std::string("[") + kW + "," + kTwoCycle + "," + kPair + "]";
  CliRun r = run({"solve", dir.write("batch.json", batch), "--jobs", "2"});
  ASSERT_TRUE(r.out.is_array());
  ASSERT_EQ(r.out.size(), 3u);
  EXPECT_EQ(r.out[0]["exit_code"], 0);
  EXPECT_EQ(r.out[2]["exit_code"], 2);
  EXPECT_EQ(r.code, 2);
}

TEST(CliSolve, GeneralInstance) {
  adeq::testing::TempDir dir;
  std::string g = R"({"kind":"general","agents":2,"goods":1,"utilities":[[1],[1]],"endowments":[[1],[2]]})";
  CliRun r = run({"solve", dir.write("g.json", g), "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out["verification"]["passed"].get<bool>());
}

// Every solve output is accepted by verify on the same instance.
TEST(CliVerify, AcceptsSolveOutput) {
  adeq::testing::TempDir dir;
  std::string w = dir.write("w.json", kW);
  for (bool exact : {false, true}) {
    std::vector<std::string> args{"solve", w};
    if (exact) args.push_back("--exact");
    CliRun s = run(args);
    ASSERT_EQ(s.code, 0);
    std::string sol = dir.write("sol.json", s.out.dump());
    std::vector<std::string> vargs{"verify", w, sol};
    if (exact) vargs.push_back("--exact");
    CliRun v = run(vargs);
    EXPECT_EQ(v.code, 0) << v.err;
    for (const char* family : {"embedding", "kkt", "cpj", "cpc", "cpd"}) EXPECT_TRUE(v.out.contains(family));
  }
}

TEST(CliVerify, OracleSolutionExact) {
  adeq::testing::TempDir dir;
  std::string w = dir.write("w.json", kW);
  CliRun o = run({"oracle", w});
  ASSERT_EQ(o.code, 0);
  ASSERT_EQ(o.out.size(), 1u);
  CliRun v = run({"verify", w, dir.write("eq.json", o.out[0].dump()), "--exact"});
  EXPECT_EQ(v.code, 0);
  EXPECT_TRUE(v.out["passed"].get<bool>());
  EXPECT_TRUE(v.out["kkt"]["passed"].get<bool>());
}

TEST(CliVerify, TamperedAndForeignSolutions) {
  adeq::testing::TempDir dir;
  std::string w = dir.write("w.json", kW);
  json eq = run({"oracle", w}).out[0];
  eq["prices"][1] = "5";
  CliRun v = run({"verify", w, dir.write("t.json", eq.dump()), "--exact"});
  EXPECT_EQ(v.code, 4);
  EXPECT_GT(v.out["equilibrium"]["budget"]["violation"].get<double>(), 0.0);
  EXPECT_NE(v.err.find("budget"), std::string::npos);

  json good = run({"oracle", w}).out[0];
  std::string other = dir.write("c3.json", R"({"agents":3,"utilities":[[0,1,0],[0,0,1],[1,0,0]]})");
  EXPECT_EQ(run({"verify", other, dir.write("g.json", good.dump())}).code, 4);
}

TEST(CliRationalize, FromSolveOutput) {
  adeq::testing::TempDir dir;
  std::string w = dir.write("w.json", kW);
  CliRun s = run({"solve", w});
  CliRun r = run({"rationalize", w, dir.write("s.json", s.out.dump()), "--sparsify"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out["prices"], json::array({"1", "4"}));
  EXPECT_TRUE(r.out.contains("sparse_equilibrium"));
}

TEST(CliOracle, Examples) {
  adeq::testing::TempDir dir;
  CliRun w = run({"oracle", dir.write("w.json", kW), "--jobs", "1"});
  EXPECT_EQ(w.code, 0);
  EXPECT_EQ(w.out.size(), 1u);
  EXPECT_EQ(run({"oracle", dir.write("pair.json", kPair)}).code, 2);
  CliRun big = run({"oracle", dir.write("big.json", R"({"agents":5,"utilities":[[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1],[1,0,0,0,0]]})")});
  EXPECT_EQ(big.code, 1);
  EXPECT_EQ(big.out["error"], "size-limit");
}

TEST(CliGen, ThreeCycle) {
  adeq::testing::TempDir dir;
  CliRun r = run({"gen", "--agents", "3", "--density", "0", "--seed", "7", "-o", dir.file("g.json")});
  ASSERT_EQ(r.code, 0);
  adeq::Market m = adeq::io::parse_market(r.out);
  EXPECT_EQ(m.arc_count(), 3);
  EXPECT_EQ(adeq::io::parse_market(adeq::io::read_file(dir.file("g.json"))), m);
  EXPECT_EQ(run({"gen", "--mode", "sideways"}).code, 1);
  CliRun g = run({"gen", "--general", "--agents", "2", "--goods", "3"});
  EXPECT_EQ(g.out["kind"], "general");
}

TEST(CliReduce, BijectiveGeneralFileIsUnchanged) {
  adeq::testing::TempDir dir;
  std::string g = R"({"kind":"general","agents":2,"goods":2,"utilities":[[0,1],[1,4]],"endowments":[[1,0],[0,1]]})";
  CliRun r = run({"reduce", dir.write("g.json", g), "-o", dir.file("m.json"), "--back-map", dir.file("b.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(adeq::io::parse_market(r.out["market"]), adeq::testing::market_w());
  EXPECT_EQ(adeq::io::parse_market(adeq::io::read_file(dir.file("m.json"))), adeq::testing::market_w());
  EXPECT_EQ(adeq::io::parse_back_map(adeq::io::read_file(dir.file("b.json"))).nodes.size(), 2u);
}
