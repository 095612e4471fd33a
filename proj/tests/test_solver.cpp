#include <gtest/gtest.h>

#include <random>

#include "stochbench/errors.hpp"
#include "stochbench/lp_format.hpp"
#include "stochbench/solver.hpp"
#include "test_support.hpp"

using namespace stochbench;

TEST(SolveLp, HandExamples) {
  auto m = parse_lp("Minimize\n obj: x + y\nSubject To\n c1: x + y >= 2\nEnd\n");
  auto s = solve_lp(m);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective, 2.0, 1e-9);

  auto u = solve_lp(parse_lp("Minimize\n obj: - x\nSubject To\nEnd\n"));
  EXPECT_EQ(u.status, SolveStatus::unbounded);

  auto inf = solve_lp(parse_lp("Minimize\n obj: x\nSubject To\n a: x <= 1\n b: x >= 2\nEnd\n"));
  EXPECT_EQ(inf.status, SolveStatus::infeasible);
}

TEST(SolveLp, FreeAndNegativeBounds) {
  auto m = parse_lp(
      "Maximize\n obj: x - y\nSubject To\n c1: x + y = 1\n c2: x - 2 y <= 4\n"
      "Bounds\n x free\n -3 <= y <= 5\nEnd\n");
  auto s = solve_lp(m);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.values["x"], 2.0, 1e-9);
  EXPECT_NEAR(s.values["y"], -1.0, 1e-9);
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(SolveLp, RedundantEqualities) {
  auto m = parse_lp(
      "Minimize\n obj: x + 2 y\nSubject To\n a: x + y = 3\n b: 2 x + 2 y = 6\n c: x <= 2\nEnd\n");
  auto s = solve_lp(m);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective, 4.0, 1e-9);
}

TEST(SolveLp, RejectsIntegerModels) {
  auto m = parse_lp("Minimize\n obj: x\nSubject To\n c: x >= 1.5\nGenerals\n x\nEnd\n");
  EXPECT_THROW(solve_lp(m), ValidationError);
}

TEST(SolveLp, ObjectiveMatchesValues) {
  std::mt19937_64 rng(11);
  testutil::RandomModelOptions opt;
  opt.allow_integers = false;
  for (int t = 0; t < 200; ++t) {
    auto m = testutil::random_model(rng, opt);
    auto s = solve_lp(m);
    if (s.status != SolveStatus::optimal) continue;
    EXPECT_NEAR(m.objective.expr.evaluate(s.values), s.objective, 1e-9);
    EXPECT_LE(max_violation(m, s.values), 1e-6);
  }
}

TEST(SolveLp, MatchesVertexEnumeration) {
  std::mt19937_64 rng(2024);
  testutil::RandomModelOptions opt;
  opt.allow_integers = false;
  int optimal = 0;
  for (int t = 0; t < 300; ++t) {
    auto m = testutil::random_model(rng, opt);
    auto oracle = testutil::lp_oracle(m);
    auto s = solve_lp(m);
    ASSERT_EQ(s.status, oracle.status) << emit_lp(m);
    if (s.status == SolveStatus::optimal) {
      ++optimal;
      EXPECT_NEAR(s.objective, oracle.objective, 1e-6 * std::max(1.0, std::abs(oracle.objective))) << emit_lp(m);
    }
  }
  EXPECT_GT(optimal, 50);
}

TEST(SolveMip, HandExamples) {
  auto s = solve_mip(parse_lp("Minimize\n obj: x\nSubject To\n c: x >= 1.5\nGenerals\n x\nEnd\n"));
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_EQ(s.objective, 2.0);

  auto k = solve_mip(parse_lp("Maximize\n obj: 3 a + 2 b\nSubject To\n c: a + b <= 1\nBinaries\n a b\nEnd\n"));
  ASSERT_EQ(k.status, SolveStatus::optimal);
  EXPECT_EQ(k.objective, 3.0);
  EXPECT_EQ(k.values["a"], 1.0);
  EXPECT_EQ(k.values["b"], 0.0);
}

TEST(SolveMip, ContinuousModelIsSolveLp) {
  std::mt19937_64 rng(5);
  testutil::RandomModelOptions opt;
  opt.allow_integers = false;
  for (int t = 0; t < 100; ++t) {
    auto m = testutil::random_model(rng, opt);
    EXPECT_EQ(solve_mip(m), solve_lp(m));
  }
}

TEST(SolveMip, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(77);
  int optimal = 0;
  for (int t = 0; t < 150; ++t) {
    auto m = testutil::random_binary_model(rng);
    auto oracle = testutil::binary_oracle(m);
    auto s = solve_mip(m);
    ASSERT_EQ(s.status, oracle.status) << emit_lp(m);
    if (s.status == SolveStatus::optimal) {
      ++optimal;
      EXPECT_EQ(s.objective, oracle.objective) << emit_lp(m);
      EXPECT_EQ(max_violation(m, s.values), 0.0);
    }
  }
  EXPECT_GT(optimal, 30);
}

TEST(SolveMip, NodeLimitKeepsIncumbent) {
  auto m = parse_lp(
      "Maximize\n obj: 5 a + 4 b + 3 c + 7 d\nSubject To\n w: 2 a + 3 b + 4 c + 5 d <= 7.5\n"
      "Binaries\n a b c d\nEnd\n");
  auto s = solve_mip(m, 1);
  EXPECT_EQ(s.status, SolveStatus::node_limit);
  auto full = solve_mip(m);
  ASSERT_EQ(full.status, SolveStatus::optimal);
  EXPECT_EQ(full.objective, 12.0);
}

TEST(SolveStatusText, ParsesNamesAndCodes) {
  EXPECT_EQ(parse_status("OPTIMAL"), SolveStatus::optimal);
  EXPECT_EQ(parse_status("2"), SolveStatus::optimal);
  EXPECT_EQ(parse_status("3"), SolveStatus::infeasible);
  EXPECT_EQ(parse_status("5"), SolveStatus::unbounded);
  EXPECT_EQ(parse_status("weird"), std::nullopt);
  EXPECT_EQ(to_string(SolveStatus::node_limit), "node_limit");
}
