#include "cdsp/solver.h"

#include <cmath>
#include <random>
#include <sstream>

#include "cdsp/network.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cdsp {
namespace {

using ::cdsp::testing::test_adapter;

MipModel model_of(const Instance& inst) { return build_model(build_multigraph(inst), inst); }

SolveLimits quick(double seconds = 60) {
  SolveLimits limits;
  limits.time_limit_seconds = seconds;
  limits.threads = 1;
  return limits;
}

ExternalSolverAdapter shell_adapter(const std::string& script, double grace = 120) {
  ExternalSolverAdapter::Options options;
  options.command = {"/bin/sh", "-c", script, "sh", "{model}", "{solution}"};
  options.grace_seconds = grace;
  return ExternalSolverAdapter(options);
}

TEST(SolveTest, Tiny2IsOptimalAtTwenty) {
  const SolveOutcome out = solve(model_of(testing::tiny2()), quick(), &test_adapter());
  ASSERT_EQ(out.status, SolveStatus::kOptimal) << out.diagnostic;
  ASSERT_TRUE(out.objective.has_value());
  EXPECT_NEAR(*out.objective, 20, 1e-6);
  EXPECT_NEAR(*out.bound, 20, 1e-6);
  EXPECT_EQ(out.values.size(), 18u);
}

TEST(SolveTest, LpFileRouteAgrees) {
  std::mt19937_64 rng(5);
  const Instance inst =
      testing::random_instance(rng, {.n = 4, .fleet = 2, .shift_cap_probability = 0});
  const MipModel m = model_of(inst);
  const SolveOutcome mps = solve(m, quick(), &test_adapter());
  ASSERT_EQ(mps.status, SolveStatus::kOptimal) << mps.diagnostic;
  const SolveOutcome lp_out = solve(m, quick(), &testing::lp_adapter());
  ASSERT_EQ(lp_out.status, SolveStatus::kOptimal) << lp_out.diagnostic;
  EXPECT_NEAR(*mps.objective, *lp_out.objective, 1e-6);
}

TEST(SolveTest, ExplicitRowsGiveSameOptimum) {
  const Instance inst = testing::tiny2();
  ModelOptions options;
  options.explicit_rows = true;
  const SolveOutcome out =
      solve(build_model(build_multigraph(inst), inst, options), quick(), &test_adapter());
  ASSERT_EQ(out.status, SolveStatus::kOptimal) << out.diagnostic;
  EXPECT_NEAR(*out.objective, 20, 1e-6);
}

TEST(SolveTest, InfeasibleModel) {
  // Both requests must be collected at time 10 by one vehicle.
  RawInstance raw = testing::tiny2_raw();
  raw.rows[1].ready = 10;
  raw.rows[2].ready = 10;
  InstanceConfig cfg;
  cfg.fleet_size = 1;
  const SolveOutcome out = solve(model_of(build_instance(raw, cfg)), quick(), &test_adapter());
  EXPECT_EQ(out.status, SolveStatus::kInfeasible) << out.diagnostic;
  EXPECT_FALSE(out.has_incumbent());
}

TEST(SolveTest, TinyTimeLimitNeverClaimsOptimality) {
  std::mt19937_64 rng(9);
  const Instance inst = testing::random_instance(rng, {.n = 100, .fleet = 25});
  const SolveOutcome out = solve(model_of(inst), quick(0.001), &test_adapter());
  EXPECT_TRUE(out.status == SolveStatus::kNoSolutionTimeLimit ||
              out.status == SolveStatus::kFeasibleTimeLimit)
      << to_string(out.status) << ": " << out.diagnostic;
}

TEST(SolveTest, RejectsBadConfiguration) {
  const MipModel m = model_of(testing::tiny2());
  EXPECT_THROW(solve(m, quick(), nullptr), ConfigurationError);
  EXPECT_THROW(solve(m, quick(0), &test_adapter()), ConfigurationError);
  SolveLimits threads = quick();
  threads.threads = 0;
  EXPECT_THROW(solve(m, threads, &test_adapter()), ConfigurationError);
  SolveLimits gap = quick();
  gap.gap_target = -1;
  EXPECT_THROW(solve(m, gap, &test_adapter()), ConfigurationError);
  EXPECT_THROW(ExternalSolverAdapter(ExternalSolverAdapter::Options{}), ConfigurationError);
}

TEST(ExternalSolverTest, MissingBinaryIsAnError) {
  ExternalSolverAdapter::Options options;
  options.command = {"/nonexistent/solver", "{model}"};
  const ExternalSolverAdapter adapter(options);
  const SolveOutcome out = solve(model_of(testing::tiny2()), quick(), &adapter);
  EXPECT_EQ(out.status, SolveStatus::kError);
  EXPECT_NE(out.diagnostic.find("/nonexistent/solver"), std::string::npos) << out.diagnostic;
}

TEST(ExternalSolverTest, NoSolutionFileIsAnError) {
  const auto adapter = shell_adapter("echo boom; exit 3");
  const SolveOutcome out = solve(model_of(testing::tiny2()), quick(), &adapter);
  EXPECT_EQ(out.status, SolveStatus::kError);
  EXPECT_NE(out.diagnostic.find("code 3"), std::string::npos) << out.diagnostic;
  EXPECT_NE(out.diagnostic.find("boom"), std::string::npos) << out.diagnostic;
}

TEST(ExternalSolverTest, HungSolverIsKilled) {
  const auto adapter = shell_adapter("sleep 30", 0.2);
  const SolveOutcome out = solve(model_of(testing::tiny2()), quick(0.1), &adapter);
  EXPECT_EQ(out.status, SolveStatus::kNoSolutionTimeLimit);
  EXPECT_LT(out.wall_seconds, 10);
}

TEST(ExternalSolverTest, ReadsIncumbentWrittenByScript) {
  const auto adapter = shell_adapter(
      "printf 'status feasible-time-limit\\nobjective 25\\nbound 20\\nvalues 1\\nC_1 12\\n' > \"$2\"");
  const MipModel m = model_of(testing::tiny2());
  const SolveOutcome out = solve(m, quick(), &adapter);
  ASSERT_EQ(out.status, SolveStatus::kFeasibleTimeLimit) << out.diagnostic;
  EXPECT_EQ(out.objective, 25);
  EXPECT_EQ(out.bound, 20);
  EXPECT_EQ(out.values[m.completion_column(1)], 12);
}

TEST(ReadSolutionFileTest, ParsesAllFields) {
  const MipModel m = model_of(testing::tiny2());
  std::istringstream in(
      "# cdsp-solution v1\nstatus optimal\nobjective 20\nseconds 0.5\nmessage all good\n"
      "values 2\nx_0 1\nz_2 10\n");
  const SolveOutcome out = read_solution_file(in, m);
  EXPECT_EQ(out.status, SolveStatus::kOptimal);
  EXPECT_EQ(out.objective, 20);
  EXPECT_EQ(out.bound, 20);
  EXPECT_EQ(out.diagnostic, "all good");
  EXPECT_EQ(out.values[m.x_column(0)], 1);
  EXPECT_EQ(out.values[m.z_column(2)], 10);
}

TEST(ReadSolutionFileTest, RejectsBadContent) {
  const MipModel m = model_of(testing::tiny2());
  auto read = [&](const std::string& text) {
    std::istringstream in(text);
    return read_solution_file(in, m);
  };
  EXPECT_THROW(read("objective 3\n"), DecodeError);
  EXPECT_THROW(read("status happy\n"), DecodeError);
  EXPECT_THROW(read("status optimal\nvalues 1\nw_9 1\n"), DecodeError);
  EXPECT_THROW(read("status optimal\nvalues 2\nx_0 1\n"), DecodeError);
  EXPECT_THROW(read("status optimal\nvalues 1\nx_0 one\n"), DecodeError);
  EXPECT_EQ(read("status infeasible\nvalues 0\n").status, SolveStatus::kInfeasible);
}

TEST(GapTest, Convention) {
  EXPECT_EQ(gap_percent(100.0, 90.0), 10.0);
  EXPECT_EQ(gap_percent(20.0, 20.0), 0.0);
  EXPECT_FALSE(gap_percent(20.0, std::nullopt).has_value());
  EXPECT_FALSE(gap_percent(std::nullopt, 3.0).has_value());
  EXPECT_EQ(gap_percent(0.0, 0.0), 0.0);
}

TEST(SolveStatusTest, NamesRoundTrip) {
  for (auto s : {SolveStatus::kOptimal, SolveStatus::kFeasibleTimeLimit, SolveStatus::kInfeasible,
                 SolveStatus::kNoSolutionTimeLimit, SolveStatus::kError}) {
    EXPECT_EQ(parse_solve_status(to_string(s)), s);
  }
  EXPECT_EQ(split_command("  a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
}

}  // namespace
}  // namespace cdsp
