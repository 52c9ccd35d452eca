#include "cdsp/formulation.h"

#include <random>
#include <vector>

#include "cdsp/network.h"
#include "cdsp/oracle.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace cdsp {
namespace {

using ::cdsp::testing::RandomOptions;
using ::cdsp::testing::random_instance;
using ::cdsp::testing::tiny2;

double coefficient(const LinearConstraint& row, int column) {
  for (const auto& [col, coef] : row.terms) {
    if (col == column) return coef;
  }
  return 0;
}

TravelMatrix symmetric_travel(int nodes, double depot_leg) {
  TravelMatrix t(static_cast<std::size_t>(nodes));
  for (NodeId j = 1; j < nodes; ++j) {
    t.at(0, j) = depot_leg;
    t.at(j, 0) = depot_leg;
  }
  return t;
}

TEST(BigMTest, VisitConstant) {
  const std::vector<Window> windows = {{0, 100}, {0, 10}, {4, 50}};
  EXPECT_DOUBLE_EQ(big_m_visit(Arc{0, 1, 2, ArcKind::kInter, 5}, windows), 11);
  const std::vector<Window> late = {{0, 100}, {0, 3}, {20, 50}};
  EXPECT_DOUBLE_EQ(big_m_visit(Arc{0, 1, 2, ArcKind::kInter, 1}, late), 0);
  EXPECT_THROW(big_m_visit(Arc{0, 0, 1, ArcKind::kDepotAdjacent, 3}, windows), ContractViolation);
}

TEST(BigMTest, VisitConstantOnTiny2Replenishment) {
  const Multigraph g = build_multigraph(tiny2());
  EXPECT_DOUBLE_EQ(big_m_visit(g.arc(g.replenishment_arc(1, 2)), g.windows()), 13);
}

TEST(BigMTest, CompletionConstant) {
  const std::vector<Window> windows = {{0, 100}, {0, 10}, {0, 0}};
  TravelMatrix t(3);
  t.at(1, 0) = 3;
  EXPECT_DOUBLE_EQ(big_m_completion(1, windows, t), 13);
  EXPECT_DOUBLE_EQ(big_m_completion(2, windows, t), 0);
  const Instance inst = tiny2();
  const Multigraph g = build_multigraph(inst);
  EXPECT_DOUBLE_EQ(big_m_completion(2, g.windows(), inst.travel), 14);
}

TEST(BigMTest, ShiftConstant) {
  const TravelMatrix t = symmetric_travel(3, 3);
  const std::vector<Window> windows = {{0, 100}, {3, 10}, {3, 3}};
  EXPECT_DOUBLE_EQ(big_m_shift(Arc{0, 2, 1, ArcKind::kInter, 1}, windows, t), 7);
  EXPECT_DOUBLE_EQ(big_m_shift(Arc{0, 1, 2, ArcKind::kInter, 1}, windows, t), 0);
  const std::vector<Window> broken = {{0, 100}, {3, 10}, {3, 2}};
  EXPECT_THROW(big_m_shift(Arc{0, 1, 2, ArcKind::kInter, 1}, broken, t), ContractViolation);

  const Instance inst = tiny2();
  const Multigraph g = build_multigraph(inst);
  EXPECT_DOUBLE_EQ(big_m_shift(g.arc(g.inter_arc(1, 2)), g.windows(), inst.travel), 6);
}

TEST(BuildModelTest, Tiny2Shape) {
  const Instance inst = tiny2();
  const MipModel m = build_model(build_multigraph(inst), inst);
  EXPECT_EQ(m.num_columns(), 18);
  EXPECT_EQ(m.count_rows(RowFamily::kCarryPropagation), 2u);
  ASSERT_EQ(m.objective().size(), 2u);
  EXPECT_EQ(m.objective()[0], (std::pair<int, double>{m.completion_column(1), 1.0}));
  EXPECT_EQ(m.objective()[1], (std::pair<int, double>{m.completion_column(2), 1.0}));
  EXPECT_EQ(m.count_rows(RowFamily::kWindowRelease), 0u);
}

TEST(BuildModelTest, BinaryCountForTwentyFive) {
  std::mt19937_64 rng(1);
  const Instance inst = random_instance(rng, RandomOptions{.n = 25, .fleet = 10});
  const MipModel m = build_model(build_multigraph(inst), inst);
  int binaries = 0;
  for (const VariableRef& v : m.variables()) binaries += v.kind == VarKind::kBinary;
  EXPECT_EQ(binaries, 1875);
}

TEST(BuildModelTest, StructuralCountsUpToThirty) {
  std::mt19937_64 rng(2);
  for (int n = 1; n <= 30; ++n) {
    const Instance inst = random_instance(rng, RandomOptions{.n = n, .fleet = 2});
    const MipModel m = build_model(build_multigraph(inst), inst);
    const auto nn = static_cast<std::size_t>(n);
    int binaries = 0, continuous = 0;
    for (const VariableRef& v : m.variables()) {
      (v.kind == VarKind::kBinary ? binaries : continuous)++;
    }
    EXPECT_EQ(binaries, 3 * n * n);
    EXPECT_EQ(continuous, 3 * n);
    EXPECT_EQ(m.count_rows(RowFamily::kTimePropagation), 2 * nn * (nn - 1));
    EXPECT_EQ(m.count_rows(RowFamily::kCarryPropagation), nn * (nn - 1) * (nn - 1));
    EXPECT_EQ(m.count_rows(RowFamily::kCompletion), nn * nn);
    EXPECT_EQ(m.count_rows(RowFamily::kShiftPropagation), 2 * nn * (nn - 1));
    EXPECT_EQ(m.count_rows(RowFamily::kVisitOut), nn);
    EXPECT_EQ(m.count_rows(RowFamily::kVisitIn), nn);
    EXPECT_EQ(m.count_rows(RowFamily::kDepotBalance), 1u);
    EXPECT_EQ(m.count_rows(RowFamily::kFleetLimit), 1u);
  }
}

TEST(BuildModelTest, ColumnsAreABijection) {
  std::mt19937_64 rng(3);
  const int n = 6;
  const Instance inst = random_instance(rng, RandomOptions{.n = n});
  const MipModel m = build_model(build_multigraph(inst), inst);
  ASSERT_EQ(m.num_columns(), 3 * n * n + 3 * n);
  for (int c = 0; c < m.num_columns(); ++c) {
    EXPECT_EQ(m.variables()[c].column, c);
    EXPECT_EQ(m.column_by_name(m.variables()[c].name()), c);
  }
  EXPECT_EQ(m.column_by_name("nope"), -1);
}

TEST(BuildModelTest, ExplicitRowsMode) {
  const Instance inst = tiny2();
  ModelOptions options;
  options.explicit_rows = true;
  const MipModel m = build_model(build_multigraph(inst), inst, options);
  EXPECT_EQ(m.count_rows(RowFamily::kWindowRelease), 2u);
  EXPECT_EQ(m.count_rows(RowFamily::kWindowDeadline), 2u);
  EXPECT_EQ(m.count_rows(RowFamily::kCollectionStart), 2u);
  EXPECT_EQ(m.count_rows(RowFamily::kShiftStart), 2u);
  EXPECT_EQ(m.count_rows(RowFamily::kShiftCap), 2u);
  for (const VariableRef& v : m.variables()) {
    if (v.kind == VarKind::kBinary) {
      EXPECT_EQ(v.lower, 0);
      EXPECT_EQ(v.upper, 1);
    }
  }
}

TEST(BuildModelTest, StoredBigMsMatchFormulas) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = random_instance(rng, RandomOptions{.n = 2 + trial % 6});
    const Multigraph g = build_multigraph(inst);
    const MipModel m = build_model(g, inst);
    const int n = inst.n();
    std::size_t time_row = 0, shift_row = 0;
    for (const LinearConstraint& row : m.constraints()) {
      if (row.family == RowFamily::kTimePropagation || row.family == RowFamily::kShiftPropagation) {
        const bool time = row.family == RowFamily::kTimePropagation;
        const ArcId e = std::stoi(row.name.substr(row.name.find('_') + 1));
        const Arc& arc = g.arc(e);
        const double M = time ? big_m_visit(arc, g.windows())
                              : big_m_shift(arc, g.windows(), inst.travel);
        EXPECT_DOUBLE_EQ(coefficient(row, m.x_column(e)), M) << row.name;
        ++(time ? time_row : shift_row);
      }
      if (row.family == RowFamily::kCompletion) {
        bool matched = false;
        for (NodeId i = 1; i <= n && !matched; ++i) {
          for (NodeId j = 1; j <= n && !matched; ++j) {
            const double c = coefficient(row, m.y_column(i, j));
            if (c != 0) {
              EXPECT_DOUBLE_EQ(c, big_m_completion(i, g.windows(), inst.travel));
              matched = true;
            }
          }
        }
      }
    }
    EXPECT_EQ(time_row, static_cast<std::size_t>(2 * n * (n - 1)));
    EXPECT_EQ(shift_row, static_cast<std::size_t>(2 * n * (n - 1)));
  }
}

TEST(EncodeSolutionTest, OracleSolutionsSatisfyEveryRow) {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const Instance inst =
        random_instance(rng, RandomOptions{.n = 1 + trial % 5, .fleet = 1 + trial % 2});
    const Multigraph g = build_multigraph(inst);
    const OracleResult oracle = exact_solve_tiny(inst, g.windows());
    if (!oracle.best) continue;
    for (bool explicit_rows : {false, true}) {
      ModelOptions options;
      options.explicit_rows = explicit_rows;
      const MipModel m = build_model(g, inst, options);
      const auto values = encode_solution(m, g, *oracle.best);
      const auto violations = check_assignment(m, values);
      EXPECT_TRUE(violations.empty())
          << inst.n() << " requests, first violated row " << violations.front().name;
      double objective = 0;
      for (const auto& [col, coef] : m.objective()) objective += coef * values[col];
      EXPECT_NEAR(objective, oracle.best_F, 1e-6);
    }
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(ExtractSolutionTest, Tiny2OptimumDecodesToTwoTrips) {
  const Instance inst = tiny2();
  const Multigraph g = build_multigraph(inst);
  const MipModel m = build_model(g, inst);
  std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);
  values[m.x_column(g.depot_out_arc(1))] = 1;
  values[m.x_column(g.replenishment_arc(1, 2))] = 1;
  values[m.x_column(g.depot_in_arc(2))] = 1;
  values[m.z_column(1)] = 3;
  values[m.z_column(2)] = 10;
  const EvaluatedSolution sol = extract_solution(m, values, g, inst);
  ASSERT_EQ(sol.tours.size(), 1u);
  ASSERT_EQ(sol.tours[0].trips.size(), 2u);
  EXPECT_EQ(sol.tours[0].trips[0].nodes, std::vector<NodeId>{1});
  EXPECT_EQ(sol.tours[0].trips[1].nodes, std::vector<NodeId>{2});
  EXPECT_DOUBLE_EQ(sol.F, 20);
  EXPECT_DOUBLE_EQ(sol.F_prime, 13);
  EXPECT_TRUE(validate_solution(sol, inst, g.windows()).valid());
}

TEST(ExtractSolutionTest, NoArcsMeansUnvisitedNode) {
  const Instance inst = tiny2();
  const Multigraph g = build_multigraph(inst);
  const MipModel m = build_model(g, inst);
  const std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);
  try {
    extract_solution(m, values, g, inst);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("never visited"), std::string::npos) << e.what();
  }
}

TEST(ExtractSolutionTest, SingleRequest) {
  const Instance inst = testing::single_request();
  const Multigraph g = build_multigraph(inst);
  const MipModel m = build_model(g, inst);
  std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);
  values[m.x_column(g.depot_out_arc(1))] = 1;
  values[m.x_column(g.depot_in_arc(1))] = 1;
  values[m.y_column(1, 1)] = 1;
  values[m.z_column(1)] = 3;
  const EvaluatedSolution sol = extract_solution(m, values, g, inst);
  ASSERT_EQ(sol.tours.size(), 1u);
  ASSERT_EQ(sol.tours[0].trips.size(), 1u);
  EXPECT_DOUBLE_EQ(sol.F, 6);
}

TEST(ExtractSolutionTest, DetachedCycleIsRejected) {
  std::mt19937_64 rng(8);
  const Instance inst = random_instance(rng, RandomOptions{.n = 3});
  const Multigraph g = build_multigraph(inst);
  const MipModel m = build_model(g, inst);
  std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);
  values[m.x_column(g.depot_out_arc(1))] = 1;
  values[m.x_column(g.depot_in_arc(1))] = 1;
  values[m.x_column(g.inter_arc(2, 3))] = 1;
  values[m.x_column(g.inter_arc(3, 2))] = 1;
  try {
    extract_solution(m, values, g, inst);
    FAIL() << "expected DecodeError";
  } catch (const DecodeError& e) {
    EXPECT_NE(std::string(e.what()).find("not on any tour"), std::string::npos) << e.what();
  }
}

TEST(ExtractSolutionTest, FractionalBinaryIsRejected) {
  const Instance inst = testing::single_request();
  const Multigraph g = build_multigraph(inst);
  const MipModel m = build_model(g, inst);
  std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);
  values[m.x_column(g.depot_out_arc(1))] = 0.5;
  values[m.x_column(g.depot_in_arc(1))] = 1;
  EXPECT_THROW(extract_solution(m, values, g, inst), DecodeError);
}

TEST(ExtractSolutionTest, RoundTripsOracleSolutions) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance inst =
        random_instance(rng, RandomOptions{.n = 1 + trial % 5, .fleet = 1 + trial % 2});
    const Multigraph g = build_multigraph(inst);
    const OracleResult oracle = exact_solve_tiny(inst, g.windows());
    if (!oracle.best) continue;
    const MipModel m = build_model(g, inst);
    const EvaluatedSolution back = extract_solution(m, encode_solution(m, g, *oracle.best), g, inst);
    EXPECT_NEAR(back.F, oracle.best_F, 1e-6);
    EXPECT_TRUE(validate_solution(back, inst, g.windows()).valid());
  }
}

}  // namespace
}  // namespace cdsp
