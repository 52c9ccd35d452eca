#include "cdsp/network.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "gtest/gtest.h"
#include "test_support.h"

namespace cdsp {
namespace {

using ::cdsp::testing::RandomOptions;
using ::cdsp::testing::random_instance;

// One request at distance 3 from the depot with the given window and depot
// deadline.
Instance one_site(double release, double deadline, double depot_deadline) {
  RawInstance raw;
  raw.rows = {{0, 0, 0, 0, 0, depot_deadline, 0}, {1, 3, 0, 0, release, deadline, 0}};
  InstanceConfig cfg;
  cfg.fleet_size = 1;
  return build_instance(raw, cfg);
}

TEST(MultigraphTest, Tiny2ArcCounts) {
  const Multigraph g = build_multigraph(testing::tiny2());
  ASSERT_EQ(g.arcs().size(), 8u);
  int depot = 0, inter = 0, replenishment = 0;
  for (const Arc& a : g.arcs()) {
    switch (a.kind) {
      case ArcKind::kDepotAdjacent: ++depot; break;
      case ArcKind::kInter: ++inter; break;
      case ArcKind::kReplenishment: ++replenishment; break;
    }
  }
  EXPECT_EQ(depot, 4);
  EXPECT_EQ(inter, 2);
  EXPECT_EQ(replenishment, 2);
}

TEST(MultigraphTest, Tiny2ReplenishmentCost) {
  const Multigraph g = build_multigraph(testing::tiny2());
  const Arc& a = g.arc(g.replenishment_arc(1, 2));
  EXPECT_EQ(a.source, 1);
  EXPECT_EQ(a.target, 2);
  EXPECT_EQ(a.kind, ArcKind::kReplenishment);
  EXPECT_DOUBLE_EQ(a.cost, 7);
  EXPECT_DOUBLE_EQ(g.arc(g.inter_arc(1, 2)).cost, 5);
}

TEST(MultigraphTest, TwentyFiveRequestsHave1250Arcs) {
  std::mt19937_64 rng(1);
  const Multigraph g = build_multigraph(random_instance(rng, RandomOptions{.n = 25, .fleet = 10}));
  EXPECT_EQ(g.arcs().size(), 1250u);
}

TEST(MultigraphTest, ArcIdsFollowFixedOrder) {
  std::mt19937_64 rng(2);
  const int n = 5;
  const Multigraph g = build_multigraph(random_instance(rng, RandomOptions{.n = n}));
  for (ArcId id = 0; id < static_cast<ArcId>(g.arcs().size()); ++id) {
    EXPECT_EQ(g.arc(id).id, id);
  }
  for (NodeId j = 1; j <= n; ++j) {
    EXPECT_EQ(g.arc(g.depot_out_arc(j)).source, 0);
    EXPECT_EQ(g.arc(g.depot_out_arc(j)).target, j);
    EXPECT_EQ(g.arc(g.depot_in_arc(j)).source, j);
    EXPECT_EQ(g.arc(g.depot_in_arc(j)).target, 0);
    for (NodeId i = 1; i <= n; ++i) {
      if (i == j) continue;
      EXPECT_EQ(g.arc(g.inter_arc(i, j)).kind, ArcKind::kInter);
      EXPECT_EQ(g.arc(g.inter_arc(i, j)).source, i);
      EXPECT_EQ(g.arc(g.inter_arc(i, j)).target, j);
      EXPECT_EQ(g.arc(g.replenishment_arc(i, j)).kind, ArcKind::kReplenishment);
      EXPECT_EQ(g.arc(g.replenishment_arc(i, j)).target, j);
    }
  }
}

TEST(PreprocessTest, ReleaseRaisedToTravelTime) {
  const auto w = preprocess_time_windows(one_site(0, 10, 30));
  EXPECT_EQ(w[1], (Window{3, 10}));
  EXPECT_EQ(w[0], (Window{0, 30}));
}

TEST(PreprocessTest, DeadlineCutByReturnTrip) {
  EXPECT_EQ(preprocess_time_windows(one_site(0, 10, 12))[1], (Window{3, 9}));
}

TEST(PreprocessTest, UnreachableNodeIsInfeasible) {
  const Instance inst = one_site(0, 2, 30);
  try {
    preprocess_time_windows(inst);
    FAIL() << "expected InfeasibleInstanceError";
  } catch (const InfeasibleInstanceError& e) {
    EXPECT_EQ(e.node(), 1);
  }
  const Multigraph g = build_multigraph(inst);
  EXPECT_EQ(g.infeasible_nodes(), std::vector<NodeId>{1});
  EXPECT_TRUE(g.window(1).empty());
}

TEST(CheckTriangleTest, EuclideanInstancesPass) {
  EXPECT_TRUE(check_triangle(testing::tiny2()).empty());
  std::mt19937_64 rng(4);
  EXPECT_TRUE(check_triangle(random_instance(rng, RandomOptions{.n = 30})).empty());
}

TEST(ArcCsvTest, OneLinePerArc) {
  const Multigraph g = build_multigraph(testing::tiny2());
  std::ostringstream out;
  write_arc_csv(g, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "id,kind,source,target,cost");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8);
}

TEST(NetworkPropertyTest, CountsForAllSizes) {
  std::mt19937_64 rng(6);
  for (int n = 1; n <= 100; n += (n < 20 ? 1 : 9)) {
    const Multigraph g = build_multigraph(random_instance(rng, RandomOptions{.n = n}));
    EXPECT_EQ(g.arcs().size(), static_cast<std::size_t>(2 * n * n)) << n;
  }
}

TEST(NetworkPropertyTest, RandomInstanceInvariants) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 12;
    const Instance inst = random_instance(rng, RandomOptions{.n = n});
    const Multigraph g = build_multigraph(inst);
    const auto once = tighten_windows(inst);
    EXPECT_EQ(tighten_windows(inst, once), once);
    for (NodeId j = 1; j <= n; ++j) {
      EXPECT_GE(once[j].release, inst.sites[j].release);
      EXPECT_LE(once[j].deadline, inst.sites[j].deadline);
    }
    std::set<ArcId> seen_out, seen_in;
    std::set<std::pair<NodeId, NodeId>> inter_pairs, replenishment_pairs;
    for (NodeId v = 0; v <= n; ++v) {
      for (ArcId e : g.out_arcs(v)) {
        EXPECT_EQ(g.arc(e).source, v);
        EXPECT_TRUE(seen_out.insert(e).second);
      }
      for (ArcId e : g.in_arcs(v)) {
        EXPECT_EQ(g.arc(e).target, v);
        EXPECT_TRUE(seen_in.insert(e).second);
      }
    }
    EXPECT_EQ(seen_out.size(), g.arcs().size());
    EXPECT_EQ(seen_in.size(), g.arcs().size());
    for (const Arc& a : g.arcs()) {
      if (a.kind == ArcKind::kDepotAdjacent) {
        EXPECT_NE(a.source == 0, a.target == 0);
        continue;
      }
      EXPECT_NE(a.source, a.target);
      EXPECT_NE(a.source, 0);
      EXPECT_NE(a.target, 0);
      auto& pairs = a.kind == ArcKind::kInter ? inter_pairs : replenishment_pairs;
      EXPECT_TRUE(pairs.insert({a.source, a.target}).second);
      if (a.kind == ArcKind::kReplenishment) {
        EXPECT_DOUBLE_EQ(a.cost, inst.travel(a.source, 0) + inst.travel(0, a.target));
        const double direct = g.arc(g.inter_arc(a.source, a.target)).cost;
        EXPECT_GE(a.cost, direct - 1e-9 * std::max(1.0, direct));
      }
    }
    EXPECT_EQ(inter_pairs.size(), static_cast<std::size_t>(n * (n - 1)));
    EXPECT_EQ(replenishment_pairs.size(), static_cast<std::size_t>(n * (n - 1)));
  }
}

}  // namespace
}  // namespace cdsp
