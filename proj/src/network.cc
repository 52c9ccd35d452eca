#include "cdsp/network.h"

#include <algorithm>
#include <ostream>
#include <string>

#include "cdsp/text.h"

namespace cdsp {

std::string_view to_string(ArcKind kind) {
  switch (kind) {
    case ArcKind::kDepotAdjacent: return "depot";
    case ArcKind::kInter: return "inter";
    case ArcKind::kReplenishment: return "replenishment";
  }
  return "?";
}

InfeasibleInstanceError::InfeasibleInstanceError(NodeId node)
    : std::runtime_error("instance infeasible at node " + std::to_string(node) +
                         ": empty time window after preprocessing"),
      node_(node) {}

std::vector<Window> tighten_windows(const Instance& inst,
                                    std::span<const Window> current) {
  std::vector<Window> windows(current.begin(), current.end());
  const double d0 = inst.depot_deadline;
  windows[0] = {0.0, d0};
  for (NodeId j = 1; j <= inst.n(); ++j) {
    Window& w = windows[static_cast<std::size_t>(j)];
    w.release = std::max(w.release, inst.travel(kDepot, j));
    w.deadline = std::min(w.deadline, d0 - inst.travel(j, kDepot));
  }
  return windows;
}

std::vector<Window> tighten_windows(const Instance& inst) {
  std::vector<Window> raw;
  raw.reserve(inst.sites.size());
  for (const Site& s : inst.sites) raw.push_back({s.release, s.deadline});
  return tighten_windows(inst, raw);
}

std::vector<Window> preprocess_time_windows(const Instance& inst) {
  auto windows = tighten_windows(inst);
  for (NodeId j = 1; j <= inst.n(); ++j) {
    if (windows[static_cast<std::size_t>(j)].empty()) throw InfeasibleInstanceError(j);
  }
  return windows;
}

std::vector<TriangleViolation> check_triangle(const Instance& inst) {
  return triangle_violations(inst.travel);
}

Multigraph build_multigraph(const Instance& inst) {
  Multigraph g;
  const int n = inst.n();
  g.n_ = n;
  g.arcs_.reserve(static_cast<std::size_t>(2 * n * n));
  g.out_.resize(static_cast<std::size_t>(n + 1));
  g.in_.resize(static_cast<std::size_t>(n + 1));

  auto add = [&](NodeId s, NodeId t, ArcKind kind, double cost) {
    const auto id = static_cast<ArcId>(g.arcs_.size());
    g.arcs_.push_back({id, s, t, kind, cost});
    g.out_[static_cast<std::size_t>(s)].push_back(id);
    g.in_[static_cast<std::size_t>(t)].push_back(id);
  };

  for (NodeId j = 1; j <= n; ++j) add(kDepot, j, ArcKind::kDepotAdjacent, inst.travel(kDepot, j));
  for (NodeId i = 1; i <= n; ++i) add(i, kDepot, ArcKind::kDepotAdjacent, inst.travel(i, kDepot));
  for (NodeId i = 1; i <= n; ++i) {
    for (NodeId j = 1; j <= n; ++j) {
      if (i != j) add(i, j, ArcKind::kInter, inst.travel(i, j));
    }
  }
  for (NodeId i = 1; i <= n; ++i) {
    for (NodeId j = 1; j <= n; ++j) {
      if (i != j) {
        add(i, j, ArcKind::kReplenishment, inst.travel(i, kDepot) + inst.travel(kDepot, j));
      }
    }
  }

  g.windows_ = tighten_windows(inst);
  for (NodeId j = 1; j <= n; ++j) {
    if (g.windows_[static_cast<std::size_t>(j)].empty()) g.infeasible_.push_back(j);
  }
  return g;
}

void write_arc_csv(const Multigraph& g, std::ostream& out) {
  out << "id,kind,source,target,cost\n";
  for (const Arc& a : g.arcs()) {
    out << a.id << ',' << to_string(a.kind) << ',' << a.source << ',' << a.target << ','
        << format_number(a.cost) << '\n';
  }
}

}  // namespace cdsp
