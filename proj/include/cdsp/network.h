// Directed multigraph with original and replenishment arcs.
//
// Arc ids are dense and fixed: depot-adjacent arcs first, then direct arcs
// between points of care, then replenishment arcs, each group sorted by
// (source, target). A replenishment arc i->j stands for the sequence
// i -> depot -> j and costs c_i0 + c_0j.

#ifndef CDSP_NETWORK_H_
#define CDSP_NETWORK_H_

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "cdsp/instance.h"

namespace cdsp {

using ArcId = int;

enum class ArcKind { kDepotAdjacent, kInter, kReplenishment };

std::string_view to_string(ArcKind kind);

struct Arc {
  ArcId id = 0;
  NodeId source = 0;
  NodeId target = 0;
  ArcKind kind = ArcKind::kDepotAdjacent;
  double cost = 0;
};

struct Window {
  double release = 0;
  double deadline = 0;

  bool empty() const { return release > deadline; }
  friend bool operator==(const Window&, const Window&) = default;
};

// Thrown by preprocess_time_windows when no vehicle can serve a node and
// still return to the depot in time.
class InfeasibleInstanceError : public std::runtime_error {
 public:
  explicit InfeasibleInstanceError(NodeId node);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

// r_j <- max(r_j, c_0j), d_j <- min(d_j, d_0 - c_j0) for every request.
// Entry 0 is the depot window [0, d_0]. Empty windows are returned as is.
std::vector<Window> tighten_windows(const Instance& inst);
std::vector<Window> tighten_windows(const Instance& inst,
                                    std::span<const Window> current);

// Same as tighten_windows but throws InfeasibleInstanceError on the first
// node whose tightened window is empty.
std::vector<Window> preprocess_time_windows(const Instance& inst);

std::vector<TriangleViolation> check_triangle(const Instance& inst);

class Multigraph {
 public:
  int num_requests() const { return n_; }
  int num_nodes() const { return n_ + 1; }

  std::span<const Arc> arcs() const { return arcs_; }
  const Arc& arc(ArcId id) const { return arcs_[static_cast<std::size_t>(id)]; }
  std::span<const ArcId> out_arcs(NodeId j) const { return out_[static_cast<std::size_t>(j)]; }
  std::span<const ArcId> in_arcs(NodeId j) const { return in_[static_cast<std::size_t>(j)]; }

  // Tightened windows, one per node.
  std::span<const Window> windows() const { return windows_; }
  const Window& window(NodeId j) const { return windows_[static_cast<std::size_t>(j)]; }
  // Requests whose tightened window is empty, ascending.
  const std::vector<NodeId>& infeasible_nodes() const { return infeasible_; }

  ArcId depot_out_arc(NodeId j) const { return j - 1; }
  ArcId depot_in_arc(NodeId j) const { return n_ + j - 1; }
  ArcId inter_arc(NodeId i, NodeId j) const { return 2 * n_ + pair_index(i, j); }
  ArcId replenishment_arc(NodeId i, NodeId j) const {
    return 2 * n_ + n_ * (n_ - 1) + pair_index(i, j);
  }

 private:
  friend Multigraph build_multigraph(const Instance& inst);

  int pair_index(NodeId i, NodeId j) const {
    return (i - 1) * (n_ - 1) + (j < i ? j - 1 : j - 2);
  }

  int n_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<ArcId>> out_;
  std::vector<std::vector<ArcId>> in_;
  std::vector<Window> windows_;
  std::vector<NodeId> infeasible_;
};

// Never throws on empty windows; inspect infeasible_nodes() instead.
Multigraph build_multigraph(const Instance& inst);

// id,kind,source,target,cost
void write_arc_csv(const Multigraph& g, std::ostream& out);

}  // namespace cdsp

#endif  // CDSP_NETWORK_H_
