#include "cdsp/formulation.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdsp/text.h"

namespace cdsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<int, double>> normalize(std::vector<std::pair<int, double>> terms) {
  std::sort(terms.begin(), terms.end());
  std::vector<std::pair<int, double>> merged;
  for (const auto& [col, coef] : terms) {
    if (!merged.empty() && merged.back().first == col) {
      merged.back().second += coef;
    } else {
      merged.emplace_back(col, coef);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  return merged;
}

std::optional<int> parse_index(std::string_view s) {
  auto v = parse_double(s);
  if (!v || *v != std::floor(*v) || *v < 0 || s.find_first_not_of("0123456789") != std::string_view::npos) {
    return std::nullopt;
  }
  return static_cast<int>(*v);
}

}  // namespace

std::string VariableRef::name() const {
  switch (family) {
    case VarFamily::kX: return "x_" + std::to_string(first);
    case VarFamily::kY: return "y_" + std::to_string(first) + "_" + std::to_string(second);
    case VarFamily::kZ: return "z_" + std::to_string(first);
    case VarFamily::kTau: return "tau_" + std::to_string(first);
    case VarFamily::kCompletion: return "C_" + std::to_string(first);
  }
  return "?";
}

std::string_view to_string(RowFamily family) {
  switch (family) {
    case RowFamily::kDepotBalance: return "depot_balance";
    case RowFamily::kFleetLimit: return "fleet_limit";
    case RowFamily::kVisitOut: return "visit_out";
    case RowFamily::kVisitIn: return "visit_in";
    case RowFamily::kTimePropagation: return "time";
    case RowFamily::kCarryPropagation: return "carry";
    case RowFamily::kCompletion: return "completion";
    case RowFamily::kShiftPropagation: return "shift";
    case RowFamily::kWindowRelease: return "release";
    case RowFamily::kWindowDeadline: return "deadline";
    case RowFamily::kCollectionStart: return "collect";
    case RowFamily::kShiftStart: return "shift_start";
    case RowFamily::kShiftCap: return "shift_cap";
  }
  return "?";
}

std::size_t MipModel::count_rows(RowFamily family) const {
  return static_cast<std::size_t>(std::count_if(
      constraints_.begin(), constraints_.end(),
      [family](const LinearConstraint& c) { return c.family == family; }));
}

int MipModel::column_by_name(std::string_view name) const {
  auto in_range = [this](NodeId j) { return j >= 1 && j <= n_; };
  if (name.starts_with("x_")) {
    auto e = parse_index(name.substr(2));
    return e && *e < 2 * n_ * n_ ? x_column(*e) : -1;
  }
  if (name.starts_with("y_")) {
    const auto rest = name.substr(2);
    const auto sep = rest.find('_');
    if (sep == std::string_view::npos) return -1;
    auto i = parse_index(rest.substr(0, sep));
    auto j = parse_index(rest.substr(sep + 1));
    return i && j && in_range(*i) && in_range(*j) ? y_column(*i, *j) : -1;
  }
  if (name.starts_with("z_")) {
    auto j = parse_index(name.substr(2));
    return j && in_range(*j) ? z_column(*j) : -1;
  }
  if (name.starts_with("tau_")) {
    auto j = parse_index(name.substr(4));
    return j && in_range(*j) ? tau_column(*j) : -1;
  }
  if (name.starts_with("C_")) {
    auto j = parse_index(name.substr(2));
    return j && in_range(*j) ? completion_column(*j) : -1;
  }
  return -1;
}

double big_m_visit(const Arc& e, std::span<const Window> windows) {
  if (e.kind == ArcKind::kDepotAdjacent) {
    throw ContractViolation("visit big-M requested for depot-adjacent arc " + std::to_string(e.id));
  }
  const double d_s = windows[static_cast<std::size_t>(e.source)].deadline;
  const double r_t = windows[static_cast<std::size_t>(e.target)].release;
  return std::max(0.0, d_s + e.cost - r_t);
}

double big_m_completion(NodeId i, std::span<const Window> windows, const TravelMatrix& travel) {
  return windows[static_cast<std::size_t>(i)].deadline + travel(i, kDepot);
}

double big_m_shift(const Arc& e, std::span<const Window> windows, const TravelMatrix& travel) {
  if (e.kind == ArcKind::kDepotAdjacent) {
    throw ContractViolation("shift big-M requested for depot-adjacent arc " + std::to_string(e.id));
  }
  const double m = windows[static_cast<std::size_t>(e.target)].deadline - travel(kDepot, e.target);
  if (m < 0) {
    throw ContractViolation("negative shift big-M on arc " + std::to_string(e.id) +
                            ": window of node " + std::to_string(e.target) +
                            " should have been flagged by preprocessing");
  }
  return m;
}

MipModel build_model(const Multigraph& g, const Instance& inst, ModelOptions options) {
  const int n = inst.n();
  if (g.num_requests() != n) throw ContractViolation("graph and instance disagree on n");

  MipModel m;
  m.n_ = n;
  m.fleet_size_ = inst.fleet_size;
  m.label_ = inst.label;
  m.explicit_rows_ = options.explicit_rows;
  const auto windows = g.windows();
  const bool bounds = !options.explicit_rows;

  m.variables_.reserve(static_cast<std::size_t>(3 * n * n + 3 * n));
  for (const Arc& a : g.arcs()) {
    m.variables_.push_back({VarFamily::kX, a.id, 0, m.x_column(a.id), VarKind::kBinary, 0, 1});
  }
  for (NodeId i = 1; i <= n; ++i) {
    for (NodeId j = 1; j <= n; ++j) {
      const double lower = (bounds && i == j) ? 1.0 : 0.0;
      m.variables_.push_back({VarFamily::kY, i, j, m.y_column(i, j), VarKind::kBinary, lower, 1});
    }
  }
  for (NodeId j = 1; j <= n; ++j) {
    const Window& w = windows[static_cast<std::size_t>(j)];
    m.variables_.push_back({VarFamily::kZ, j, 0, m.z_column(j), VarKind::kContinuous,
                            bounds ? w.release : 0.0, bounds ? w.deadline : kInf});
  }
  for (NodeId j = 1; j <= n; ++j) {
    m.variables_.push_back({VarFamily::kTau, j, 0, m.tau_column(j), VarKind::kContinuous,
                            bounds ? inst.travel(kDepot, j) : 0.0,
                            bounds ? inst.shift_cap - inst.travel(j, kDepot) : kInf});
  }
  for (NodeId j = 1; j <= n; ++j) {
    m.variables_.push_back(
        {VarFamily::kCompletion, j, 0, m.completion_column(j), VarKind::kContinuous, 0, kInf});
  }

  auto add_row = [&](std::string name, RowFamily family, std::vector<std::pair<int, double>> terms,
                     Sense sense, double rhs) {
    m.constraints_.push_back({std::move(name), family, normalize(std::move(terms)), sense, rhs});
  };
  auto x = [&](ArcId e) { return m.x_column(e); };

  // Depot flow balance and fleet limit.
  {
    std::vector<std::pair<int, double>> balance, fleet;
    for (ArcId e : g.out_arcs(kDepot)) {
      balance.emplace_back(x(e), 1.0);
      fleet.emplace_back(x(e), 1.0);
    }
    for (ArcId e : g.in_arcs(kDepot)) balance.emplace_back(x(e), -1.0);
    add_row("depot_balance", RowFamily::kDepotBalance, std::move(balance), Sense::kEqual, 0);
    add_row("fleet_limit", RowFamily::kFleetLimit, std::move(fleet), Sense::kLessEqual,
            inst.fleet_size);
  }

  for (NodeId j = 1; j <= n; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (ArcId e : g.out_arcs(j)) terms.emplace_back(x(e), 1.0);
    add_row("visit_out_" + std::to_string(j), RowFamily::kVisitOut, std::move(terms),
            Sense::kEqual, 1);
  }
  for (NodeId j = 1; j <= n; ++j) {
    std::vector<std::pair<int, double>> terms;
    for (ArcId e : g.in_arcs(j)) terms.emplace_back(x(e), 1.0);
    add_row("visit_in_" + std::to_string(j), RowFamily::kVisitIn, std::move(terms),
            Sense::kEqual, 1);
  }

  for (const Arc& a : g.arcs()) {
    if (a.kind == ArcKind::kDepotAdjacent) continue;
    const double big_m = big_m_visit(a, windows);
    add_row("time_" + std::to_string(a.id), RowFamily::kTimePropagation,
            {{m.z_column(a.source), 1.0}, {m.z_column(a.target), -1.0}, {x(a.id), big_m}},
            Sense::kLessEqual, big_m - a.cost);
  }

  for (const Arc& a : g.arcs()) {
    if (a.kind != ArcKind::kInter) continue;
    for (NodeId j = 1; j <= n; ++j) {
      if (j == a.target) continue;
      add_row("carry_" + std::to_string(a.id) + "_" + std::to_string(j),
              RowFamily::kCarryPropagation,
              {{m.y_column(a.source, j), 1.0}, {m.y_column(a.target, j), -1.0}, {x(a.id), 1.0}},
              Sense::kLessEqual, 1);
    }
  }

  for (NodeId i = 1; i <= n; ++i) {
    const double big_m = big_m_completion(i, windows, inst.travel);
    for (NodeId j = 1; j <= n; ++j) {
      add_row("completion_" + std::to_string(i) + "_" + std::to_string(j),
              RowFamily::kCompletion,
              {{m.z_column(i), 1.0}, {m.completion_column(j), -1.0}, {m.y_column(i, j), big_m}},
              Sense::kLessEqual, big_m - inst.travel(i, kDepot));
    }
  }

  for (const Arc& a : g.arcs()) {
    if (a.kind == ArcKind::kDepotAdjacent) continue;
    const double big_m = big_m_shift(a, windows, inst.travel);
    add_row("shift_" + std::to_string(a.id), RowFamily::kShiftPropagation,
            {{m.tau_column(a.source), 1.0},
             {m.z_column(a.target), 1.0},
             {m.z_column(a.source), -1.0},
             {m.tau_column(a.target), -1.0},
             {x(a.id), big_m}},
            Sense::kLessEqual, big_m);
  }

  if (options.explicit_rows) {
    for (NodeId j = 1; j <= n; ++j) {
      const auto s = std::to_string(j);
      const Window& w = windows[static_cast<std::size_t>(j)];
      add_row("release_" + s, RowFamily::kWindowRelease, {{m.z_column(j), 1.0}},
              Sense::kGreaterEqual, w.release);
      add_row("deadline_" + s, RowFamily::kWindowDeadline, {{m.z_column(j), 1.0}},
              Sense::kLessEqual, w.deadline);
      add_row("collect_" + s, RowFamily::kCollectionStart, {{m.y_column(j, j), 1.0}},
              Sense::kEqual, 1);
      add_row("shift_start_" + s, RowFamily::kShiftStart, {{m.tau_column(j), 1.0}},
              Sense::kGreaterEqual, inst.travel(kDepot, j));
      add_row("shift_cap_" + s, RowFamily::kShiftCap, {{m.tau_column(j), 1.0}},
              Sense::kLessEqual, inst.shift_cap - inst.travel(j, kDepot));
    }
  }

  for (NodeId j = 1; j <= n; ++j) m.objective_.emplace_back(m.completion_column(j), 1.0);
  return m;
}

std::vector<double> encode_solution(const MipModel& m, const Multigraph& g,
                                    const EvaluatedSolution& sol) {
  std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);
  auto set = [&](int column, double v) { values[static_cast<std::size_t>(column)] = v; };
  for (const Tour& tour : sol.tours) {
    NodeId prev = kDepot;
    for (const Trip& trip : tour.trips) {
      for (std::size_t k = 0; k < trip.nodes.size(); ++k) {
        const NodeId j = trip.nodes[k];
        ArcId e;
        if (prev == kDepot) {
          e = g.depot_out_arc(j);
        } else if (k == 0) {
          e = g.replenishment_arc(prev, j);
        } else {
          e = g.inter_arc(prev, j);
        }
        set(m.x_column(e), 1.0);
        for (std::size_t a = 0; a <= k; ++a) set(m.y_column(j, trip.nodes[a]), 1.0);
        const double z = sol.timing.visit[static_cast<std::size_t>(j)];
        set(m.z_column(j), z);
        set(m.tau_column(j), z - tour.departure);
        set(m.completion_column(j), sol.timing.completion[static_cast<std::size_t>(j)]);
        prev = j;
      }
    }
    if (prev != kDepot) set(m.x_column(g.depot_in_arc(prev)), 1.0);
  }
  return values;
}

std::vector<RowCheck> check_assignment(const MipModel& m, std::span<const double> values,
                                       double tolerance) {
  std::vector<RowCheck> out;
  if (values.size() != static_cast<std::size_t>(m.num_columns())) {
    out.push_back({"column count", std::abs(static_cast<double>(values.size()) - m.num_columns())});
    return out;
  }
  for (const VariableRef& v : m.variables()) {
    const double x = values[static_cast<std::size_t>(v.column)];
    if (x < v.lower - tolerance) out.push_back({v.name() + " lower bound", v.lower - x});
    if (x > v.upper + tolerance) out.push_back({v.name() + " upper bound", x - v.upper});
    if (v.kind == VarKind::kBinary && std::abs(x - std::round(x)) > tolerance) {
      out.push_back({v.name() + " integrality", std::abs(x - std::round(x))});
    }
  }
  for (const LinearConstraint& c : m.constraints()) {
    double activity = 0;
    for (const auto& [col, coef] : c.terms) activity += coef * values[static_cast<std::size_t>(col)];
    double violation = 0;
    switch (c.sense) {
      case Sense::kLessEqual: violation = activity - c.rhs; break;
      case Sense::kGreaterEqual: violation = c.rhs - activity; break;
      case Sense::kEqual: violation = std::abs(activity - c.rhs); break;
    }
    if (violation > tolerance) out.push_back({c.name, violation});
  }
  return out;
}

EvaluatedSolution extract_solution(const MipModel& m, std::span<const double> values,
                                   const Multigraph& g, const Instance& inst,
                                   ReleaseConvention convention) {
  const int n = m.num_requests();
  if (values.size() != static_cast<std::size_t>(m.num_columns())) {
    throw DecodeError("expected " + std::to_string(m.num_columns()) + " column values, got " +
                      std::to_string(values.size()));
  }
  for (const VariableRef& v : m.variables()) {
    if (v.kind != VarKind::kBinary) continue;
    const double x = values[static_cast<std::size_t>(v.column)];
    if (std::abs(x - std::round(x)) > kIntegralityTolerance) {
      throw DecodeError("fractional value " + format_number(x) + " on " + v.name());
    }
  }
  auto used = [&](ArcId e) { return std::round(values[static_cast<std::size_t>(m.x_column(e))]) == 1.0; };

  std::vector<ArcId> successor(static_cast<std::size_t>(n + 1), -1);
  for (NodeId j = 1; j <= n; ++j) {
    int out_degree = 0, in_degree = 0;
    for (ArcId e : g.out_arcs(j)) {
      if (used(e)) {
        ++out_degree;
        successor[static_cast<std::size_t>(j)] = e;
      }
    }
    for (ArcId e : g.in_arcs(j)) in_degree += used(e) ? 1 : 0;
    if (out_degree == 0 && in_degree == 0) {
      throw DecodeError("node " + std::to_string(j) + " is never visited");
    }
    if (out_degree != 1 || in_degree != 1) {
      throw DecodeError("node " + std::to_string(j) + " has in/out degree " +
                        std::to_string(in_degree) + "/" + std::to_string(out_degree));
    }
  }
  std::vector<ArcId> starts;
  int returns = 0;
  for (ArcId e : g.out_arcs(kDepot)) {
    if (used(e)) starts.push_back(e);
  }
  for (ArcId e : g.in_arcs(kDepot)) returns += used(e) ? 1 : 0;
  if (static_cast<int>(starts.size()) != returns) {
    throw DecodeError("depot out-degree " + std::to_string(starts.size()) +
                      " differs from in-degree " + std::to_string(returns));
  }
  if (static_cast<int>(starts.size()) > inst.fleet_size) {
    throw DecodeError(std::to_string(starts.size()) + " vehicles leave the depot, K = " +
                      std::to_string(inst.fleet_size));
  }

  std::vector<bool> seen(static_cast<std::size_t>(n + 1), false);
  std::vector<Tour> tours;
  std::vector<TourSchedule> schedules;
  auto z = [&](NodeId j) { return values[static_cast<std::size_t>(m.z_column(j))]; };
  for (ArcId start : starts) {
    Tour tour;
    tour.vehicle = static_cast<int>(tours.size()) + 1;
    tour.trips.emplace_back();
    NodeId at = g.arc(start).target;
    while (true) {
      if (seen[static_cast<std::size_t>(at)]) {
        throw DecodeError("node " + std::to_string(at) + " reached twice");
      }
      seen[static_cast<std::size_t>(at)] = true;
      tour.trips.back().nodes.push_back(at);
      const Arc& next = g.arc(successor[static_cast<std::size_t>(at)]);
      if (next.kind == ArcKind::kDepotAdjacent) break;
      if (next.kind == ArcKind::kReplenishment) tour.trips.emplace_back();
      at = next.target;
    }
    TourSchedule s;
    const NodeId first = tour.trips.front().nodes.front();
    s.departure = z(first) - inst.travel(kDepot, first);
    for (const Trip& trip : tour.trips) {
      std::vector<double> visits;
      for (NodeId j : trip.nodes) visits.push_back(z(j));
      s.delivery.push_back(visits.back() + inst.travel(trip.nodes.back(), kDepot));
      s.visit.push_back(std::move(visits));
    }
    tours.push_back(std::move(tour));
    schedules.push_back(std::move(s));
  }
  for (NodeId j = 1; j <= n; ++j) {
    if (!seen[static_cast<std::size_t>(j)]) {
      throw DecodeError("node " + std::to_string(j) + " is not on any tour from the depot");
    }
  }
  return make_solution(std::move(tours), schedules, inst, convention);
}

}  // namespace cdsp
