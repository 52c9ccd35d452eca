#include "cdsp/solution.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cdsp/text.h"

namespace cdsp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Slack for floating-point noise inside the scheduler itself.
constexpr double kScheduleEps = 1e-9;

struct FlatTour {
  std::vector<NodeId> nodes;
  std::vector<double> legs;         // legs[k]: time from nodes[k-1] to nodes[k]
  std::vector<std::size_t> trip_of;
};

FlatTour flatten(const Tour& tour, const Instance& inst) {
  if (tour.trips.empty()) throw ContractViolation("tour without trips");
  FlatTour flat;
  for (std::size_t t = 0; t < tour.trips.size(); ++t) {
    const Trip& trip = tour.trips[t];
    if (trip.nodes.empty()) throw ContractViolation("empty trip in tour");
    for (std::size_t k = 0; k < trip.nodes.size(); ++k) {
      const NodeId j = trip.nodes[k];
      if (j < 1 || j > inst.n()) {
        throw ContractViolation("node " + std::to_string(j) + " is not a point of care");
      }
      if (!flat.nodes.empty()) {
        const NodeId prev = flat.nodes.back();
        flat.legs.push_back(k == 0 ? inst.travel(prev, kDepot) + inst.travel(kDepot, j)
                                   : inst.travel(prev, j));
      } else {
        flat.legs.push_back(0.0);
      }
      flat.nodes.push_back(j);
      flat.trip_of.push_back(t);
    }
  }
  return flat;
}

std::vector<double> earliest_from(const FlatTour& flat, std::span<const Window> windows,
                                  double first_visit) {
  std::vector<double> z(flat.nodes.size());
  z[0] = first_visit;
  for (std::size_t k = 1; k < z.size(); ++k) {
    z[k] = std::max(windows[static_cast<std::size_t>(flat.nodes[k])].release,
                    z[k - 1] + flat.legs[k]);
  }
  return z;
}

TourSchedule assemble(const Tour& tour, const FlatTour& flat, const std::vector<double>& z,
                      const Instance& inst) {
  TourSchedule s;
  s.departure = z.front() - inst.travel(kDepot, flat.nodes.front());
  s.visit.resize(tour.trips.size());
  s.delivery.resize(tour.trips.size());
  for (std::size_t k = 0; k < z.size(); ++k) s.visit[flat.trip_of[k]].push_back(z[k]);
  for (std::size_t t = 0; t < tour.trips.size(); ++t) {
    s.delivery[t] = s.visit[t].back() + inst.travel(tour.trips[t].nodes.back(), kDepot);
  }
  return s;
}

ScheduleResult fail(NodeId node, std::string reason) {
  ScheduleResult r;
  r.failure = {node, std::move(reason)};
  return r;
}

}  // namespace

double TourSchedule::completion_sum() const {
  double sum = 0;
  for (std::size_t t = 0; t < delivery.size(); ++t) {
    sum += static_cast<double>(visit[t].size()) * delivery[t];
  }
  return sum;
}

TourSchedule earliest_schedule(const Tour& tour, const Instance& inst,
                               std::span<const Window> windows) {
  const FlatTour flat = flatten(tour, inst);
  const NodeId first = flat.nodes.front();
  const double start =
      std::max(windows[static_cast<std::size_t>(first)].release, inst.travel(kDepot, first));
  return assemble(tour, flat, earliest_from(flat, windows, start), inst);
}

ScheduleResult schedule_tour(const Tour& tour, const Instance& inst,
                             std::span<const Window> windows) {
  const FlatTour flat = flatten(tour, inst);
  const NodeId first = flat.nodes.front();
  const NodeId last = flat.nodes.back();
  const double lead_in = inst.travel(kDepot, first);
  const double lead_out = inst.travel(last, kDepot);
  auto window = [&](NodeId j) { return windows[static_cast<std::size_t>(j)]; };

  double start = std::max(window(first).release, lead_in);
  std::vector<double> z = earliest_from(flat, windows, start);

  auto first_late = [&]() -> std::optional<std::size_t> {
    for (std::size_t k = 0; k < z.size(); ++k) {
      if (z[k] > window(flat.nodes[k]).deadline + kScheduleEps) return k;
    }
    return std::nullopt;
  };

  // Delaying the first visit only pushes later visits back, so a deadline
  // missed at earliest times cannot be repaired.
  if (auto k = first_late()) {
    return fail(flat.nodes[*k], "deadline of node " + std::to_string(flat.nodes[*k]) +
                                    " missed at earliest arrival");
  }

  const double cap = inst.shift_cap;
  const double shift = z.back() + lead_out - (z.front() - lead_in);
  if (shift > cap + kScheduleEps) {
    double travel_only = lead_in + lead_out;
    for (std::size_t k = 1; k < flat.legs.size(); ++k) travel_only += flat.legs[k];
    if (travel_only > cap + kScheduleEps) {
      return fail(first, "shift cap below pure travel time of the tour");
    }
    // z_last(t) = max(t + travel between first and last, latest_release_chain);
    // the cap requires t >= latest_release_chain - (cap - lead_in - lead_out).
    double chain = -std::numeric_limits<double>::infinity();
    double tail = 0;
    for (std::size_t k = z.size() - 1; k >= 1; --k) {
      chain = std::max(chain, window(flat.nodes[k]).release + tail);
      tail += flat.legs[k];
    }
    start = std::max(start, chain - (cap - lead_in - lead_out));
    z = earliest_from(flat, windows, start);
    if (auto k = first_late()) {
      return fail(flat.nodes[*k], "shift cap forces a late visit at node " +
                                      std::to_string(flat.nodes[*k]));
    }
  }

  if (z.back() + lead_out > inst.depot_deadline + kScheduleEps) {
    return fail(last, "final return after depot deadline");
  }
  ScheduleResult result;
  result.schedule = assemble(tour, flat, z, inst);
  return result;
}

std::string_view to_string(ReleaseConvention c) {
  return c == ReleaseConvention::kTightened ? "tightened" : "raw";
}

namespace {

std::vector<double> releases(const Instance& inst, ReleaseConvention convention) {
  std::vector<double> r(inst.sites.size(), 0.0);
  if (convention == ReleaseConvention::kRaw) {
    for (std::size_t j = 0; j < inst.sites.size(); ++j) r[j] = inst.sites[j].release;
  } else {
    const auto w = tighten_windows(inst);
    for (std::size_t j = 0; j < w.size(); ++j) r[j] = w[j].release;
  }
  return r;
}

}  // namespace

ObjectiveValues evaluate(const EvaluatedSolution& sol, const Instance& inst,
                         ReleaseConvention convention) {
  if (sol.timing.completion.size() != inst.sites.size()) {
    throw ContractViolation("solution is not scheduled");
  }
  const auto r = releases(inst, convention);
  ObjectiveValues v;
  double release_sum = 0;
  for (NodeId j = 1; j <= inst.n(); ++j) {
    const double c = sol.timing.completion[static_cast<std::size_t>(j)];
    if (std::isnan(c)) {
      throw ContractViolation("request " + std::to_string(j) + " has no completion time");
    }
    v.F += c;
    release_sum += r[static_cast<std::size_t>(j)];
  }
  v.F_prime = v.F - release_sum;
  return v;
}

EvaluatedSolution make_solution(std::vector<Tour> tours,
                                std::span<const TourSchedule> schedules,
                                const Instance& inst, ReleaseConvention convention) {
  EvaluatedSolution sol;
  sol.convention = convention;
  sol.timing.visit.assign(inst.sites.size(), kNaN);
  sol.timing.completion.assign(inst.sites.size(), kNaN);
  for (std::size_t v = 0; v < tours.size(); ++v) {
    const TourSchedule& s = schedules[v];
    tours[v].departure = s.departure;
    for (std::size_t t = 0; t < tours[v].trips.size(); ++t) {
      const auto& nodes = tours[v].trips[t].nodes;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto j = static_cast<std::size_t>(nodes[k]);
        sol.timing.visit[j] = s.visit[t][k];
        sol.timing.completion[j] = s.delivery[t];
      }
    }
    sol.timing.delivery.push_back(s.delivery);
  }
  sol.tours = std::move(tours);
  const ObjectiveValues obj = evaluate(sol, inst, convention);
  sol.F = obj.F;
  sol.F_prime = obj.F_prime;
  return sol;
}

std::optional<EvaluatedSolution> schedule_solution(std::vector<Tour> tours,
                                                   const Instance& inst,
                                                   std::span<const Window> windows,
                                                   ReleaseConvention convention,
                                                   ScheduleFailure* failure) {
  std::vector<TourSchedule> schedules;
  schedules.reserve(tours.size());
  for (const Tour& tour : tours) {
    ScheduleResult r = schedule_tour(tour, inst, windows);
    if (!r) {
      if (failure) *failure = r.failure;
      return std::nullopt;
    }
    schedules.push_back(std::move(*r.schedule));
  }
  return make_solution(std::move(tours), schedules, inst, convention);
}

std::string Verdict::summary() const {
  if (valid()) return "valid";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].check << ": " << violations[i].message;
  }
  return out.str();
}

Verdict validate_solution(const EvaluatedSolution& sol, const Instance& inst,
                          std::span<const Window> windows) {
  Verdict verdict;
  auto report = [&](std::string check, std::string message) {
    verdict.violations.push_back({std::move(check), std::move(message)});
  };
  const int n = inst.n();
  const double tol = kTimeTolerance;
  const auto& timing = sol.timing;

  // Partition of P across trips.
  std::vector<int> visits(static_cast<std::size_t>(n + 1), 0);
  for (const Tour& tour : sol.tours) {
    if (tour.trips.empty()) report("structure", "vehicle " + std::to_string(tour.vehicle) + " has no trips");
    for (const Trip& trip : tour.trips) {
      if (trip.nodes.empty()) report("structure", "empty trip on vehicle " + std::to_string(tour.vehicle));
      for (NodeId j : trip.nodes) {
        if (j < 1 || j > n) {
          report("partition", "unknown node " + std::to_string(j));
        } else {
          ++visits[static_cast<std::size_t>(j)];
        }
      }
    }
  }
  for (NodeId j = 1; j <= n; ++j) {
    if (visits[static_cast<std::size_t>(j)] != 1) {
      report("partition", "node " + std::to_string(j) + " visited " +
                              std::to_string(visits[static_cast<std::size_t>(j)]) + " times");
    }
  }

  if (static_cast<int>(sol.tours.size()) > inst.fleet_size) {
    report("fleet", std::to_string(sol.tours.size()) + " tours exceed fleet size " +
                        std::to_string(inst.fleet_size));
  }

  if (timing.visit.size() != inst.sites.size() ||
      timing.completion.size() != inst.sites.size() ||
      timing.delivery.size() != sol.tours.size()) {
    report("timing", "timing tables do not match the instance or tour count");
    return verdict;
  }

  for (std::size_t v = 0; v < sol.tours.size(); ++v) {
    const Tour& tour = sol.tours[v];
    const std::string who = "vehicle " + std::to_string(tour.vehicle);
    if (timing.delivery[v].size() != tour.trips.size()) {
      report("timing", who + ": delivery times do not match trip count");
      continue;
    }
    double clock = tour.departure;
    NodeId at = kDepot;
    bool timed = true;
    for (std::size_t t = 0; t < tour.trips.size() && timed; ++t) {
      const Trip& trip = tour.trips[t];
      for (std::size_t k = 0; k < trip.nodes.size(); ++k) {
        const NodeId j = trip.nodes[k];
        if (j < 1 || j > n) {
          timed = false;
          break;
        }
        const double z = timing.visit[static_cast<std::size_t>(j)];
        if (std::isnan(z)) {
          report("timing", "node " + std::to_string(j) + " has no visit time");
          timed = false;
          break;
        }
        const Window& w = windows[static_cast<std::size_t>(j)];
        if (z < w.release - tol || z > w.deadline + tol) {
          report("window", "node " + std::to_string(j) + " visited at " + format_number(z) +
                               " outside [" + format_number(w.release) + ", " +
                               format_number(w.deadline) + "]");
        }
        const double arrival = clock + inst.travel(at, j);
        if (z < arrival - tol) {
          report("timing", "node " + std::to_string(j) + " visited at " + format_number(z) +
                               " before arrival " + format_number(arrival));
        }
        clock = z;
        at = j;
      }
      if (!timed) break;
      const double delivery = clock + inst.travel(at, kDepot);
      if (std::abs(timing.delivery[v][t] - delivery) > tol) {
        report("completion", who + " trip " + std::to_string(t + 1) + ": recorded delivery " +
                                 format_number(timing.delivery[v][t]) + " != " +
                                 format_number(delivery));
      }
      for (NodeId j : trip.nodes) {
        const double c = timing.completion[static_cast<std::size_t>(j)];
        if (std::isnan(c) || std::abs(c - delivery) > tol) {
          report("completion", "C_" + std::to_string(j) + " = " + format_number(c) +
                                   " differs from trip delivery " + format_number(delivery));
        }
      }
      clock = delivery;
      at = kDepot;
    }
    if (!timed || tour.trips.empty()) continue;
    const double shift = clock - tour.departure;
    if (shift > inst.shift_cap + tol) {
      report("shift", who + " shift " + format_number(shift) + " exceeds cap " +
                          format_number(inst.shift_cap));
    }
    if (clock > inst.depot_deadline + tol) {
      report("depot-deadline", who + " returns at " + format_number(clock) +
                                   " after depot deadline " + format_number(inst.depot_deadline));
    }
  }

  bool complete = true;
  for (NodeId j = 1; j <= n; ++j) {
    if (std::isnan(timing.completion[static_cast<std::size_t>(j)])) complete = false;
  }
  if (complete) {
    const ObjectiveValues recomputed = evaluate(sol, inst, sol.convention);
    if (std::abs(recomputed.F - sol.F) > tol) {
      report("objective", "reported F " + format_number(sol.F) + " != recomputed " +
                              format_number(recomputed.F));
    }
    if (std::abs(recomputed.F_prime - sol.F_prime) > tol) {
      report("objective", "reported F' " + format_number(sol.F_prime) + " != recomputed " +
                              format_number(recomputed.F_prime));
    }
  } else {
    report("objective", "objective undefined: some requests lack completion times");
  }
  return verdict;
}

nlohmann::json solution_to_json(const EvaluatedSolution& sol, const nlohmann::json& fingerprint) {
  nlohmann::json tours = nlohmann::json::array();
  for (std::size_t v = 0; v < sol.tours.size(); ++v) {
    const Tour& tour = sol.tours[v];
    nlohmann::json trips = nlohmann::json::array();
    for (std::size_t t = 0; t < tour.trips.size(); ++t) {
      nlohmann::json visits = nlohmann::json::array();
      for (NodeId j : tour.trips[t].nodes) {
        visits.push_back(sol.timing.visit[static_cast<std::size_t>(j)]);
      }
      trips.push_back({{"nodes", tour.trips[t].nodes},
                       {"visits", visits},
                       {"delivery", sol.timing.delivery.at(v).at(t)}});
    }
    tours.push_back({{"vehicle", tour.vehicle}, {"departure", tour.departure}, {"trips", trips}});
  }
  nlohmann::json completion = nlohmann::json::object();
  for (std::size_t j = 1; j < sol.timing.completion.size(); ++j) {
    completion[std::to_string(j)] = sol.timing.completion[j];
  }
  nlohmann::json doc = {{"tours", tours},
                        {"completion", completion},
                        {"F", sol.F},
                        {"F_prime", sol.F_prime},
                        {"release_convention", to_string(sol.convention)}};
  if (!fingerprint.is_null()) doc["config"] = fingerprint;
  return doc;
}

}  // namespace cdsp
