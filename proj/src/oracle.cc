#include "cdsp/oracle.h"

#include <algorithm>
#include <numeric>
#include <string>

namespace cdsp {

namespace {

constexpr double kTieEps = 1e-9;

// Gap codes between consecutive requests of the visiting order.
enum Gap : int { kSameTrip = 0, kNewTrip = 1, kNewVehicle = 2 };

}  // namespace

std::vector<int> route_encoding(std::span<const Tour> tours) {
  std::vector<int> code;
  for (std::size_t v = 0; v < tours.size(); ++v) {
    if (v) code.push_back(-2);
    for (std::size_t t = 0; t < tours[v].trips.size(); ++t) {
      if (t) code.push_back(-1);
      const auto& nodes = tours[v].trips[t].nodes;
      code.insert(code.end(), nodes.begin(), nodes.end());
    }
  }
  return code;
}

OracleResult exact_solve_tiny(const Instance& inst, std::span<const Window> windows,
                              ReleaseConvention convention) {
  const int n = inst.n();
  if (n > kOracleMaxRequests) {
    throw OracleSizeError("oracle limited to " + std::to_string(kOracleMaxRequests) +
                          " requests, instance has " + std::to_string(n));
  }
  OracleResult result;
  if (n == 0) {
    result.best = make_solution({}, {}, inst, convention);
    result.best_F = 0;
    return result;
  }

  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  int patterns = 1;
  for (int k = 1; k < n; ++k) patterns *= 3;

  std::vector<int> gaps(static_cast<std::size_t>(n - 1));
  std::vector<Tour> tours;
  std::vector<TourSchedule> schedules;
  std::vector<int> best_code;
  std::vector<Tour> best_tours;
  std::vector<TourSchedule> best_schedules;

  do {
    for (int pattern = 0; pattern < patterns; ++pattern) {
      int code = pattern;
      int vehicles = 1;
      bool canonical = true;
      NodeId last_first = order[0];
      for (std::size_t g = 0; g < gaps.size(); ++g) {
        gaps[g] = code % 3;
        code /= 3;
        if (gaps[g] == kNewVehicle) {
          ++vehicles;
          if (order[g + 1] < last_first) canonical = false;
          last_first = order[g + 1];
        }
      }
      if (vehicles > inst.fleet_size || !canonical) continue;
      ++result.enumerated;

      tours.clear();
      tours.push_back(Tour{1, {Trip{{order[0]}}}, 0.0});
      for (std::size_t g = 0; g < gaps.size(); ++g) {
        const NodeId next = order[g + 1];
        if (gaps[g] == kNewVehicle) {
          tours.push_back(Tour{static_cast<int>(tours.size()) + 1, {Trip{{next}}}, 0.0});
        } else if (gaps[g] == kNewTrip) {
          tours.back().trips.push_back(Trip{{next}});
        } else {
          tours.back().trips.back().nodes.push_back(next);
        }
      }

      schedules.clear();
      double total = 0;
      bool feasible = true;
      for (const Tour& tour : tours) {
        ScheduleResult r = schedule_tour(tour, inst, windows);
        if (!r) {
          feasible = false;
          break;
        }
        total += r.schedule->completion_sum();
        if (total > result.best_F + kTieEps) {
          feasible = false;
          break;
        }
        schedules.push_back(std::move(*r.schedule));
      }
      if (!feasible) continue;

      const bool better = total < result.best_F - kTieEps;
      if (better || std::abs(total - result.best_F) <= kTieEps) {
        std::vector<int> encoded = route_encoding(tours);
        if (better || encoded < best_code) {
          result.best_F = total;
          best_code = std::move(encoded);
          best_tours = tours;
          best_schedules = schedules;
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));

  if (!best_tours.empty()) {
    result.best = make_solution(std::move(best_tours), best_schedules, inst, convention);
    result.best_F = result.best->F;
  }
  return result;
}

}  // namespace cdsp
