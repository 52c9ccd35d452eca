// Multi-trip tours, their timing, feasibility checks and objective values.

#ifndef CDSP_SOLUTION_H_
#define CDSP_SOLUTION_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdsp/instance.h"
#include "cdsp/network.h"
#include "json.hpp"

namespace cdsp {

// Absolute tolerance for every time comparison in validation.
inline constexpr double kTimeTolerance = 1e-6;

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Points of care visited between two consecutive depot visits.
struct Trip {
  std::vector<NodeId> nodes;
  friend bool operator==(const Trip&, const Trip&) = default;
};

struct Tour {
  int vehicle = 0;
  std::vector<Trip> trips;
  double departure = 0;  // first depot departure; set by scheduling
};

struct TourSchedule {
  double departure = 0;
  std::vector<std::vector<double>> visit;  // visit[trip][k] = z of trips[trip].nodes[k]
  std::vector<double> delivery;            // depot return time of each trip

  double final_return() const { return delivery.empty() ? departure : delivery.back(); }
  double shift() const { return final_return() - departure; }
  // Sum over trips of (requests in trip) x (delivery time).
  double completion_sum() const;
};

struct ScheduleFailure {
  NodeId node = 0;
  std::string reason;
};

struct ScheduleResult {
  std::optional<TourSchedule> schedule;
  ScheduleFailure failure;  // meaningful only when schedule is empty

  explicit operator bool() const { return schedule.has_value(); }
};

// Visit times minimizing the tour's total delivery time under the windows
// and the shift cap. Vehicles wait at points of care when early; the first
// departure is as late as possible without delaying any visit.
//
// Without the shift cap, earliest start times are optimal. The shift equals
// z_last + c_last0 - (z_first - c_0first) and only z_first is free to trade
// against it: every later visit is the earliest one given z_first, so the
// smallest z_first that meets the cap is optimal.
ScheduleResult schedule_tour(const Tour& tour, const Instance& inst,
                             std::span<const Window> windows);

// Earliest-time forward pass that ignores deadlines and the shift cap.
// Validation uses it to build schedules for infeasible routes.
TourSchedule earliest_schedule(const Tour& tour, const Instance& inst,
                               std::span<const Window> windows);

struct Timing {
  std::vector<double> visit;       // z_j per node, NaN when not visited
  std::vector<double> completion;  // C_j per node, NaN when not visited
  std::vector<std::vector<double>> delivery;  // [tour][trip]
};

// Which release times F' subtracts.
enum class ReleaseConvention { kTightened, kRaw };

std::string_view to_string(ReleaseConvention c);

struct EvaluatedSolution {
  std::vector<Tour> tours;
  Timing timing;
  double F = 0;
  double F_prime = 0;
  ReleaseConvention convention = ReleaseConvention::kTightened;
};

struct ObjectiveValues {
  double F = 0;
  double F_prime = 0;
};

// F = sum C_j; F' = F - sum r_j. Throws ContractViolation when some request
// has no completion time.
ObjectiveValues evaluate(const EvaluatedSolution& sol, const Instance& inst,
                         ReleaseConvention convention = ReleaseConvention::kTightened);

// Assembles tours with schedules into a solution, computing timing and
// objectives.
EvaluatedSolution make_solution(std::vector<Tour> tours,
                                std::span<const TourSchedule> schedules,
                                const Instance& inst,
                                ReleaseConvention convention = ReleaseConvention::kTightened);

// schedule_tour on every tour; nullopt (with failure filled) if any fails.
std::optional<EvaluatedSolution> schedule_solution(
    std::vector<Tour> tours, const Instance& inst, std::span<const Window> windows,
    ReleaseConvention convention = ReleaseConvention::kTightened,
    ScheduleFailure* failure = nullptr);

struct Violation {
  std::string check;
  std::string message;
};

struct Verdict {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string summary() const;
};

// Runs every feasibility check and reports all violations found.
Verdict validate_solution(const EvaluatedSolution& sol, const Instance& inst,
                          std::span<const Window> windows);

nlohmann::json solution_to_json(const EvaluatedSolution& sol,
                                const nlohmann::json& fingerprint = {});

}  // namespace cdsp

#endif  // CDSP_SOLUTION_H_
