// Exhaustive solver for instances with at most seven requests.

#ifndef CDSP_ORACLE_H_
#define CDSP_ORACLE_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cdsp/instance.h"
#include "cdsp/network.h"
#include "cdsp/solution.h"

namespace cdsp {

inline constexpr int kOracleMaxRequests = 7;

class OracleSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OracleResult {
  std::optional<EvaluatedSolution> best;
  double best_F = std::numeric_limits<double>::infinity();
  std::uint64_t enumerated = 0;  // candidates timed
};

// Enumerates every visiting order of P, every way of cutting it into at most
// K vehicles and every trip split inside a vehicle, times each vehicle with
// schedule_tour and keeps the cheapest feasible candidate. Vehicles are
// identical, so only candidates whose vehicles appear in increasing order of
// their first request are timed. Ties go to the smallest route_encoding().
OracleResult exact_solve_tiny(const Instance& inst, std::span<const Window> windows,
                              ReleaseConvention convention = ReleaseConvention::kTightened);

// Tours flattened to node ids with -1 between trips and -2 between vehicles.
std::vector<int> route_encoding(std::span<const Tour> tours);

}  // namespace cdsp

#endif  // CDSP_ORACLE_H_
