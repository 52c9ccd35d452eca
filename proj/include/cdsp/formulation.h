// Two-index replenishment-arc MIP for the CDSP.
//
// Columns, in order:
//   x_e      binary,     one per arc id                  [0, 2n^2)
//   y_i_j    binary,     i visited after collecting j    [2n^2, 3n^2)
//   z_j      continuous, visit time                      3n^2 + (j-1)
//   tau_j    continuous, time since shift start          3n^2 + n + (j-1)
//   C_j      continuous, completion (delivery) time      3n^2 + 2n + (j-1)
//
// Windows, y_jj = 1, tau_j >= c_0j and tau_j <= tau_max - c_j0 are column
// bounds by default; ModelOptions::explicit_rows turns them into rows.

#ifndef CDSP_FORMULATION_H_
#define CDSP_FORMULATION_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdsp/instance.h"
#include "cdsp/network.h"
#include "cdsp/solution.h"

namespace cdsp {

enum class VarFamily { kX, kY, kZ, kTau, kCompletion };
enum class VarKind { kBinary, kContinuous };

struct VariableRef {
  VarFamily family = VarFamily::kX;
  int first = 0;   // arc id for x, i for y, j otherwise
  int second = 0;  // j for y, unused otherwise
  int column = 0;
  VarKind kind = VarKind::kBinary;
  double lower = 0;
  double upper = 1;

  std::string name() const;
};

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

enum class RowFamily {
  kDepotBalance,      // depot out-degree equals in-degree
  kFleetLimit,        // depot out-degree <= K
  kVisitOut,          // one outgoing arc per request
  kVisitIn,           // one incoming arc per request
  kTimePropagation,   // z_s + c_e <= z_t + M_e (1 - x_e)
  kCarryPropagation,  // y_sj <= y_tj + 1 - x_e on direct arcs
  kCompletion,        // z_i + c_i0 <= C_j + M_i (1 - y_ij)
  kShiftPropagation,  // tau_s + z_t - z_s <= tau_t + M'_e (1 - x_e)
  // explicit_rows only
  kWindowRelease,
  kWindowDeadline,
  kCollectionStart,
  kShiftStart,
  kShiftCap,
};

std::string_view to_string(RowFamily family);

struct LinearConstraint {
  std::string name;
  RowFamily family = RowFamily::kDepotBalance;
  std::vector<std::pair<int, double>> terms;  // column ascending, no zeros
  Sense sense = Sense::kLessEqual;
  double rhs = 0;
};

struct ModelOptions {
  bool explicit_rows = false;
};

class MipModel {
 public:
  const std::vector<VariableRef>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  // Minimization objective, column ascending.
  const std::vector<std::pair<int, double>>& objective() const { return objective_; }

  const std::string& label() const { return label_; }
  int num_requests() const { return n_; }
  int fleet_size() const { return fleet_size_; }
  bool explicit_rows() const { return explicit_rows_; }

  int num_columns() const { return static_cast<int>(variables_.size()); }
  int num_binaries() const { return 3 * n_ * n_; }
  int num_continuous() const { return 3 * n_; }
  std::size_t count_rows(RowFamily family) const;

  int x_column(ArcId e) const { return e; }
  int y_column(NodeId i, NodeId j) const { return 2 * n_ * n_ + (i - 1) * n_ + (j - 1); }
  int z_column(NodeId j) const { return 3 * n_ * n_ + (j - 1); }
  int tau_column(NodeId j) const { return 3 * n_ * n_ + n_ + (j - 1); }
  int completion_column(NodeId j) const { return 3 * n_ * n_ + 2 * n_ + (j - 1); }

  // Column index for a generated name, -1 if unknown.
  int column_by_name(std::string_view name) const;

 private:
  friend MipModel build_model(const Multigraph& g, const Instance& inst, ModelOptions options);

  std::vector<VariableRef> variables_;
  std::vector<LinearConstraint> constraints_;
  std::vector<std::pair<int, double>> objective_;
  std::string label_;
  int n_ = 0;
  int fleet_size_ = 0;
  bool explicit_rows_ = false;
};

// M_e = max{0, d_s(e) + c_e - r_t(e)}. Only for direct and replenishment arcs.
double big_m_visit(const Arc& e, std::span<const Window> windows);
// M_i = d_i + c_i0.
double big_m_completion(NodeId i, std::span<const Window> windows, const TravelMatrix& travel);
// M'_e = d_t(e) - c_0,t(e). Negative values mean an empty window slipped
// through preprocessing and raise ContractViolation.
double big_m_shift(const Arc& e, std::span<const Window> windows, const TravelMatrix& travel);

MipModel build_model(const Multigraph& g, const Instance& inst, ModelOptions options = {});

// Column values implied by a scheduled solution: x from the routes, y_ij = 1
// iff i follows j (or i = j) within one trip, tau_j = z_j - departure.
std::vector<double> encode_solution(const MipModel& m, const Multigraph& g,
                                    const EvaluatedSolution& sol);

struct RowCheck {
  std::string name;
  double violation = 0;
};

// Bound and row violations larger than tolerance; integrality of binaries
// is checked too.
std::vector<RowCheck> check_assignment(const MipModel& m, std::span<const double> values,
                                       double tolerance = 1e-6);

// Integrality tolerance used when decoding solver output.
inline constexpr double kIntegralityTolerance = 1e-6;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Follows x from the depot into at most K tours, splitting trips at
// replenishment arcs. Visit times come from z; departures are the latest
// ones consistent with z; completion times are recomputed from the trips.
EvaluatedSolution extract_solution(const MipModel& m, std::span<const double> values,
                                   const Multigraph& g, const Instance& inst,
                                   ReleaseConvention convention = ReleaseConvention::kTightened);

}  // namespace cdsp

#endif  // CDSP_FORMULATION_H_
