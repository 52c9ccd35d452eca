// MILP solver adapter contract and the file-based external adapter.

#ifndef CDSP_SOLVER_H_
#define CDSP_SOLVER_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdsp/formulation.h"
#include "cdsp/model_io.h"

namespace cdsp {

enum class SolveStatus {
  kOptimal,
  kFeasibleTimeLimit,
  kInfeasible,
  kNoSolutionTimeLimit,
  kError,
};

std::string_view to_string(SolveStatus status);
std::optional<SolveStatus> parse_solve_status(std::string_view s);

struct SolveLimits {
  double time_limit_seconds = 3600;
  int threads = 16;
  double gap_target = 0;  // relative, 0 asks for proven optimality
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kError;
  std::vector<double> values;      // one per column; empty without incumbent
  std::optional<double> objective;  // incumbent objective
  std::optional<double> bound;      // best dual bound
  double wall_seconds = 0;
  std::string diagnostic;

  bool has_incumbent() const { return !values.empty(); }
};

class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solve must be a stateless call: no state carried between models, time
// and thread limits honored, and the dual bound reported even when no
// incumbent was found.
class SolverAdapter {
 public:
  virtual ~SolverAdapter() = default;
  virtual std::string name() const = 0;
  virtual SolveOutcome solve(const MipModel& m, const SolveLimits& limits) const = 0;
};

// Writes the model to a scratch directory, runs an external command and
// reads back a cdsp solution file:
//
//   # cdsp-solution v1
//   status optimal|feasible-time-limit|infeasible|no-solution-time-limit|error
//   objective <v>     (optional)
//   bound <v>         (optional)
//   seconds <v>       (optional)
//   message <text>    (optional)
//   values <count>
//   <column name> <value>   x count
//
// Command arguments may contain the placeholders {model}, {solution},
// {time_limit}, {threads} and {gap}. The process is killed when it outlives
// the time limit plus grace_seconds.
class ExternalSolverAdapter : public SolverAdapter {
 public:
  struct Options {
    std::vector<std::string> command;
    ModelFormat format = ModelFormat::kMps;
    std::filesystem::path scratch_dir;  // default: system temp directory
    double grace_seconds = 120;
    bool keep_files = false;
  };

  explicit ExternalSolverAdapter(Options options);

  std::string name() const override;
  SolveOutcome solve(const MipModel& m, const SolveLimits& limits) const override;

  const Options& options() const { return options_; }

 private:
  Options options_;
};

// Adapter running the bundled HiGHS wrapper script; the command can be
// replaced through the CDSP_SOLVER_COMMAND environment variable
// (whitespace-separated, placeholders allowed).
ExternalSolverAdapter default_solver_adapter();

// Splits a command line on whitespace (no quoting).
std::vector<std::string> split_command(std::string_view command);

// Parses a solution file; values are mapped onto the model's columns. Columns
// absent from the file default to 0. Unknown names raise DecodeError.
SolveOutcome read_solution_file(std::istream& in, const MipModel& m);

// Validates limits and the adapter, then delegates. Throws ConfigurationError
// when adapter is null or a limit is not positive.
SolveOutcome solve(const MipModel& m, const SolveLimits& limits, const SolverAdapter* adapter);

// (incumbent - bound) / incumbent * 100 for a positive incumbent.
std::optional<double> gap_percent(std::optional<double> incumbent, std::optional<double> bound);

}  // namespace cdsp

#endif  // CDSP_SOLVER_H_
