// Benchmark runner: one instance end to end, suites, and report output.

#ifndef CDSP_HARNESS_H_
#define CDSP_HARNESS_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cdsp/formulation.h"
#include "cdsp/instance.h"
#include "cdsp/model_io.h"
#include "cdsp/solution.h"
#include "cdsp/solver.h"
#include "json.hpp"

namespace cdsp {

inline constexpr std::string_view kReportSchema = "cdsp-report-v1";

struct RunOptions {
  InstanceConfig instance;
  SolveLimits limits;
  ModelOptions model;
  ReleaseConvention fprime = ReleaseConvention::kTightened;
  // When set, per-instance solution JSON goes here.
  std::optional<std::filesystem::path> out_dir;
  // Also write the model file next to the solution JSON.
  std::optional<ModelFormat> emit_format;
};

struct RunRecord {
  std::string label;
  Setting setting;
  SolveStatus status = SolveStatus::kError;
  std::optional<double> F;
  std::optional<double> F_prime;
  std::optional<double> gap_percent;
  std::optional<double> solver_objective;
  std::optional<double> bound;
  double wall_seconds = 0;   // solver call
  double build_seconds = 0;  // parse through model generation
  std::string message;
  std::optional<EvaluatedSolution> solution;
};

struct SettingAggregate {
  Setting setting;
  int instances = 0;
  int fprime_count = 0;  // divisor of avg_fprime
  std::optional<double> avg_fprime;
  int gap_count = 0;
  std::optional<double> avg_gap;
  int time_count = 0;
  std::optional<double> avg_seconds;
  int optimal = 0;
  int time_limit = 0;   // both time-limit statuses
  int no_solution = 0;  // subset of time_limit without incumbent
  int infeasible = 0;
  int errors = 0;
};

struct BenchmarkReport {
  std::vector<SettingAggregate> settings;  // ordered by (size, class, TW)
  std::vector<RunRecord> runs;             // manifest order
  nlohmann::json fingerprint;

  bool has_errors() const;
};

nlohmann::json config_fingerprint(const RunOptions& options);

// parse -> build -> preprocess -> model -> solve -> decode -> validate ->
// evaluate. Failures become status = error with a message; an incumbent
// that fails validation is reported as an error, never as a solution.
RunRecord run_instance(const ManifestEntry& entry, const RunOptions& options,
                       const SolverAdapter& adapter);

BenchmarkReport aggregate(std::vector<RunRecord> runs, nlohmann::json fingerprint);

BenchmarkReport run_suite(const std::vector<ManifestEntry>& manifest, const RunOptions& options,
                          const SolverAdapter& adapter, int workers);

std::string report_table(const BenchmarkReport& report);
void write_report_csv(const BenchmarkReport& report, std::ostream& out);
void write_runs_csv(const BenchmarkReport& report, std::ostream& out);
nlohmann::json report_to_json(const BenchmarkReport& report);
nlohmann::json run_to_json(const RunRecord& run);

// report.csv, runs.csv and report.json under dir.
void write_report_files(const BenchmarkReport& report, const std::filesystem::path& dir);

}  // namespace cdsp

#endif  // CDSP_HARNESS_H_
