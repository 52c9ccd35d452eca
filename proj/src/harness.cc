#include "cdsp/harness.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cdsp/network.h"
#include "cdsp/text.h"

namespace cdsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string file_safe(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return s.empty() ? "instance" : s;
}

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string csv_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

nlohmann::json setting_json(const Setting& s) {
  return {{"size", s.size ? nlohmann::json(*s.size) : nlohmann::json(nullptr)},
          {"class", s.spatial ? nlohmann::json(std::string(to_string(*s.spatial)))
                              : nlohmann::json(nullptr)},
          {"tw", s.window ? nlohmann::json(std::string(to_string(*s.window)))
                          : nlohmann::json(nullptr)}};
}

}  // namespace

bool BenchmarkReport::has_errors() const {
  for (const RunRecord& r : runs) {
    if (r.status == SolveStatus::kError) return true;
  }
  return false;
}

nlohmann::json config_fingerprint(const RunOptions& options) {
  const InstanceConfig& cfg = options.instance;
  nlohmann::json fp;
  fp["rounding"] = cfg.rounding_decimals
                       ? "fixed-decimal(" + std::to_string(*cfg.rounding_decimals) + ")"
                       : std::string("none");
  fp["service_mode"] = cfg.service_mode == ServiceTimeMode::kIgnore ? "ignore"
                                                                     : "fold_into_outgoing_arcs";
  fp["fleet_rule"] = cfg.fleet_size ? "explicit(" + std::to_string(*cfg.fleet_size) + ")"
                                    : std::string("size-class(25:10,50:15,100:25)");
  fp["shift_cap_rule"] = cfg.shift_cap ? "explicit(" + format_number(*cfg.shift_cap) + ")"
                                       : std::string("depot-deadline");
  fp["fprime_release"] = std::string(to_string(options.fprime));
  fp["gap_convention"] = "(incumbent F - bound) / incumbent F * 100";
  fp["model_rows"] = options.model.explicit_rows ? "explicit" : "bounds";
  fp["time_limit_s"] = options.limits.time_limit_seconds;
  fp["threads"] = options.limits.threads;
  fp["gap_target"] = options.limits.gap_target;
  return fp;
}

RunRecord run_instance(const ManifestEntry& entry, const RunOptions& options,
                       const SolverAdapter& adapter) {
  RunRecord rec;
  rec.label = entry.label.empty() ? entry.path.stem().string() : entry.label;
  rec.setting = entry.setting;
  const auto start = Clock::now();
  try {
    const RawInstance raw = parse_solomon_file(entry.path);
    const Instance inst = build_instance(raw, options.instance, entry.setting, rec.label);
    const Multigraph g = build_multigraph(inst);
    if (!g.infeasible_nodes().empty()) {
      rec.build_seconds = seconds_since(start);
      rec.status = SolveStatus::kInfeasible;
      rec.message = InfeasibleInstanceError(g.infeasible_nodes().front()).what();
      return rec;
    }
    const MipModel model = build_model(g, inst, options.model);
    rec.build_seconds = seconds_since(start);

    if (options.out_dir) std::filesystem::create_directories(*options.out_dir);
    if (options.out_dir && options.emit_format) {
      emit_model_file(model, *options.emit_format,
                      *options.out_dir / (file_safe(rec.label) +
                                          std::string(file_extension(*options.emit_format))));
    }

    const SolveOutcome outcome = solve(model, options.limits, &adapter);
    rec.status = outcome.status;
    rec.wall_seconds = outcome.wall_seconds;
    rec.bound = outcome.bound;
    rec.solver_objective = outcome.objective;
    rec.message = outcome.diagnostic;
    if (outcome.has_incumbent()) {
      EvaluatedSolution sol =
          extract_solution(model, outcome.values, g, inst, options.fprime);
      const Verdict verdict = validate_solution(sol, inst, g.windows());
      if (!verdict.valid()) {
        rec.status = SolveStatus::kError;
        rec.message = "incumbent failed validation: " + verdict.summary();
        return rec;
      }
      if (outcome.status == SolveStatus::kOptimal && outcome.objective &&
          std::abs(*outcome.objective - sol.F) > 1e-6 * std::max(1.0, std::abs(sol.F))) {
        rec.status = SolveStatus::kError;
        rec.message = "decoded objective " + format_number(sol.F) +
                      " differs from solver objective " + format_number(*outcome.objective);
        return rec;
      }
      rec.F = sol.F;
      rec.F_prime = sol.F_prime;
      rec.gap_percent = gap_percent(outcome.objective, outcome.bound);
      if (options.out_dir) {
        std::ofstream out(*options.out_dir / (file_safe(rec.label) + ".solution.json"));
        out << solution_to_json(sol, config_fingerprint(options)).dump(2) << '\n';
      }
      rec.solution = std::move(sol);
    }
  } catch (const std::exception& ex) {
    rec.status = SolveStatus::kError;
    rec.message = ex.what();
    if (rec.build_seconds == 0) rec.build_seconds = seconds_since(start);
  }
  return rec;
}

BenchmarkReport aggregate(std::vector<RunRecord> runs, nlohmann::json fingerprint) {
  struct Sums {
    SettingAggregate agg;
    double fprime = 0, gap = 0, seconds = 0;
  };
  std::map<Setting, Sums> groups;
  for (const RunRecord& r : runs) {
    Sums& s = groups[r.setting];
    s.agg.setting = r.setting;
    ++s.agg.instances;
    switch (r.status) {
      case SolveStatus::kOptimal: ++s.agg.optimal; break;
      case SolveStatus::kFeasibleTimeLimit: ++s.agg.time_limit; break;
      case SolveStatus::kNoSolutionTimeLimit:
        ++s.agg.time_limit;
        ++s.agg.no_solution;
        break;
      case SolveStatus::kInfeasible: ++s.agg.infeasible; break;
      case SolveStatus::kError: ++s.agg.errors; break;
    }
    if (r.status == SolveStatus::kError) continue;
    if (r.F_prime) {
      s.fprime += *r.F_prime;
      ++s.agg.fprime_count;
    }
    if (r.gap_percent) {
      s.gap += *r.gap_percent;
      ++s.agg.gap_count;
    }
    s.seconds += r.wall_seconds;
    ++s.agg.time_count;
  }
  BenchmarkReport report;
  for (auto& [setting, s] : groups) {
    if (s.agg.fprime_count) s.agg.avg_fprime = s.fprime / s.agg.fprime_count;
    if (s.agg.gap_count) s.agg.avg_gap = s.gap / s.agg.gap_count;
    if (s.agg.time_count) s.agg.avg_seconds = s.seconds / s.agg.time_count;
    report.settings.push_back(s.agg);
  }
  report.runs = std::move(runs);
  report.fingerprint = std::move(fingerprint);
  return report;
}

BenchmarkReport run_suite(const std::vector<ManifestEntry>& manifest, const RunOptions& options,
                          const SolverAdapter& adapter, int workers) {
  std::vector<RunRecord> runs(manifest.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < manifest.size(); i = next++) {
      runs[i] = run_instance(manifest[i], options, adapter);
    }
  };
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(manifest.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < count; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return aggregate(std::move(runs), config_fingerprint(options));
}

std::string report_table(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-14s %10s %7s %9s %9s %5s %5s\n", "setting", "Avg F'",
                "(of)", "Avg gap", "Avg T[s]", "#opt", "#TL");
  out << line;
  for (const SettingAggregate& s : report.settings) {
    const std::string fprime = s.avg_fprime ? fixed(*s.avg_fprime, 2) : "";
    const std::string of = std::to_string(s.fprime_count) + "/" + std::to_string(s.instances);
    const std::string gap = s.avg_gap ? fixed(*s.avg_gap, 2) + " %" : "";
    const std::string secs = s.avg_seconds ? fixed(*s.avg_seconds, 1) : "";
    std::snprintf(line, sizeof(line), "%-14s %10s %7s %9s %9s %5d %5d\n",
                  s.setting.key().c_str(), fprime.c_str(), of.c_str(), gap.c_str(), secs.c_str(),
                  s.optimal, s.time_limit);
    out << line;
  }
  return out.str();
}

void write_report_csv(const BenchmarkReport& report, std::ostream& out) {
  out << '#' << kReportSchema
      << ",size,class,tw,instances,fprime_count,avg_fprime,gap_count,avg_gap_percent,"
         "avg_seconds,optimal,time_limit,no_solution,infeasible,errors\n";
  for (const SettingAggregate& s : report.settings) {
    out << s.setting.key() << ',' << (s.setting.size ? std::to_string(*s.setting.size) : "")
        << ',' << (s.setting.spatial ? to_string(*s.setting.spatial) : "") << ','
        << (s.setting.window ? to_string(*s.setting.window) : "") << ',' << s.instances << ','
        << s.fprime_count << ',' << csv_number(s.avg_fprime) << ',' << s.gap_count << ','
        << csv_number(s.avg_gap) << ',' << csv_number(s.avg_seconds) << ',' << s.optimal << ','
        << s.time_limit << ',' << s.no_solution << ',' << s.infeasible << ',' << s.errors << '\n';
  }
}

void write_runs_csv(const BenchmarkReport& report, std::ostream& out) {
  out << '#' << kReportSchema
      << ",setting,status,F,F_prime,gap_percent,solver_objective,bound,wall_seconds,"
         "build_seconds\n";
  for (const RunRecord& r : report.runs) {
    out << r.label << ',' << r.setting.key() << ',' << to_string(r.status) << ','
        << csv_number(r.F) << ',' << csv_number(r.F_prime) << ',' << csv_number(r.gap_percent)
        << ',' << csv_number(r.solver_objective) << ',' << csv_number(r.bound) << ','
        << format_number(r.wall_seconds) << ',' << format_number(r.build_seconds) << '\n';
  }
}

nlohmann::json run_to_json(const RunRecord& r) {
  return {{"label", r.label},
          {"setting", setting_json(r.setting)},
          {"status", std::string(to_string(r.status))},
          {"F", optional_number(r.F)},
          {"F_prime", optional_number(r.F_prime)},
          {"gap_percent", optional_number(r.gap_percent)},
          {"solver_objective", optional_number(r.solver_objective)},
          {"bound", optional_number(r.bound)},
          {"wall_seconds", r.wall_seconds},
          {"build_seconds", r.build_seconds},
          {"message", r.message}};
}

nlohmann::json report_to_json(const BenchmarkReport& report) {
  nlohmann::json settings = nlohmann::json::array();
  for (const SettingAggregate& s : report.settings) {
    settings.push_back({{"setting", setting_json(s.setting)},
                        {"key", s.setting.key()},
                        {"instances", s.instances},
                        {"fprime_count", s.fprime_count},
                        {"avg_fprime", optional_number(s.avg_fprime)},
                        {"gap_count", s.gap_count},
                        {"avg_gap_percent", optional_number(s.avg_gap)},
                        {"avg_seconds", optional_number(s.avg_seconds)},
                        {"optimal", s.optimal},
                        {"time_limit", s.time_limit},
                        {"no_solution", s.no_solution},
                        {"infeasible", s.infeasible},
                        {"errors", s.errors}});
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const RunRecord& r : report.runs) runs.push_back(run_to_json(r));
  return {{"schema", std::string(kReportSchema)},
          {"config", report.fingerprint},
          {"settings", settings},
          {"runs", runs}};
}

void write_report_files(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.csv");
    write_report_csv(report, out);
  }
  {
    std::ofstream out(dir / "runs.csv");
    write_runs_csv(report, out);
  }
  std::ofstream out(dir / "report.json");
  out << report_to_json(report).dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write report files under " + dir.string());
}

}  // namespace cdsp
