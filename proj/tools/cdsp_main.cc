// Command-line front end: solve, suite, emit and oracle.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cdsp/formulation.h"
#include "cdsp/harness.h"
#include "cdsp/instance.h"
#include "cdsp/model_io.h"
#include "cdsp/network.h"
#include "cdsp/oracle.h"
#include "cdsp/solution.h"
#include "cdsp/solver.h"
#include "cdsp/text.h"

namespace {

struct CommonFlags {
  std::optional<int> fleet;
  std::optional<double> shift_cap;
  std::string service_mode = "ignore";
  std::optional<int> rounding;
  bool raw_release = false;
  bool explicit_rows = false;
  std::optional<int> size;
  std::string spatial;
  std::string window;
  std::string label;
};

struct SolverFlags {
  double time_limit = 3600;
  int threads = 16;
  double gap = 0;
  std::string solver_cmd;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--fleet", f.fleet, "Fleet size K (default: size-class rule)");
  app->add_option("--shift-cap", f.shift_cap, "Shift cap (default: depot deadline)");
  app->add_option("--service-mode", f.service_mode, "ignore | fold")
      ->check(CLI::IsMember({"ignore", "fold"}));
  app->add_option("--rounding", f.rounding, "Round travel times to this many decimals");
  app->add_flag("--fprime-raw-release", f.raw_release,
                "Measure F' from the file's release dates instead of tightened ones");
  app->add_flag("--explicit-rows", f.explicit_rows,
                "Write window, deadline and shift-start limits as rows instead of bounds");
}

void add_setting(CLI::App* app, CommonFlags& f) {
  app->add_option("--size", f.size, "Size class used for reporting and the fleet rule");
  app->add_option("--class", f.spatial, "Spatial class C | R | RC");
  app->add_option("--tw", f.window, "Window class tight | wide");
  app->add_option("--label", f.label, "Instance label");
}

void add_solver(CLI::App* app, SolverFlags& s) {
  app->add_option("--time-limit", s.time_limit, "Solver time limit in seconds");
  app->add_option("--threads", s.threads, "Solver thread cap");
  app->add_option("--gap", s.gap, "Relative MIP gap target");
  app->add_option("--solver-cmd", s.solver_cmd,
                  "Solver command with {model} {solution} {time_limit} {threads} {gap}");
}

cdsp::InstanceConfig instance_config(const CommonFlags& f) {
  cdsp::InstanceConfig cfg;
  cfg.fleet_size = f.fleet;
  cfg.shift_cap = f.shift_cap;
  cfg.service_mode = f.service_mode == "fold" ? cdsp::ServiceTimeMode::kFoldIntoOutgoingArcs
                                              : cdsp::ServiceTimeMode::kIgnore;
  cfg.rounding_decimals = f.rounding;
  return cfg;
}

cdsp::Setting setting_of(const CommonFlags& f) {
  cdsp::Setting s;
  s.size = f.size;
  if (!f.spatial.empty()) {
    s.spatial = cdsp::parse_spatial_class(f.spatial);
    if (!s.spatial) throw CLI::ValidationError("--class", "unknown class '" + f.spatial + "'");
  }
  if (!f.window.empty()) {
    s.window = cdsp::parse_window_class(f.window);
    if (!s.window) throw CLI::ValidationError("--tw", "unknown window class '" + f.window + "'");
  }
  return s;
}

cdsp::RunOptions run_options(const CommonFlags& f, const SolverFlags& s) {
  cdsp::RunOptions options;
  options.instance = instance_config(f);
  options.limits.time_limit_seconds = s.time_limit;
  options.limits.threads = s.threads;
  options.limits.gap_target = s.gap;
  options.model.explicit_rows = f.explicit_rows;
  options.fprime = f.raw_release ? cdsp::ReleaseConvention::kRaw
                                 : cdsp::ReleaseConvention::kTightened;
  return options;
}

cdsp::ExternalSolverAdapter make_adapter(const SolverFlags& s) {
  if (s.solver_cmd.empty()) return cdsp::default_solver_adapter();
  cdsp::ExternalSolverAdapter::Options options;
  options.command = cdsp::split_command(s.solver_cmd);
  return cdsp::ExternalSolverAdapter(std::move(options));
}

cdsp::Instance load_instance(const std::string& path, const CommonFlags& f) {
  const cdsp::RawInstance raw = cdsp::parse_solomon_file(path);
  const std::string label = f.label.empty() ? std::filesystem::path(path).stem().string() : f.label;
  return cdsp::build_instance(raw, instance_config(f), setting_of(f), label);
}

void print_run(const cdsp::RunRecord& r) {
  std::cout << "instance   " << r.label << '\n'
            << "status     " << cdsp::to_string(r.status) << '\n';
  if (r.F) std::cout << "F          " << cdsp::format_number(*r.F) << '\n';
  if (r.F_prime) std::cout << "F'         " << cdsp::format_number(*r.F_prime) << '\n';
  if (r.bound) std::cout << "bound      " << cdsp::format_number(*r.bound) << '\n';
  if (r.gap_percent) std::cout << "gap [%]    " << cdsp::format_number(*r.gap_percent) << '\n';
  std::cout << "seconds    " << cdsp::format_number(r.wall_seconds) << '\n';
  if (!r.message.empty()) std::cout << "message    " << r.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Specimen collection and delivery routing with replenishment arcs"};
  app.require_subcommand(1);

  CommonFlags common;
  SolverFlags solver;
  std::string input;
  std::string out_dir;
  std::string format_name;
  int workers = 1;

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one Solomon-format instance");
  solve_cmd->add_option("instance", input, "Instance file")->required();
  solve_cmd->add_option("--out", out_dir, "Directory for solution JSON");
  solve_cmd->add_option("--emit", format_name, "Also write the model as lp or mps");
  add_common(solve_cmd, common);
  add_setting(solve_cmd, common);
  add_solver(solve_cmd, solver);

  CLI::App* suite_cmd = app.add_subcommand("suite", "Solve every instance of a manifest");
  suite_cmd->add_option("manifest", input, "Manifest (.json or .csv)")->required();
  suite_cmd->add_option("--out", out_dir, "Directory for reports and solutions");
  suite_cmd->add_option("--workers", workers, "Instances solved concurrently")
      ->check(CLI::PositiveNumber);
  add_common(suite_cmd, common);
  add_solver(suite_cmd, solver);

  CLI::App* emit_cmd = app.add_subcommand("emit", "Write the MIP model of an instance");
  emit_cmd->add_option("instance", input, "Instance file")->required();
  emit_cmd->add_option("--format", format_name, "lp | mps")->required();
  emit_cmd->add_option("--out", out_dir, "Output file (default: stdout)");
  add_common(emit_cmd, common);
  add_setting(emit_cmd, common);

  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Solve a tiny instance by exhaustive enumeration");
  oracle_cmd->add_option("instance", input, "Instance file")->required();
  add_common(oracle_cmd, common);
  add_setting(oracle_cmd, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      cdsp::RunOptions options = run_options(common, solver);
      if (!out_dir.empty()) options.out_dir = out_dir;
      if (!format_name.empty()) {
        options.emit_format = cdsp::parse_model_format(format_name);
        if (!options.emit_format) throw CLI::ValidationError("--emit", "expected lp or mps");
      }
      cdsp::ManifestEntry entry{input, setting_of(common), common.label};
      const auto adapter = make_adapter(solver);
      const cdsp::RunRecord run = cdsp::run_instance(entry, options, adapter);
      print_run(run);
      if (run.solution) {
        std::cout << cdsp::solution_to_json(*run.solution, cdsp::config_fingerprint(options)).dump(2)
                  << '\n';
      }
      return run.status == cdsp::SolveStatus::kError ? EXIT_FAILURE : EXIT_SUCCESS;
    }
    if (suite_cmd->parsed()) {
      cdsp::RunOptions options = run_options(common, solver);
      if (!out_dir.empty()) options.out_dir = std::filesystem::path(out_dir) / "solutions";
      const auto manifest = cdsp::load_manifest(input);
      const auto adapter = make_adapter(solver);
      const cdsp::BenchmarkReport report = cdsp::run_suite(manifest, options, adapter, workers);
      std::cout << cdsp::report_table(report);
      if (!out_dir.empty()) cdsp::write_report_files(report, out_dir);
      for (const auto& run : report.runs) {
        if (run.status == cdsp::SolveStatus::kError) {
          std::cerr << run.label << ": " << run.message << '\n';
        }
      }
      return report.has_errors() ? EXIT_FAILURE : EXIT_SUCCESS;
    }
    if (emit_cmd->parsed()) {
      const auto format = cdsp::parse_model_format(format_name);
      if (!format) throw CLI::ValidationError("--format", "expected lp or mps");
      const cdsp::Instance inst = load_instance(input, common);
      const cdsp::Multigraph g = cdsp::build_multigraph(inst);
      if (!g.infeasible_nodes().empty()) {
        throw cdsp::InfeasibleInstanceError(g.infeasible_nodes().front());
      }
      cdsp::ModelOptions model_options;
      model_options.explicit_rows = common.explicit_rows;
      const cdsp::MipModel model = cdsp::build_model(g, inst, model_options);
      if (out_dir.empty()) {
        cdsp::emit_model(model, *format, std::cout);
      } else {
        cdsp::emit_model_file(model, *format, out_dir);
      }
      return EXIT_SUCCESS;
    }
    if (oracle_cmd->parsed()) {
      const cdsp::Instance inst = load_instance(input, common);
      const auto windows = cdsp::preprocess_time_windows(inst);
      const auto result = cdsp::exact_solve_tiny(
          inst, windows,
          common.raw_release ? cdsp::ReleaseConvention::kRaw : cdsp::ReleaseConvention::kTightened);
      if (!result.best) {
        std::cout << "status     infeasible\n";
        return EXIT_SUCCESS;
      }
      std::cout << cdsp::solution_to_json(*result.best).dump(2) << '\n';
      return EXIT_SUCCESS;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_SUCCESS;
}
