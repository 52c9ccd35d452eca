#include "cdsp/solver.h"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "cdsp/build_config.h"
#include "cdsp/text.h"

extern char** environ;

namespace cdsp {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasibleTimeLimit: return "feasible-time-limit";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNoSolutionTimeLimit: return "no-solution-time-limit";
    case SolveStatus::kError: return "error";
  }
  return "error";
}

std::optional<SolveStatus> parse_solve_status(std::string_view s) {
  for (auto status : {SolveStatus::kOptimal, SolveStatus::kFeasibleTimeLimit,
                      SolveStatus::kInfeasible, SolveStatus::kNoSolutionTimeLimit,
                      SolveStatus::kError}) {
    if (to_string(status) == s) return status;
  }
  return std::nullopt;
}

std::optional<double> gap_percent(std::optional<double> incumbent, std::optional<double> bound) {
  if (!incumbent || !bound) return std::nullopt;
  if (*incumbent > 0) return std::max(0.0, (*incumbent - *bound) / *incumbent * 100.0);
  if (std::abs(*incumbent - *bound) <= 1e-9) return 0.0;
  return std::nullopt;
}

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> out;
  for (auto token : split_whitespace(command)) out.emplace_back(token);
  return out;
}

SolveOutcome read_solution_file(std::istream& in, const MipModel& m) {
  SolveOutcome outcome;
  std::string line;
  std::size_t number = 0;
  bool have_status = false;
  std::optional<std::size_t> expected_values;
  std::size_t value_lines = 0;
  std::vector<double> values(static_cast<std::size_t>(m.num_columns()), 0.0);

  auto bad = [&](const std::string& what) {
    return DecodeError("solution file line " + std::to_string(number) + ": " + what);
  };
  auto number_of = [&](std::string_view token) {
    auto v = parse_double(token);
    if (!v) {
      if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
      if (token == "-inf") return -std::numeric_limits<double>::infinity();
      throw bad("non-numeric value '" + std::string(token) + "'");
    }
    return *v;
  };

  while (std::getline(in, line)) {
    ++number;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tokens = split_whitespace(t);
    if (expected_values) {
      if (tokens.size() != 2) throw bad("expected '<column> <value>'");
      const int col = m.column_by_name(tokens[0]);
      if (col < 0) throw bad("unknown column '" + std::string(tokens[0]) + "'");
      values[static_cast<std::size_t>(col)] = number_of(tokens[1]);
      ++value_lines;
      continue;
    }
    const auto key = tokens[0];
    if (key == "status") {
      if (tokens.size() != 2) throw bad("malformed status line");
      auto s = parse_solve_status(tokens[1]);
      if (!s) throw bad("unknown status '" + std::string(tokens[1]) + "'");
      outcome.status = *s;
      have_status = true;
    } else if (key == "objective" && tokens.size() == 2) {
      outcome.objective = number_of(tokens[1]);
    } else if (key == "bound" && tokens.size() == 2) {
      const double b = number_of(tokens[1]);
      if (std::isfinite(b)) outcome.bound = b;
    } else if (key == "seconds" && tokens.size() == 2) {
      outcome.wall_seconds = number_of(tokens[1]);
    } else if (key == "message") {
      outcome.diagnostic = std::string(trim(t.substr(7)));
    } else if (key == "values" && tokens.size() == 2) {
      const double count = number_of(tokens[1]);
      if (count < 0 || count != std::floor(count)) throw bad("bad value count");
      expected_values = static_cast<std::size_t>(count);
    } else {
      throw bad("unrecognized line '" + std::string(t) + "'");
    }
  }
  if (!have_status) throw DecodeError("solution file has no status line");
  if (expected_values && value_lines != *expected_values) {
    throw DecodeError("solution file announces " + std::to_string(*expected_values) +
                      " values but has " + std::to_string(value_lines));
  }
  if (value_lines > 0) outcome.values = std::move(values);
  if (outcome.status == SolveStatus::kOptimal && outcome.has_incumbent() && !outcome.bound) {
    outcome.bound = outcome.objective;
  }
  return outcome;
}

namespace {

std::filesystem::path make_scratch_dir(const std::filesystem::path& root) {
  static std::atomic<unsigned> counter{0};
  thread_local std::mt19937_64 rng{std::random_device{}()};
  const auto base = root.empty() ? std::filesystem::temp_directory_path() : root;
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::ostringstream name;
    name << "cdsp-" << ::getpid() << '-' << counter++ << '-' << std::hex << (rng() & 0xffffff);
    auto dir = base / name.str();
    if (std::filesystem::create_directories(dir)) return dir;
  }
  throw std::runtime_error("cannot create scratch directory under " + base.string());
}

std::string replace_all(std::string s, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string tail_of(const std::filesystem::path& path, std::size_t max_bytes = 2000) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  if (text.size() > max_bytes) text = text.substr(text.size() - max_bytes);
  return std::string(trim(text));
}

struct ProcessResult {
  bool started = false;
  bool killed = false;
  int exit_code = -1;
  std::string error;
};

ProcessResult run_process(const std::vector<std::string>& args,
                          const std::filesystem::path& log, double kill_after_seconds) {
  ProcessResult result;
  std::vector<char*> argv;
  argv.reserve(args.size() + 1);
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    result.error = std::string("cannot start '") + args[0] + "': " + std::strerror(rc);
    return result;
  }
  result.started = true;

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration<double>(kill_after_seconds);
  int status = 0;
  while (true) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) {
      result.error = std::string("waitpid failed: ") + std::strerror(errno);
      return result;
    }
    if (std::chrono::steady_clock::now() > deadline) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.killed = true;
      return result;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.error = "solver terminated by signal " + std::to_string(WTERMSIG(status));
  }
  return result;
}

}  // namespace

ExternalSolverAdapter::ExternalSolverAdapter(Options options) : options_(std::move(options)) {
  if (options_.command.empty()) throw ConfigurationError("external solver command is empty");
}

std::string ExternalSolverAdapter::name() const { return "external:" + options_.command.front(); }

SolveOutcome ExternalSolverAdapter::solve(const MipModel& m, const SolveLimits& limits) const {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  SolveOutcome outcome;
  const auto dir = make_scratch_dir(options_.scratch_dir);
  const auto model_path = dir / (std::string("model") + std::string(file_extension(options_.format)));
  const auto solution_path = dir / "solution.sol";
  const auto log_path = dir / "solver.log";

  try {
    emit_model_file(m, options_.format, model_path);
    std::vector<std::string> args;
    for (const std::string& arg : options_.command) {
      std::string a = replace_all(arg, "{model}", model_path.string());
      a = replace_all(a, "{solution}", solution_path.string());
      a = replace_all(a, "{time_limit}", format_number(limits.time_limit_seconds));
      a = replace_all(a, "{threads}", std::to_string(limits.threads));
      a = replace_all(a, "{gap}", format_number(limits.gap_target));
      args.push_back(std::move(a));
    }
    const ProcessResult run =
        run_process(args, log_path, limits.time_limit_seconds + options_.grace_seconds);
    if (run.killed) {
      outcome.status = SolveStatus::kNoSolutionTimeLimit;
      outcome.diagnostic = "solver killed after exceeding time limit plus grace period";
    } else if (!run.started || !run.error.empty()) {
      outcome.status = SolveStatus::kError;
      outcome.diagnostic = run.error;
    } else if (!std::filesystem::exists(solution_path)) {
      outcome.status = SolveStatus::kError;
      outcome.diagnostic = "solver exited with code " + std::to_string(run.exit_code) +
                           " and wrote no solution file: " + tail_of(log_path);
    } else {
      std::ifstream in(solution_path);
      outcome = read_solution_file(in, m);
      if (outcome.status == SolveStatus::kOptimal && !outcome.has_incumbent()) {
        outcome.status = SolveStatus::kError;
        outcome.diagnostic = "solver reported optimal without column values";
      }
    }
  } catch (const std::exception& ex) {
    outcome = SolveOutcome{};
    outcome.status = SolveStatus::kError;
    outcome.diagnostic = ex.what();
  }
  outcome.wall_seconds = elapsed();
  if (!options_.keep_files) {
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
  return outcome;
}

ExternalSolverAdapter default_solver_adapter() {
  ExternalSolverAdapter::Options options;
  if (const char* env = std::getenv("CDSP_SOLVER_COMMAND"); env && *env) {
    options.command = split_command(env);
  } else {
    options.command = {CDSP_PYTHON_EXECUTABLE, CDSP_HIGHS_SCRIPT, "--model", "{model}",
                       "--solution", "{solution}", "--time-limit", "{time_limit}",
                       "--threads", "{threads}", "--gap", "{gap}"};
  }
  return ExternalSolverAdapter(std::move(options));
}

SolveOutcome solve(const MipModel& m, const SolveLimits& limits, const SolverAdapter* adapter) {
  if (adapter == nullptr) throw ConfigurationError("no solver adapter registered");
  if (!(limits.time_limit_seconds > 0)) throw ConfigurationError("time limit must be positive");
  if (limits.threads < 1) throw ConfigurationError("thread cap must be at least 1");
  if (!(limits.gap_target >= 0)) throw ConfigurationError("gap target must be non-negative");
  return adapter->solve(m, limits);
}

}  // namespace cdsp
