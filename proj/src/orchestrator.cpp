// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anytime/orchestrator.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

#include "anytime/errors.hpp"

extern char** environ;

namespace fs = std::filesystem;

namespace anytime {

std::string_view to_string(ExitKind kind) {
  switch (kind) {
    case ExitKind::kCleanFinish: return "clean_finish";
    case ExitKind::kBudgetKill: return "budget_kill";
    case ExitKind::kCrash: return "crash";
    case ExitKind::kProtocolViolation: return "protocol_violation";
  }
  return "crash";
}

std::optional<ExitKind> parse_exit_kind(std::string_view text) {
  for (ExitKind k : {ExitKind::kCleanFinish, ExitKind::kBudgetKill,
                     ExitKind::kCrash, ExitKind::kProtocolViolation}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

void RunConfig::validate() const {
  const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(budget)) throw InvalidConfig("budget must be positive");
  if (!positive(poll_interval)) {
    throw InvalidConfig("poll_interval must be positive");
  }
  if (!positive(grace_period)) {
    throw InvalidConfig("grace_period must be positive");
  }
  if (grace_period > budget) {
    throw InvalidConfig("grace_period must not exceed the budget");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double wall_now() {
  return std::chrono::duration<double>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Builds "KEY=VALUE" strings: inherited environment, then the command's own
// variables, then the protocol variables.
std::vector<std::string> build_environment(const TaskBundle& task,
                                           const SolverCommand& solver,
                                           const RunConfig& config,
                                           const fs::path& prediction_dir) {
  std::map<std::string, std::string> env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env[std::string(entry.substr(0, eq))] = std::string(entry.substr(eq + 1));
  }
  for (const auto& [k, v] : solver.env) env[k] = v;
  env[std::string(kEnvTaskDir)] = fs::absolute(task.training_path).string();
  env[std::string(kEnvPredictionDir)] = fs::absolute(prediction_dir).string();
  env[std::string(kEnvBudget)] = format_real(config.budget);
  env[std::string(kEnvNTest)] = std::to_string(task.metadata.n_test);
  env[std::string(kEnvNClasses)] = std::to_string(task.metadata.n_classes);
  std::vector<std::string> out;
  out.reserve(env.size());
  for (const auto& [k, v] : env) out.push_back(k + "=" + v);
  return out;
}

std::vector<char*> c_strings(std::vector<std::string>& strings) {
  std::vector<char*> out;
  out.reserve(strings.size() + 1);
  for (std::string& s : strings) out.push_back(s.data());
  out.push_back(nullptr);
  return out;
}

pid_t launch(const SolverCommand& solver, std::vector<std::string> env) {
  if (solver.argv.empty()) throw LaunchFailure("solver command is empty");
  std::vector<std::string> argv_storage = solver.argv;
  std::vector<char*> argv = c_strings(argv_storage);
  std::vector<char*> envp = c_strings(env);
  const std::string workdir = solver.workdir.string();

  // The child reports exec failures through a close-on-exec pipe.
  int status_pipe[2];
  if (pipe2(status_pipe, O_CLOEXEC) != 0) {
    throw LaunchFailure(std::string("pipe: ") + std::strerror(errno));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(status_pipe[0]);
    close(status_pipe[1]);
    throw LaunchFailure(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    close(status_pipe[0]);
    int err = 0;
    if (!workdir.empty() && chdir(workdir.c_str()) != 0) {
      err = errno;
    } else {
      execvpe(argv[0], argv.data(), envp.data());
      err = errno;
    }
    [[maybe_unused]] auto n = write(status_pipe[1], &err, sizeof(err));
    _exit(127);
  }
  setpgid(pid, pid);
  close(status_pipe[1]);
  int child_errno = 0;
  ssize_t n = 0;
  do {
    n = read(status_pipe[0], &child_errno, sizeof(child_errno));
  } while (n < 0 && errno == EINTR);
  close(status_pipe[0]);
  if (n > 0) {
    waitpid(pid, nullptr, 0);
    throw LaunchFailure("cannot launch '" + solver.argv[0] + "'" +
                        (workdir.empty() ? "" : " in " + workdir) + ": " +
                        std::strerror(child_errno));
  }
  return pid;
}

RunExit exit_from_status(int status) {
  if (WIFEXITED(status)) {
    const int code = WEXITSTATUS(status);
    if (code == 0) return {ExitKind::kCleanFinish, 0, {}};
    return {ExitKind::kCrash, code, {}};
  }
  if (WIFSIGNALED(status)) return {ExitKind::kCrash, 128 + WTERMSIG(status), {}};
  return {ExitKind::kCrash, -1, {}};
}

// Watches the shared directory and turns newly visible prediction files
// into events or violations. Only this object appends to the run record.
class PredictionWatcher {
 public:
  PredictionWatcher(const TaskBundle& task, const RunConfig& config,
                    fs::path dir, RunRecord& record)
      : task_(task), config_(config), dir_(std::move(dir)), record_(record) {}

  // Returns false when the solver broke the protocol and must be stopped.
  bool scan(double timestamp) {
    struct Fresh {
      std::size_t index;
      fs::path path;
    };
    std::vector<Fresh> fresh;
    bool ok = true;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir_, ec)) {
      const std::string name = entry.path().filename().string();
      if (name == kEndSignalFile && !end_written_) {
        if (!reported_end_forgery_) {
          record_.violations.push_back(
              {timestamp, "solver wrote the reserved file end.txt"});
          reported_end_forgery_ = true;
        }
        ok = false;
        continue;
      }
      const auto index = parse_prediction_file_name(name);
      if (!index) continue;
      const auto mtime = fs::last_write_time(entry.path(), ec);
      if (ec) continue;
      auto [it, inserted] = seen_.try_emplace(name, mtime);
      if (!inserted) {
        if (it->second != mtime) {
          it->second = mtime;
          record_.violations.push_back(
              {timestamp, name + " was rewritten; only the first version "
                                 "is scored"});
        }
        continue;
      }
      fresh.push_back({*index, entry.path()});
    }
    std::sort(fresh.begin(), fresh.end(),
              [](const Fresh& a, const Fresh& b) { return a.index < b.index; });
    for (const Fresh& f : fresh) {
      if (timestamp > config_.budget) continue;
      try {
        PredictionEvent event;
        event.timestamp = timestamp;
        event.document = parse_predictions(f.path, task_.metadata);
        record_.events.push_back(std::move(event));
      } catch (const Error& e) {
        record_.violations.push_back({timestamp, e.what()});
      }
    }
    return ok;
  }

  void write_end_signal(double duration) {
    end_written_ = true;
    try {
      write_file_atomic(dir_ / kEndSignalFile, format_real(duration) + "\n");
    } catch (const Error& e) {
      record_.violations.push_back({duration, e.what()});
    }
  }

 private:
  const TaskBundle& task_;
  const RunConfig& config_;
  fs::path dir_;
  RunRecord& record_;
  std::map<std::string, fs::file_time_type> seen_;
  bool end_written_ = false;
  bool reported_end_forgery_ = false;
};

std::optional<int> try_reap(pid_t pid) {
  int status = 0;
  pid_t r = 0;
  do {
    r = waitpid(pid, &status, WNOHANG);
  } while (r < 0 && errno == EINTR);
  if (r == pid) return status;
  return std::nullopt;
}

// SIGTERM to the process group, then SIGKILL at `hard_deadline`.
void terminate_group(pid_t pid, Clock::time_point hard_deadline) {
  kill(-pid, SIGTERM);
  while (Clock::now() < hard_deadline) {
    if (try_reap(pid)) {
      kill(-pid, SIGKILL);  // stray grandchildren
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  kill(-pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
}

}  // namespace

RunRecord run_solver(const TaskBundle& task, const SolverCommand& solver,
                     const RunConfig& config, const fs::path& prediction_dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(prediction_dir, ec);
  if (ec) {
    throw IoError("cannot create prediction directory " +
                  prediction_dir.string() + ": " + ec.message());
  }
  if (!fs::is_empty(prediction_dir)) {
    throw InvalidConfig("prediction directory is not empty: " +
                        prediction_dir.string());
  }

  RunRecord record;
  PredictionWatcher watcher(task, config, prediction_dir, record);
  auto env = build_environment(task, solver, config, prediction_dir);

  record.started_at = wall_now();
  const Clock::time_point start = Clock::now();
  const pid_t pid = launch(solver, std::move(env));
  const auto budget_deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(config.budget));
  const auto hard_deadline =
      budget_deadline + std::chrono::duration_cast<Clock::duration>(
                            std::chrono::duration<double>(config.grace_period));
  const auto poll = std::chrono::duration_cast<Clock::duration>(
      std::chrono::duration<double>(config.poll_interval));

  for (;;) {
    const auto status = try_reap(pid);
    // Files renamed just before exit are still picked up by this scan.
    const bool ok = watcher.scan(seconds_since(start));
    if (status) {
      record.exit = exit_from_status(*status);
      kill(-pid, SIGKILL);
      break;
    }
    if (!ok) {
      record.exit = {ExitKind::kProtocolViolation, 0, "reserved_file"};
      terminate_group(pid, std::min(hard_deadline,
                                    Clock::now() + std::chrono::seconds(1)));
      break;
    }
    const auto now = Clock::now();
    if (now >= budget_deadline) {
      watcher.write_end_signal(seconds_since(start));
      terminate_group(pid, hard_deadline);
      record.exit = {ExitKind::kBudgetKill, 0, {}};
      break;
    }
    std::this_thread::sleep_until(std::min(now + poll, budget_deadline));
  }
  record.ended_at = record.started_at + seconds_since(start);
  std::stable_sort(record.events.begin(), record.events.end(),
                   [](const PredictionEvent& a, const PredictionEvent& b) {
                     return a.timestamp < b.timestamp;
                   });
  return record;
}

RunRecord simulate_run(const TaskBundle& task, const ScriptedSolver& scripted,
                       const RunConfig& config) {
  config.validate();
  RunRecord record;
  double now = 0.0;
  bool overran = false;
  for (std::size_t i = 0; i < scripted.schedule.size(); ++i) {
    const ScheduledPrediction& step = scripted.schedule[i];
    if (!(step.delay >= 0.0)) {
      throw InvalidConfig("scripted delay " + std::to_string(i) +
                          " is negative");
    }
    now += step.delay;
    if (now > config.budget) {
      overran = true;
      break;
    }
    const ScoreMatrix& m = step.matrix;
    if (m.rows() != task.metadata.n_test ||
        m.cols() != task.metadata.n_classes) {
      record.violations.push_back(
          {now, "bad prediction shape: expected " +
                    std::to_string(task.metadata.n_test) + "x" +
                    std::to_string(task.metadata.n_classes) + ", got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols())});
      continue;
    }
    PredictionEvent event;
    event.timestamp = now;
    event.document.matrix = m;
    event.document.sequence_index = i;
    event.document.source_path = prediction_file_name(i);
    record.events.push_back(std::move(event));
  }
  record.started_at = 0.0;
  if (overran) {
    record.exit = {ExitKind::kBudgetKill, 0, {}};
    record.ended_at = config.budget;
  } else {
    record.exit = {ExitKind::kCleanFinish, 0, {}};
    record.ended_at = now;
  }
  return record;
}

void write_schedule(const ScriptedSolver& scripted, const fs::path& dir,
                    const std::string& schedule_name) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::string schedule;
  for (std::size_t i = 0; i < scripted.schedule.size(); ++i) {
    const std::string name = "step_" + std::to_string(i) + ".matrix";
    write_file_atomic(dir / name,
                      format_predictions(scripted.schedule[i].matrix));
    schedule += format_real(scripted.schedule[i].delay) + " " + name + "\n";
  }
  write_file_atomic(dir / schedule_name, schedule);
}

RunRecord run_scripted(const TaskBundle& task, const ScriptedSolver& scripted,
                       const RunConfig& config,
                       const fs::path& solver_executable,
                       const fs::path& staging_dir) {
  write_schedule(scripted, staging_dir);
  SolverCommand cmd;
  cmd.argv = {solver_executable.string(), "--schedule",
              fs::absolute(staging_dir / "schedule.txt").string()};
  return run_solver(task, cmd, config, staging_dir / "predictions");
}

ScoredRun score_run(const RunRecord& record, const TaskBundle& task,
                    const ScoringParams& params) {
  std::vector<TimedScores> events;
  events.reserve(record.events.size());
  for (const PredictionEvent& e : record.events) {
    events.push_back({e.timestamp, e.document.matrix});
  }
  ScoredRun out{curve_from_events(events, task.solution, params), 0.0, 0.0};
  out.alc = alc(out.curve);
  if (!out.curve.empty()) out.final_nauc = out.curve.points().back().score;
  return out;
}

}  // namespace anytime
