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

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anytime/metrics.hpp"
#include "anytime/taskio.hpp"

namespace anytime {

// Environment variables handed to every solver process.
inline constexpr std::string_view kEnvTaskDir = "TASK_DIR";
inline constexpr std::string_view kEnvPredictionDir = "PREDICTION_DIR";
inline constexpr std::string_view kEnvBudget = "TIME_BUDGET_SECONDS";
inline constexpr std::string_view kEnvNTest = "N_TEST";
inline constexpr std::string_view kEnvNClasses = "N_CLASSES";

// Written by the orchestrator into the prediction directory once the budget
// is exhausted. Contains the wall duration of the run in seconds.
inline constexpr std::string_view kEndSignalFile = "end.txt";

struct SolverCommand {
  std::vector<std::string> argv;
  std::map<std::string, std::string> env;
  std::filesystem::path workdir;
};

struct RunConfig {
  double budget = ScoringParams::kDefaultBudget;
  double poll_interval = 0.05;
  double grace_period = 5.0;

  // Throws InvalidConfig unless every field is positive and
  // grace_period <= budget.
  void validate() const;
};

struct PredictionEvent {
  double timestamp = 0.0;  // seconds since launch, at first observation
  PredictionDocument document;
};

enum class ExitKind { kCleanFinish, kBudgetKill, kCrash, kProtocolViolation };

std::string_view to_string(ExitKind kind);
std::optional<ExitKind> parse_exit_kind(std::string_view text);

struct RunExit {
  ExitKind kind = ExitKind::kCleanFinish;
  // Exit status for kCrash; 128 + signal number when killed by a signal.
  int code = 0;
  // Violation kind for kProtocolViolation.
  std::string detail;

  friend bool operator==(const RunExit&, const RunExit&) = default;
};

struct Violation {
  double timestamp = 0.0;
  std::string error;
};

struct RunRecord {
  std::vector<PredictionEvent> events;
  RunExit exit;
  // Wall-clock seconds since the Unix epoch; virtual seconds for simulated
  // runs.
  double started_at = 0.0;
  double ended_at = 0.0;
  std::vector<Violation> violations;
};

// Runs `solver` as a separate process group. The solver sees TASK_DIR (the
// training payload, never the solution), PREDICTION_DIR, the budget and the
// expected prediction shape. `prediction_dir` is created if missing and must
// be empty.
RunRecord run_solver(const TaskBundle& task, const SolverCommand& solver,
                     const RunConfig& config,
                     const std::filesystem::path& prediction_dir);

enum class ClockMode { kVirtualClock, kRealSubprocess };

struct ScheduledPrediction {
  double delay = 0.0;  // seconds after the previous prediction
  ScoreMatrix matrix;
};

// Test double: emits a fixed list of predictions at cumulative delays.
struct ScriptedSolver {
  std::vector<ScheduledPrediction> schedule;
  ClockMode mode = ClockMode::kVirtualClock;
};

// Replays `scripted` on a virtual clock. Event timestamps equal the
// cumulative delays exactly; predictions past the budget are dropped and
// shape errors become violations, as in run_solver.
RunRecord simulate_run(const TaskBundle& task, const ScriptedSolver& scripted,
                       const RunConfig& config);

// Runs `scripted` for real through the scripted_solver executable. The
// schedule is materialized under `staging_dir`.
RunRecord run_scripted(const TaskBundle& task, const ScriptedSolver& scripted,
                       const RunConfig& config,
                       const std::filesystem::path& solver_executable,
                       const std::filesystem::path& staging_dir);

// Schedule file understood by scripted_solver: one "<delay> <matrix file>"
// per line, matrix paths relative to the schedule file.
void write_schedule(const ScriptedSolver& scripted,
                    const std::filesystem::path& dir,
                    const std::string& schedule_name = "schedule.txt");

struct ScoredRun {
  LearningCurve curve;
  double alc = 0.0;
  double final_nauc = 0.0;
};

ScoredRun score_run(const RunRecord& record, const TaskBundle& task,
                    const ScoringParams& params);

}  // namespace anytime
