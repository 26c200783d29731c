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

#include "anytime/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "anytime/csv.hpp"
#include "anytime/errors.hpp"
#include "anytime/orchestrator.hpp"
#include "anytime/portfolio.hpp"
#include "anytime/ranking.hpp"
#include "anytime/studies.hpp"
#include "anytime/taskio.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace anytime::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  double budget = ScoringParams::kDefaultBudget;
  bool budget_given = false;
  double t0 = ScoringParams::kDefaultT0;
  std::size_t repeats = 1;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

std::optional<fs::path> out_dir(const GlobalFlags& flags) {
  if (!flags.out.empty()) return fs::path(flags.out);
  if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return std::nullopt;
}

fs::path required_out_dir(const GlobalFlags& flags) {
  fs::path dir = out_dir(flags).value_or(fs::path("anytime_out"));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void require_directory(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) {
    throw UsageError(std::string(what) + " not found: " + p.string());
  }
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) {
    throw UsageError(std::string(what) + " not found: " + p.string());
  }
}

// --budget wins, then the task's own budget, then the default.
ScoringParams scoring_params(const GlobalFlags& flags, const TaskBundle& task) {
  double budget = flags.budget;
  if (!flags.budget_given && task.metadata.budget_override) {
    budget = *task.metadata.budget_override;
  }
  return ScoringParams(budget, flags.t0);
}

std::string curve_csv(const LearningCurve& curve) {
  std::string out;
  append_csv_row(out, {"timestamp", "score"});
  for (const CurvePoint& p : curve.points()) {
    append_csv_row(out, {format_real(p.timestamp), format_real(p.score)});
  }
  return out;
}

std::string score_json(const ScoredRun& scored, std::size_t n_events) {
  json j;
  j["budget"] = scored.curve.params().budget();
  j["t0"] = scored.curve.params().t0();
  j["events"] = n_events;
  j["curve_points"] = scored.curve.points().size();
  j["alc"] = scored.alc;
  j["final_nauc"] = scored.final_nauc;
  return j.dump(2) + "\n";
}

void print_score(std::ostream& out, const ScoredRun& scored) {
  out << "timestamp,nauc\n";
  for (const CurvePoint& p : scored.curve.points()) {
    out << format_real(p.timestamp) << "," << format_real(p.score) << "\n";
  }
  out << "alc=" << format_real(scored.alc) << "\n";
  out << "final_nauc=" << format_real(scored.final_nauc) << "\n";
}

// ---- run -------------------------------------------------------------------

std::string events_file(const RunRecord& record, const fs::path& base) {
  std::string out = "# timestamp prediction_file\n";
  for (const PredictionEvent& e : record.events) {
    out += format_real(e.timestamp) + " " +
           fs::relative(e.document.source_path, base).generic_string() + "\n";
  }
  return out;
}

std::string record_json(const RunRecord& record, const fs::path& base) {
  json j;
  json events = json::array();
  for (const PredictionEvent& e : record.events) {
    events.push_back(
        {{"timestamp", e.timestamp},
         {"file", fs::relative(e.document.source_path, base).generic_string()},
         {"sequence_index", e.document.sequence_index}});
  }
  j["events"] = std::move(events);
  j["exit"] = {{"kind", std::string(to_string(record.exit.kind))},
               {"code", record.exit.code},
               {"detail", record.exit.detail}};
  json violations = json::array();
  for (const Violation& v : record.violations) {
    violations.push_back({{"timestamp", v.timestamp}, {"error", v.error}});
  }
  j["violations"] = std::move(violations);
  return j.dump(2) + "\n";
}

int cmd_run(const GlobalFlags& flags, const fs::path& task_root,
            const std::vector<std::string>& solver_argv, double poll,
            double grace, std::ostream& out) {
  require_directory(task_root, "task directory");
  if (solver_argv.empty()) throw UsageError("no solver command given");
  const TaskBundle task = load_task(task_root);
  const ScoringParams params = scoring_params(flags, task);
  RunConfig config;
  config.budget = params.budget();
  config.poll_interval = poll;
  config.grace_period = std::min(grace, params.budget());
  config.validate();

  const fs::path dir = required_out_dir(flags);
  SolverCommand cmd;
  cmd.argv = solver_argv;
  cmd.workdir = fs::current_path();

  std::vector<std::optional<RunRecord>> records(flags.repeats);
  std::vector<std::string> failures(flags.repeats);
  const auto one = [&](std::size_t r) {
    const fs::path run_dir = dir / ("run_" + std::to_string(r + 1));
    try {
      if (fs::exists(run_dir / "predictions")) {
        fs::remove_all(run_dir / "predictions");
      }
      records[r] = run_solver(task, cmd, config, run_dir / "predictions");
    } catch (const std::exception& e) {
      failures[r] = e.what();
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, flags.jobs);
  for (std::size_t begin = 0; begin < flags.repeats; begin += jobs) {
    std::vector<std::thread> workers;
    for (std::size_t r = begin; r < std::min(flags.repeats, begin + jobs); ++r) {
      workers.emplace_back(one, r);
    }
    for (auto& w : workers) w.join();
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw LaunchFailure(f);
  }

  ResultTable table({"solver"}, {task.metadata.name});
  std::string summary;
  append_csv_row(summary, {"run", "alc", "final_nauc", "events", "violations",
                           "exit"});
  for (std::size_t r = 0; r < flags.repeats; ++r) {
    const RunRecord& record = *records[r];
    const fs::path run_dir = dir / ("run_" + std::to_string(r + 1));
    const ScoredRun scored = score_run(record, task, params);
    write_file_atomic(run_dir / "events.txt", events_file(record, run_dir));
    write_file_atomic(run_dir / "record.json", record_json(record, run_dir));
    write_file_atomic(run_dir / "curve.csv", curve_csv(scored.curve));
    write_file_atomic(run_dir / "score.json",
                      score_json(scored, record.events.size()));
    json meta;
    meta["started_at"] = record.started_at;
    meta["ended_at"] = record.ended_at;
    meta["argv"] = solver_argv;
    write_file_atomic(run_dir / "metadata.json", meta.dump(2) + "\n");
    table.add(std::size_t{0}, std::size_t{0}, scored.alc);
    std::string exit(to_string(record.exit.kind));
    if (record.exit.kind == ExitKind::kCrash) {
      exit += "(" + std::to_string(record.exit.code) + ")";
    } else if (record.exit.kind == ExitKind::kProtocolViolation) {
      exit += "(" + record.exit.detail + ")";
    }
    append_csv_row(summary, {std::to_string(r + 1), format_real(scored.alc),
                             format_real(scored.final_nauc),
                             std::to_string(record.events.size()),
                             std::to_string(record.violations.size()), exit});
    out << "run " << r + 1 << ": alc=" << format_real(scored.alc)
        << " final_nauc=" << format_real(scored.final_nauc)
        << " events=" << record.events.size() << " exit=" << exit << "\n";
  }
  const RepeatSummary agg = aggregate_repeats(table);
  write_file_atomic(dir / "summary.csv", summary);
  json aggregate;
  aggregate["task"] = task.metadata.name;
  aggregate["repeats"] = flags.repeats;
  aggregate["alc_mean"] = agg.mean(0, 0);
  aggregate["alc_std"] = agg.std(0, 0);
  write_file_atomic(dir / "aggregate.json", aggregate.dump(2) + "\n");
  out << "alc mean=" << format_real(agg.mean(0, 0))
      << " std=" << format_real(agg.std(0, 0)) << "\n";
  return kOk;
}

// ---- score -----------------------------------------------------------------

RunRecord read_events_file(const fs::path& path, const TaskBundle& task) {
  const std::string text = read_file(path);
  std::istringstream lines(text);
  std::string line;
  std::size_t row = 0;
  RunRecord record;
  while (std::getline(lines, line)) {
    ++row;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string ts_text, file, extra;
    if (!(fields >> ts_text >> file) || (fields >> extra)) {
      throw ParseError("expected '<timestamp> <prediction file>'",
                       Location{path.string(), row, 0});
    }
    double ts = 0.0;
    auto [ptr, ec] =
        std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), ts);
    if (ec != std::errc() || ptr != ts_text.data() + ts_text.size() ||
        !(ts >= 0.0) || !std::isfinite(ts)) {
      throw ParseError("bad timestamp '" + ts_text + "'",
                       Location{path.string(), row, 1});
    }
    fs::path pred(file);
    if (pred.is_relative()) pred = path.parent_path() / pred;
    PredictionEvent event;
    event.timestamp = ts;
    try {
      event.document = parse_predictions(pred, task.metadata);
    } catch (const Error& e) {
      throw ParseError(std::string("prediction file: ") + e.what(),
                       Location{path.string(), row, 2});
    }
    record.events.push_back(std::move(event));
  }
  return record;
}

int cmd_score(const GlobalFlags& flags, const fs::path& events_path,
              const fs::path& task_root, std::ostream& out) {
  require_file(events_path, "events file");
  require_directory(task_root, "task directory");
  const TaskBundle task = load_task(task_root);
  const ScoringParams params = scoring_params(flags, task);
  const RunRecord record = read_events_file(events_path, task);
  const ScoredRun scored = score_run(record, task, params);
  print_score(out, scored);
  if (const auto dir = out_dir(flags)) {
    fs::create_directories(*dir);
    write_file_atomic(*dir / "curve.csv", curve_csv(scored.curve));
    write_file_atomic(*dir / "score.json",
                      score_json(scored, record.events.size()));
  }
  return kOk;
}

// ---- leaderboard / correlate -------------------------------------------------

ResultTable load_results_dir(const fs::path& dir) {
  require_directory(dir, "results directory");
  require_file(dir / "results.csv", "results file");
  ResultTable table = read_results_csv((dir / "results.csv").string());
  if (fs::is_regular_file(dir / "exclusions.csv")) {
    const auto excl = read_exclusions_csv((dir / "exclusions.csv").string());
    table = table.without(excl);
  }
  return table;
}

int cmd_leaderboard(const GlobalFlags& flags, const fs::path& results_dir,
                    std::ostream& out) {
  const ResultTable table = load_results_dir(results_dir);
  const Leaderboard board = average_rank(table);
  const fs::path dir = required_out_dir(flags);
  write_file_atomic(dir / "leaderboard.csv", leaderboard_csv(board));
  write_file_atomic(dir / "leaderboard.jsonl", leaderboard_jsonl(board));
  for (const auto& e : board.entries) {
    out << e.position << ". " << e.team
        << " average_rank=" << format_real(e.average_rank)
        << " mean_alc=" << format_real(e.overall_mean) << "\n";
  }
  return kOk;
}

int cmd_correlate(const GlobalFlags& flags, const fs::path& dir_a,
                  const fs::path& dir_b, std::ostream& out) {
  const Leaderboard a = average_rank(load_results_dir(dir_a));
  const Leaderboard b = average_rank(load_results_dir(dir_b));
  std::map<std::string, double> rank_b;
  for (const auto& e : b.entries) rank_b[e.team] = e.average_rank;
  std::vector<std::string> teams;
  std::vector<double> scores_a, scores_b;
  for (const auto& e : a.entries) {
    if (!rank_b.contains(e.team)) continue;
    teams.push_back(e.team);
    scores_a.push_back(-e.average_rank);
    scores_b.push_back(-rank_b[e.team]);
  }
  // Rank the common teams within each phase.
  const RankVector rx = ranks_per_task(scores_a);
  const RankVector ry = ranks_per_task(scores_b);
  PermutationOptions options;
  options.seed = flags.seed;
  const CorrelationResult result = pearson_rank_correlation(rx, ry, options);
  const fs::path dir = required_out_dir(flags);
  std::string csv;
  append_csv_row(csv, {"team", "rank_a", "rank_b"});
  for (std::size_t i = 0; i < teams.size(); ++i) {
    append_csv_row(csv, {teams[i], format_real(rx[i]), format_real(ry[i])});
  }
  write_file_atomic(dir / "rank_vectors.csv", csv);
  json j;
  j["teams"] = teams.size();
  j["rho"] = result.rho;
  j["p_value"] = result.p_value;
  j["exact"] = result.exact;
  j["permutations"] = result.permutations;
  j["seed"] = flags.seed;
  write_file_atomic(dir / "correlation.json", j.dump(2) + "\n");
  out << "rho=" << format_real(result.rho)
      << " p=" << format_real(result.p_value)
      << (result.exact ? " (exact)" : " (monte carlo)") << "\n";
  return kOk;
}

// ---- sweep-t0 --------------------------------------------------------------

int cmd_sweep_t0(const GlobalFlags& flags, const fs::path& archive_dir,
                 std::vector<double> grid, std::ostream& out) {
  require_directory(archive_dir, "archive directory");
  require_file(archive_dir / "curves.csv", "curve archive");
  const CurveArchive archive =
      read_archive_csv((archive_dir / "curves.csv").string());
  if (grid.empty()) grid = default_t0_grid();
  const T0Sweep sweep = t0_sweep(archive, grid);
  const fs::path dir = required_out_dir(flags);
  write_file_atomic(dir / "sweep_alc.csv", t0_sweep_alc_csv(sweep));
  write_file_atomic(dir / "sweep_rank.csv", t0_sweep_rank_csv(sweep));
  write_file_atomic(dir / "sweep_flips.csv", t0_sweep_flips_csv(sweep));
  out << sweep.methods.size() << " methods, " << sweep.tasks.size()
      << " tasks, " << sweep.grid.size() << " t0 values, "
      << sweep.flips.size() << " order flips\n";
  for (const OrderFlip& f : sweep.flips) {
    out << "flip: " << f.method_a << " vs " << f.method_b << " on "
        << (f.task.empty() ? "(average rank)" : f.task) << " ("
        << f.method_a << " ahead at t0=" << format_real(f.t0_a_ahead) << ", "
        << f.method_b << " ahead at t0=" << format_real(f.t0_b_ahead) << ")\n";
  }
  return kOk;
}

// ---- portfolio -------------------------------------------------------------

int cmd_portfolio(const GlobalFlags& flags, const fs::path& matrix_csv,
                  const fs::path& features_csv, std::size_t k,
                  std::ostream& out) {
  require_file(matrix_csv, "performance matrix");
  require_file(features_csv, "meta-features file");
  const PerformanceMatrix matrix = read_performance_csv(matrix_csv.string());
  const auto features = read_features_csv(features_csv.string());
  const std::vector<std::size_t> portfolio = greedy_portfolio(matrix, k);
  const std::size_t generalist = generalist_config(matrix);
  const fs::path dir = required_out_dir(flags);

  std::string picks;
  append_csv_row(picks, {"step", "config", "coverage"});
  std::vector<std::size_t> prefix;
  for (std::size_t i = 0; i < portfolio.size(); ++i) {
    prefix.push_back(portfolio[i]);
    append_csv_row(picks, {std::to_string(i + 1),
                           matrix.configs()[portfolio[i]],
                           format_real(portfolio_coverage(matrix, prefix))});
    out << "pick " << i + 1 << ": " << matrix.configs()[portfolio[i]]
        << " coverage=" << format_real(portfolio_coverage(matrix, prefix))
        << "\n";
  }
  write_file_atomic(dir / "portfolio.csv", picks);
  out << "generalist: " << matrix.configs()[generalist] << "\n";

  // Leave-one-dataset-out selection.
  std::string selection;
  append_csv_row(selection, {"dataset", "selected", "selected_alc",
                             "generalist", "generalist_alc", "best_alc"});
  for (std::size_t d = 0; d < matrix.datasets().size(); ++d) {
    const std::string& name = matrix.datasets()[d];
    const auto it = features.find(name);
    if (it == features.end()) {
      throw MissingFeatures("no meta-features for dataset '" + name + "'");
    }
    auto others = features;
    others.erase(name);
    for (auto o = others.begin(); o != others.end();) {
      // Only datasets with matrix columns can serve as neighbours.
      const auto& ds = matrix.datasets();
      o = std::find(ds.begin(), ds.end(), o->first) == ds.end()
              ? others.erase(o)
              : std::next(o);
    }
    if (others.empty()) {
      throw MissingFeatures("leave-one-out selection needs two datasets");
    }
    const std::size_t chosen =
        select_config(portfolio, matrix, others, it->second);
    double best = matrix(0, d);
    for (std::size_t c = 0; c < matrix.configs().size(); ++c) {
      best = std::max(best, matrix(c, d));
    }
    append_csv_row(selection,
                   {name, matrix.configs()[chosen],
                    format_real(matrix(chosen, d)),
                    matrix.configs()[generalist],
                    format_real(matrix(generalist, d)), format_real(best)});
  }
  write_file_atomic(dir / "selection.csv", selection);
  json summary;
  std::vector<std::string> ids;
  for (std::size_t c : portfolio) ids.push_back(matrix.configs()[c]);
  summary["portfolio"] = ids;
  summary["coverage"] = portfolio_coverage(matrix, portfolio);
  summary["generalist"] = matrix.configs()[generalist];
  write_file_atomic(dir / "portfolio.json", summary.dump(2) + "\n");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Any-time learning benchmark harness"};
  app.name("anytime_bench");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  auto* budget_opt = app.add_option("--budget", flags.budget,
                                    "Time budget T in seconds")
                         ->check(CLI::PositiveNumber);
  app.add_option("--t0", flags.t0, "ALC time-warp parameter t0 in seconds")
      ->check(CLI::PositiveNumber);
  app.add_option("--repeats", flags.repeats, "Runs per task")
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  app.add_option("--out", flags.out,
                 std::string("Report directory (default $") + kOutEnv +
                     ", then ./anytime_out)");
  app.add_option("--seed", flags.seed, "Seed for Monte-Carlo p-values");
  app.add_option("--jobs", flags.jobs, "Parallel runs")
      ->check(CLI::PositiveNumber);

  std::string task_root;
  std::vector<std::string> solver_argv;
  double poll = 0.05, grace = 5.0;
  auto* run_cmd = app.add_subcommand("run", "Run a solver executable");
  run_cmd->add_option("task", task_root, "Task bundle directory")->required();
  run_cmd->add_option("solver", solver_argv, "Solver command (after --)")
      ->required();
  run_cmd->add_option("--poll", poll, "Prediction poll interval (s)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--grace", grace, "Grace period before SIGKILL (s)")
      ->check(CLI::PositiveNumber);

  std::string events_path;
  auto* score_cmd =
      app.add_subcommand("score", "Score archived prediction events");
  score_cmd->add_option("events", events_path, "Events file")->required();
  score_cmd->add_option("task", task_root, "Task bundle directory")->required();

  std::string results_dir, results_dir_b;
  auto* board_cmd =
      app.add_subcommand("leaderboard", "Average-rank leaderboard");
  board_cmd->add_option("results", results_dir, "Directory with results.csv")
      ->required();

  auto* corr_cmd = app.add_subcommand(
      "correlate", "Rank correlation between two result sets");
  corr_cmd->add_option("results_a", results_dir, "First results directory")
      ->required();
  corr_cmd->add_option("results_b", results_dir_b, "Second results directory")
      ->required();

  std::string archive_dir;
  std::vector<double> grid;
  auto* sweep_cmd = app.add_subcommand("sweep-t0", "Rescore under a t0 grid");
  sweep_cmd->add_option("archive", archive_dir, "Directory with curves.csv")
      ->required();
  sweep_cmd->add_option("--grid", grid, "Comma-separated t0 values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  std::string matrix_path, features_path;
  std::size_t k = 1;
  auto* portfolio_cmd =
      app.add_subcommand("portfolio", "Greedy portfolio and selection");
  portfolio_cmd->add_option("matrix", matrix_path, "Performance matrix CSV")
      ->required();
  portfolio_cmd->add_option("features", features_path, "Meta-features CSV")
      ->required();
  portfolio_cmd->add_option("-k,--k", k, "Portfolio size")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      out << app.help();
      return kOk;
    }
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  }
  flags.budget_given = budget_opt->count() > 0;

  try {
    if (*run_cmd) {
      return cmd_run(flags, task_root, solver_argv, poll, grace, out);
    }
    if (*score_cmd) return cmd_score(flags, events_path, task_root, out);
    if (*board_cmd) return cmd_leaderboard(flags, results_dir, out);
    if (*corr_cmd) return cmd_correlate(flags, results_dir, results_dir_b, out);
    if (*sweep_cmd) return cmd_sweep_t0(flags, archive_dir, grid, out);
    if (*portfolio_cmd) {
      return cmd_portfolio(flags, matrix_path, features_path, k, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidParams& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kHarnessError;
  }
  return kUsageError;
}

}  // namespace anytime::cli
