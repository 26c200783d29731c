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

#include "anytime/studies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anytime/csv.hpp"
#include "anytime/errors.hpp"
#include "anytime/taskio.hpp"

namespace anytime {

void CurveArchive::add(ArchiveKey key, double budget,
                       std::vector<CurvePoint> points) {
  // Validates the curve under its budget (t0 is irrelevant here).
  LearningCurve check(ScoringParams(budget, ScoringParams::kDefaultT0), points);
  (void)check;
  if (runs_.contains(key)) {
    throw KeyMismatch("duplicate archive entry for (" + key.method + ", " +
                      key.task + ", " + std::to_string(key.repeat) + ")");
  }
  if (std::find(methods_.begin(), methods_.end(), key.method) ==
      methods_.end()) {
    methods_.push_back(key.method);
  }
  if (std::find(tasks_.begin(), tasks_.end(), key.task) == tasks_.end()) {
    tasks_.push_back(key.task);
  }
  runs_.emplace(std::move(key), Run{budget, std::move(points)});
}

void CurveArchive::add(ArchiveKey key, const LearningCurve& curve) {
  add(std::move(key), curve.params().budget(),
      std::vector<CurvePoint>(curve.points().begin(), curve.points().end()));
}

LearningCurve CurveArchive::curve(const ArchiveKey& key, double t0) const {
  const auto it = runs_.find(key);
  if (it == runs_.end()) {
    throw KeyMismatch("no archived run for (" + key.method + ", " + key.task +
                      ", " + std::to_string(key.repeat) + ")");
  }
  return LearningCurve(ScoringParams(it->second.budget, t0), it->second.points);
}

CurveArchive read_archive_csv(const std::string& path) {
  const CsvTable csv = read_csv(path);
  const std::size_t method_col = csv.column("method");
  const std::size_t task_col = csv.column("task");
  const std::size_t repeat_col = csv.column("repeat");
  const std::size_t budget_col = csv.column("budget");
  const std::size_t time_col = csv.column("timestamp");
  const std::size_t score_col = csv.column("score");

  // Rows of one run must be contiguous.
  CurveArchive archive;
  std::optional<ArchiveKey> current;
  double budget = 0.0;
  std::size_t first_line = 0;
  std::vector<CurvePoint> points;
  const auto flush = [&] {
    if (!current) return;
    try {
      archive.add(*current, budget, std::move(points));
    } catch (const Error& e) {
      throw ParseError(e.what(), Location{path, first_line, 0});
    }
    points.clear();
  };
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    ArchiveKey key{row[method_col], row[task_col], csv.count(r, repeat_col)};
    const double row_budget = csv.real(r, budget_col);
    if (!current || key != *current) {
      flush();
      current = key;
      budget = row_budget;
      first_line = csv.line_numbers[r];
    } else if (row_budget != budget) {
      throw ParseError("budget changes within one run",
                       Location{path, csv.line_numbers[r], budget_col + 1});
    }
    const bool no_time = row[time_col].empty();
    const bool no_score = row[score_col].empty();
    if (no_time != no_score) {
      throw ParseError("timestamp and score must both be present or both empty",
                       Location{path, csv.line_numbers[r], 0});
    }
    if (!no_time) points.push_back({csv.real(r, time_col), csv.real(r, score_col)});
  }
  flush();
  return archive;
}

std::string archive_csv(const CurveArchive& archive) {
  std::string out;
  append_csv_row(out, {"method", "task", "repeat", "budget", "timestamp", "score"});
  for (const auto& [key, run] : archive.runs()) {
    const std::vector<std::string> prefix{key.method, key.task,
                                          std::to_string(key.repeat),
                                          format_real(run.budget)};
    if (run.points.empty()) {
      auto row = prefix;
      row.insert(row.end(), {"", ""});
      append_csv_row(out, row);
    }
    for (const CurvePoint& p : run.points) {
      auto row = prefix;
      row.push_back(format_real(p.timestamp));
      row.push_back(format_real(p.score));
      append_csv_row(out, row);
    }
  }
  return out;
}

std::vector<double> default_t0_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) {
    grid.push_back(std::pow(10.0, -2.0 + 8.0 * i / 19.0));
  }
  return grid;
}

namespace {

double shared_budget(const CurveArchive& archive) {
  if (archive.runs().empty()) throw KeyMismatch("archive is empty");
  const double budget = archive.runs().begin()->second.budget;
  for (const auto& [key, run] : archive.runs()) {
    if (run.budget != budget) {
      throw InvalidParams("archived curves use different budgets (" +
                          format_real(budget) + " and " +
                          format_real(run.budget) + ")");
    }
  }
  return budget;
}

// Finds a grid point where `ahead(a, b)` holds and one where it holds the
// other way round.
template <typename Ahead>
std::optional<std::pair<double, double>> find_flip(
    std::span<const double> grid, Ahead ahead) {
  std::optional<double> a_ahead, b_ahead;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const int order = ahead(g);
    if (order > 0 && !a_ahead) a_ahead = grid[g];
    if (order < 0 && !b_ahead) b_ahead = grid[g];
  }
  if (a_ahead && b_ahead) return std::make_pair(*a_ahead, *b_ahead);
  return std::nullopt;
}

}  // namespace

T0Sweep t0_sweep(const CurveArchive& archive, std::span<const double> grid) {
  if (grid.empty()) throw InvalidParams("t0 grid is empty");
  const double budget = shared_budget(archive);
  T0Sweep sweep;
  sweep.grid.assign(grid.begin(), grid.end());
  sweep.methods = archive.methods();
  sweep.tasks = archive.tasks();

  for (double t0 : grid) {
    const ScoringParams params(budget, t0);
    ResultTable table(sweep.methods, sweep.tasks);
    for (const auto& [key, run] : archive.runs()) {
      table.set(table.team_index(key.method), table.task_index(key.task),
                key.repeat, alc(LearningCurve(params, run.points)));
    }
    sweep.alc.push_back(aggregate_repeats(table).mean);
    const Leaderboard board = average_rank(table);
    RankVector ranks(sweep.methods.size());
    for (const auto& e : board.entries) {
      ranks[table.team_index(e.team)] = e.average_rank;
    }
    sweep.average_ranks.push_back(std::move(ranks));
  }

  const std::size_t n = sweep.methods.size();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      for (std::size_t k = 0; k < sweep.tasks.size(); ++k) {
        const auto flip = find_flip(grid, [&](std::size_t g) {
          const double x = sweep.alc[g](a, k);
          const double y = sweep.alc[g](b, k);
          return (x > y) - (x < y);
        });
        if (flip) {
          sweep.flips.push_back({sweep.methods[a], sweep.methods[b],
                                 sweep.tasks[k], flip->first, flip->second});
        }
      }
      const auto flip = find_flip(grid, [&](std::size_t g) {
        const double x = sweep.average_ranks[g][a];
        const double y = sweep.average_ranks[g][b];
        return (x < y) - (x > y);
      });
      if (flip) {
        sweep.flips.push_back({sweep.methods[a], sweep.methods[b], "",
                               flip->first, flip->second});
      }
    }
  }
  return sweep;
}

std::string t0_sweep_alc_csv(const T0Sweep& sweep) {
  std::string out;
  append_csv_row(out, {"method", "task", "t0", "alc"});
  for (std::size_t m = 0; m < sweep.methods.size(); ++m) {
    for (std::size_t k = 0; k < sweep.tasks.size(); ++k) {
      for (std::size_t g = 0; g < sweep.grid.size(); ++g) {
        append_csv_row(out, {sweep.methods[m], sweep.tasks[k],
                             format_real(sweep.grid[g]),
                             format_real(sweep.alc[g](m, k))});
      }
    }
  }
  return out;
}

std::string t0_sweep_rank_csv(const T0Sweep& sweep) {
  std::string out;
  append_csv_row(out, {"method", "t0", "average_rank"});
  for (std::size_t m = 0; m < sweep.methods.size(); ++m) {
    for (std::size_t g = 0; g < sweep.grid.size(); ++g) {
      append_csv_row(out, {sweep.methods[m], format_real(sweep.grid[g]),
                           format_real(sweep.average_ranks[g][m])});
    }
  }
  return out;
}

std::string t0_sweep_flips_csv(const T0Sweep& sweep) {
  std::string out;
  append_csv_row(out, {"method_a", "method_b", "task", "t0_a_ahead",
                       "t0_b_ahead"});
  for (const OrderFlip& f : sweep.flips) {
    append_csv_row(out, {f.method_a, f.method_b,
                         f.task.empty() ? "(average rank)" : f.task,
                         format_real(f.t0_a_ahead), format_real(f.t0_b_ahead)});
  }
  return out;
}

namespace {

// Mean final NAUC per (method, task).
std::map<std::pair<std::string, std::string>, double> final_nauc_means(
    const CurveArchive& archive) {
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>>
      acc;
  for (const auto& [key, run] : archive.runs()) {
    auto& [sum, n] = acc[{key.method, key.task}];
    sum += run.points.empty() ? 0.0 : run.points.back().score;
    ++n;
  }
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& [k, v] : acc) {
    out[k] = v.first / static_cast<double>(v.second);
  }
  return out;
}

}  // namespace

std::vector<BudgetComparisonRow> budget_comparison(
    const CurveArchive& archive_a, const CurveArchive& archive_b,
    double threshold) {
  if (!(threshold >= 0.0)) throw InvalidParams("threshold must be >= 0");
  const auto a = final_nauc_means(archive_a);
  const auto b = final_nauc_means(archive_b);
  for (const auto* pair : {&a, &b}) {
    const auto* other = pair == &a ? &b : &a;
    for (const auto& [key, value] : *pair) {
      if (!other->contains(key)) {
        throw KeyMismatch("(" + key.first + ", " + key.second +
                          ") is present under only one budget");
      }
    }
  }
  std::vector<BudgetComparisonRow> rows;
  for (const auto& [key, value_a] : a) {
    BudgetComparisonRow row;
    row.method = key.first;
    row.task = key.second;
    row.final_a = value_a;
    row.final_b = b.at(key);
    row.diff = row.final_b - row.final_a;
    row.flagged = std::abs(row.diff) > threshold;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string budget_comparison_csv(std::span<const BudgetComparisonRow> rows,
                                  double budget_a, double budget_b) {
  std::string out;
  append_csv_row(out, {"method", "task", "budget_a", "budget_b", "final_nauc_a",
                       "final_nauc_b", "diff", "flagged"});
  for (const auto& r : rows) {
    append_csv_row(out, {r.method, r.task, format_real(budget_a),
                         format_real(budget_b), format_real(r.final_a),
                         format_real(r.final_b), format_real(r.diff),
                         r.flagged ? "1" : "0"});
  }
  return out;
}

Leaderboard ablation_table(const ResultTable& results) {
  if (results.teams().size() < 2) {
    throw InvalidTable("an ablation table needs at least two variants");
  }
  return average_rank(results);
}

std::string VariantSpec::label() const {
  std::string out;
  for (const auto& tag : removed_components) out += "-" + tag;
  for (const auto& c : added_components) out += "+" + c.tag;
  return out;
}

std::string VariantSpec::method_id() const {
  return method.empty() ? base_method + label() : method;
}

CombinationMatrix combination_matrix(
    const ResultTable& results, std::span<const std::string> bases,
    const std::map<std::string, std::vector<VariantSpec>>& variants) {
  for (const auto& [base, specs] : variants) {
    if (std::find(bases.begin(), bases.end(), base) == bases.end()) {
      throw UnknownBase("variants given for unknown base '" + base + "'");
    }
    for (const auto& spec : specs) {
      if (spec.base_method != base) {
        throw UnknownBase("variant " + spec.method_id() + " has base '" +
                          spec.base_method + "' but is listed under '" + base +
                          "'");
      }
      for (const auto& c : spec.added_components) {
        if (spec.removed_components.contains(c.tag)) {
          throw InvalidConfig("variant " + spec.method_id() +
                              " both removes and adds component " + c.tag);
        }
      }
    }
  }

  CombinationMatrix out;
  out.bases.assign(bases.begin(), bases.end());
  out.n_tasks = results.tasks().size();
  for (const auto& base : bases) {
    if (const auto it = variants.find(base); it != variants.end()) {
      for (const auto& spec : it->second) {
        if (std::find(out.columns.begin(), out.columns.end(), spec.label()) ==
            out.columns.end()) {
          out.columns.push_back(spec.label());
        }
      }
    }
  }

  const RepeatSummary summary = aggregate_repeats(results);
  out.cells.assign(bases.size(),
                   std::vector<CombinationCell>(out.columns.size()));
  for (std::size_t b = 0; b < bases.size(); ++b) {
    const auto it = variants.find(bases[b]);
    if (it == variants.end()) continue;
    const std::size_t base_row = results.team_index(bases[b]);
    std::vector<std::set<std::string>> seen_changes;
    for (const auto& spec : it->second) {
      const std::size_t col = static_cast<std::size_t>(
          std::find(out.columns.begin(), out.columns.end(), spec.label()) -
          out.columns.begin());
      CombinationCell& cell = out.cells[b][col];
      // Components donated by the base itself change nothing.
      std::set<std::string> changes;
      for (const auto& tag : spec.removed_components) changes.insert("-" + tag);
      for (const auto& c : spec.added_components) {
        if (c.donor != spec.base_method) changes.insert("+" + c.tag + "@" + c.donor);
      }
      if (changes.empty()) {
        cell.state = CellState::kSameAsBase;
        continue;
      }
      if (std::find(seen_changes.begin(), seen_changes.end(), changes) !=
          seen_changes.end()) {
        cell.state = CellState::kDuplicate;
        continue;
      }
      seen_changes.push_back(changes);
      const std::size_t row = results.team_index(spec.method_id());
      cell.state = CellState::kCount;
      cell.variant = spec.method_id();
      for (std::size_t k = 0; k < out.n_tasks; ++k) {
        if (summary.mean(row, k) > summary.mean(base_row, k)) ++cell.count;
      }
    }
  }
  return out;
}

std::string combination_matrix_csv(const CombinationMatrix& matrix) {
  std::string out;
  std::vector<std::string> header{"base"};
  header.insert(header.end(), matrix.columns.begin(), matrix.columns.end());
  append_csv_row(out, header);
  for (std::size_t b = 0; b < matrix.bases.size(); ++b) {
    std::vector<std::string> row{matrix.bases[b]};
    for (const auto& cell : matrix.cells[b]) {
      row.push_back(cell.state == CellState::kCount ? std::to_string(cell.count)
                                                    : "");
    }
    append_csv_row(out, row);
  }
  return out;
}

}  // namespace anytime
