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

#include "anytime/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "anytime/csv.hpp"
#include "anytime/errors.hpp"
#include "anytime/taskio.hpp"
#include "json.hpp"

namespace anytime {

ResultTable::ResultTable(std::vector<std::string> teams,
                         std::vector<std::string> tasks)
    : teams_(std::move(teams)),
      tasks_(std::move(tasks)),
      cells_(teams_.size() * tasks_.size()) {
  for (const auto* ids : {&teams_, &tasks_}) {
    std::set<std::string> unique(ids->begin(), ids->end());
    if (unique.size() != ids->size()) {
      throw InvalidTable("team and task ids must be unique");
    }
  }
}

std::size_t ResultTable::team_index(std::string_view team) const {
  auto it = std::find(teams_.begin(), teams_.end(), team);
  if (it == teams_.end()) {
    throw InvalidTable("unknown team '" + std::string(team) + "'");
  }
  return static_cast<std::size_t>(it - teams_.begin());
}

std::size_t ResultTable::task_index(std::string_view task) const {
  auto it = std::find(tasks_.begin(), tasks_.end(), task);
  if (it == tasks_.end()) {
    throw InvalidTable("unknown task '" + std::string(task) + "'");
  }
  return static_cast<std::size_t>(it - tasks_.begin());
}

namespace {

void check_alc(double alc) {
  if (!(alc >= -1.0 && alc <= 1.0)) {
    throw InvalidTable("ALC value " + std::to_string(alc) +
                       " outside [-1, 1]");
  }
}

}  // namespace

void ResultTable::add(std::size_t team, std::size_t task, double alc) {
  check_alc(alc);
  cells_.at(team * tasks_.size() + task).push_back(alc);
}

void ResultTable::add(std::string_view team, std::string_view task,
                      double alc) {
  add(team_index(team), task_index(task), alc);
}

void ResultTable::set(std::size_t team, std::size_t task, std::size_t repeat,
                      double alc) {
  check_alc(alc);
  auto& cell = cells_.at(team * tasks_.size() + task);
  if (cell.size() <= repeat) cell.resize(repeat + 1);
  cell[repeat] = alc;
}

std::vector<double> ResultTable::present(std::size_t team,
                                         std::size_t task) const {
  std::vector<double> out;
  for (const auto& v : slots(team, task)) {
    if (v) out.push_back(*v);
  }
  return out;
}

ResultTable ResultTable::without(std::span<const Exclusion> exclusions) const {
  ResultTable out = *this;
  for (const Exclusion& e : exclusions) {
    auto& cell = out.cells_[team_index(e.team) * tasks_.size() +
                            task_index(e.task)];
    if (e.repeat < cell.size()) cell[e.repeat].reset();
  }
  return out;
}

ResultTable ResultTable::restricted_to(
    std::span<const std::string> tasks) const {
  ResultTable out(teams_, std::vector<std::string>(tasks.begin(), tasks.end()));
  for (std::size_t t = 0; t < teams_.size(); ++t) {
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      out.cells_[t * tasks.size() + k] =
          cells_[t * tasks_.size() + task_index(tasks[k])];
    }
  }
  return out;
}

ResultTable read_results_csv(const std::string& path) {
  const CsvTable csv = read_csv(path);
  const std::size_t team_col = csv.column("team");
  const std::size_t task_col = csv.column("task");
  const std::size_t repeat_col = csv.column("repeat");
  const std::size_t alc_col = csv.column("alc");
  std::vector<std::string> teams, tasks;
  for (const auto& row : csv.rows) {
    if (std::find(teams.begin(), teams.end(), row[team_col]) == teams.end()) {
      teams.push_back(row[team_col]);
    }
    if (std::find(tasks.begin(), tasks.end(), row[task_col]) == tasks.end()) {
      tasks.push_back(row[task_col]);
    }
  }
  ResultTable table(teams, tasks);
  std::set<std::tuple<std::string, std::string, std::size_t>> seen;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::size_t repeat = csv.count(r, repeat_col);
    if (!seen.emplace(row[team_col], row[task_col], repeat).second) {
      throw ParseError("duplicate (team, task, repeat) entry",
                       Location{path, csv.line_numbers[r], 0});
    }
    const double alc = csv.real(r, alc_col);
    try {
      table.set(table.team_index(row[team_col]),
                table.task_index(row[task_col]), repeat, alc);
    } catch (const InvalidTable& e) {
      throw ParseError(e.what(), Location{path, csv.line_numbers[r], alc_col + 1});
    }
  }
  return table;
}

std::vector<ResultTable::Exclusion> read_exclusions_csv(
    const std::string& path) {
  const CsvTable csv = read_csv(path);
  const std::size_t team_col = csv.column("team");
  const std::size_t task_col = csv.column("task");
  const std::size_t repeat_col = csv.column("repeat");
  std::vector<ResultTable::Exclusion> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    out.push_back({csv.rows[r][team_col], csv.rows[r][task_col],
                   csv.count(r, repeat_col)});
  }
  return out;
}

RepeatSummary aggregate_repeats(const ResultTable& table) {
  const std::size_t n_teams = table.teams().size();
  const std::size_t n_tasks = table.tasks().size();
  std::vector<double> mean(n_teams * n_tasks), stddev(n_teams * n_tasks);
  for (std::size_t t = 0; t < n_teams; ++t) {
    for (std::size_t k = 0; k < n_tasks; ++k) {
      const std::vector<double> values = table.present(t, k);
      if (values.empty()) {
        throw EmptyCell("no ALC recorded for team '" + table.teams()[t] +
                        "' on task '" + table.tasks()[k] + "'");
      }
      const double n = static_cast<double>(values.size());
      const double m = std::accumulate(values.begin(), values.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : values) ss += (v - m) * (v - m);
      mean[t * n_tasks + k] = m;
      stddev[t * n_tasks + k] =
          values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
  }
  return {Grid<double>(n_teams, n_tasks, std::move(mean)),
          Grid<double>(n_teams, n_tasks, std::move(stddev))};
}

RankVector ranks_per_task(std::span<const double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidTable("cannot rank a non-finite score");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  RankVector ranks(scores.size());
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin + 1;
    while (end < order.size() && scores[order[end]] == scores[order[begin]]) {
      ++end;
    }
    // positions begin+1 .. end share their mean
    const double shared = static_cast<double>(begin + 1 + end) / 2.0;
    for (std::size_t i = begin; i < end; ++i) ranks[order[i]] = shared;
    begin = end;
  }
  return ranks;
}

namespace {

// Sum over tasks of per-task ranks of the repeat means. Ranks are multiples
// of 1/2, so these sums compare exactly.
std::vector<double> rank_sums(const Grid<double>& mean,
                              std::span<const std::size_t> task_indices) {
  std::vector<double> sums(mean.rows(), 0.0);
  for (std::size_t k : task_indices) {
    const RankVector ranks = ranks_per_task(mean.column(k));
    for (std::size_t t = 0; t < sums.size(); ++t) sums[t] += ranks[t];
  }
  return sums;
}

std::vector<std::string> ordering_of(const std::vector<double>& sums,
                                     const std::vector<std::string>& teams) {
  std::vector<std::size_t> idx(teams.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (sums[a] != sums[b]) return sums[a] < sums[b];
    return teams[a] < teams[b];
  });
  std::vector<std::string> out;
  for (std::size_t i : idx) out.push_back(teams[i]);
  return out;
}

bool same_weak_order(const std::vector<double>& a, const std::vector<double>& b) {
  const auto sign = [](double x, double y) { return (x > y) - (x < y); };
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (sign(a[i], a[j]) != sign(b[i], b[j])) return false;
    }
  }
  return true;
}

}  // namespace

Leaderboard average_rank(const ResultTable& table) {
  const RepeatSummary summary = aggregate_repeats(table);
  const std::size_t n_teams = table.teams().size();
  const std::size_t n_tasks = table.tasks().size();
  if (n_tasks == 0) throw InvalidTable("result table has no tasks");
  std::vector<std::size_t> all(n_tasks);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const std::vector<double> sums = rank_sums(summary.mean, all);

  Leaderboard board;
  board.tasks = table.tasks();
  std::vector<double> sort_sums;
  for (std::size_t t = 0; t < n_teams; ++t) {
    LeaderboardEntry e;
    e.team = table.teams()[t];
    const auto m = summary.mean.row(t);
    const auto s = summary.std.row(t);
    e.mean.assign(m.begin(), m.end());
    e.std.assign(s.begin(), s.end());
    e.average_rank = sums[t] / static_cast<double>(n_tasks);
    e.overall_mean = std::accumulate(e.mean.begin(), e.mean.end(), 0.0) /
                     static_cast<double>(n_tasks);
    board.entries.push_back(std::move(e));
  }
  std::vector<std::size_t> idx(n_teams);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (sums[a] != sums[b]) return sums[a] < sums[b];
    const auto& ea = board.entries[a];
    const auto& eb = board.entries[b];
    if (ea.overall_mean != eb.overall_mean) {
      return ea.overall_mean > eb.overall_mean;
    }
    return ea.team < eb.team;
  });
  std::vector<LeaderboardEntry> ordered;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    ordered.push_back(std::move(board.entries[idx[i]]));
    ordered.back().position = i + 1;
  }
  board.entries = std::move(ordered);
  return board;
}

std::string leaderboard_csv(const Leaderboard& board) {
  std::string out;
  std::vector<std::string> header{"team"};
  for (const auto& task : board.tasks) {
    header.push_back(task + "_mean");
    header.push_back(task + "_std");
  }
  header.push_back("average_rank");
  header.push_back("position");
  append_csv_row(out, header);
  for (const auto& e : board.entries) {
    std::vector<std::string> row{e.team};
    for (std::size_t k = 0; k < board.tasks.size(); ++k) {
      row.push_back(format_real(e.mean[k]));
      row.push_back(format_real(e.std[k]));
    }
    row.push_back(format_real(e.average_rank));
    row.push_back(std::to_string(e.position));
    append_csv_row(out, row);
  }
  return out;
}

std::string leaderboard_jsonl(const Leaderboard& board) {
  std::string out;
  for (const auto& e : board.entries) {
    nlohmann::ordered_json record;
    record["team"] = e.team;
    record["position"] = e.position;
    record["average_rank"] = e.average_rank;
    record["overall_mean"] = e.overall_mean;
    nlohmann::ordered_json tasks = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < board.tasks.size(); ++k) {
      tasks[board.tasks[k]] = {{"mean", e.mean[k]}, {"std", e.std[k]}};
    }
    record["tasks"] = std::move(tasks);
    out += record.dump();
    out += '\n';
  }
  return out;
}

ConsistencyReport check_consistency(
    const ResultTable& table,
    std::span<const std::vector<std::string>> parts) {
  const std::size_t n_tasks = table.tasks().size();
  std::vector<int> owner(n_tasks, -1);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (const std::string& task : parts[p]) {
      const auto it =
          std::find(table.tasks().begin(), table.tasks().end(), task);
      if (it == table.tasks().end()) {
        throw BadPartition("unknown task '" + task + "' in part " +
                           std::to_string(p));
      }
      const auto k = static_cast<std::size_t>(it - table.tasks().begin());
      if (owner[k] != -1) {
        throw BadPartition("task '" + task + "' appears in more than one part");
      }
      owner[k] = static_cast<int>(p);
    }
  }
  for (std::size_t k = 0; k < n_tasks; ++k) {
    if (owner[k] == -1) {
      throw BadPartition("task '" + table.tasks()[k] + "' is not in any part");
    }
  }
  if (n_tasks == 0) throw BadPartition("no tasks to partition");

  const RepeatSummary summary = aggregate_repeats(table);
  ConsistencyReport report;
  std::vector<std::vector<double>> part_sums;
  for (const auto& part : parts) {
    if (part.empty()) continue;
    std::vector<std::size_t> idx;
    for (const auto& task : part) idx.push_back(table.task_index(task));
    part_sums.push_back(rank_sums(summary.mean, idx));
    report.part_orderings.push_back(ordering_of(part_sums.back(), table.teams()));
  }
  std::vector<std::size_t> all(n_tasks);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const std::vector<double> whole = rank_sums(summary.mean, all);
  report.whole_ordering = ordering_of(whole, table.teams());

  report.premise_holds = true;
  for (std::size_t p = 1; p < part_sums.size(); ++p) {
    if (!same_weak_order(part_sums[0], part_sums[p])) {
      report.premise_holds = false;
    }
  }
  report.conclusion_holds =
      report.premise_holds && same_weak_order(part_sums[0], whole);
  return report;
}

namespace {

struct Centered {
  std::vector<double> values;
  double sum_squares = 0.0;
};

Centered center(std::span<const double> v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) /
                      static_cast<double>(v.size());
  Centered c;
  for (double x : v) {
    c.values.push_back(x - mean);
    c.sum_squares += (x - mean) * (x - mean);
  }
  return c;
}

double cross(const std::vector<double>& x, const std::vector<double>& y,
             std::span<const std::size_t> perm) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[perm[i]];
  return s;
}

}  // namespace

CorrelationResult pearson_rank_correlation(std::span<const double> rx,
                                           std::span<const double> ry,
                                           const PermutationOptions& options) {
  if (rx.size() != ry.size()) {
    throw LengthMismatch("rank vectors have lengths " +
                         std::to_string(rx.size()) + " and " +
                         std::to_string(ry.size()));
  }
  if (rx.size() < 3) throw LengthMismatch("need at least 3 entries");
  for (std::size_t i = 0; i < rx.size(); ++i) {
    if (!std::isfinite(rx[i]) || !std::isfinite(ry[i])) {
      throw InvalidTable("rank vectors must be finite");
    }
  }
  const Centered x = center(rx);
  const Centered y = center(ry);
  if (x.sum_squares == 0.0 || y.sum_squares == 0.0) {
    throw ZeroVariance("a rank vector has zero variance");
  }
  const std::size_t n = rx.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const double observed = cross(x.values, y.values, perm);

  CorrelationResult result;
  result.rho = std::clamp(
      observed / std::sqrt(x.sum_squares * y.sum_squares), -1.0, 1.0);

  // The denominator is permutation-invariant, so |rho| ordering is the
  // ordering of |cross products|.
  const double threshold =
      std::abs(observed) - 1e-12 * std::max(1.0, std::abs(observed));
  const bool exact =
      options.method == PermutationOptions::Method::kExact ||
      (options.method == PermutationOptions::Method::kAuto &&
       n <= options.exact_limit);
  std::size_t extreme = 0;
  std::size_t total = 0;
  if (exact) {
    do {
      if (std::abs(cross(x.values, y.values, perm)) >= threshold) ++extreme;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    if (options.draws == 0) throw InvalidConfig("draws must be positive");
    std::mt19937_64 rng(options.seed);
    for (std::size_t d = 0; d < options.draws; ++d) {
      std::shuffle(perm.begin(), perm.end(), rng);
      if (std::abs(cross(x.values, y.values, perm)) >= threshold) ++extreme;
    }
    total = options.draws;
  }
  result.exact = exact;
  result.permutations = total;
  result.p_value = static_cast<double>(extreme) / static_cast<double>(total);
  return result;
}

}  // namespace anytime
