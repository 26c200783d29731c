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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anytime/matrix.hpp"

namespace anytime {

// Teams x tasks x repeats of ALC values. Repeats may be ragged; a repeat
// slot can be absent (never run, or excluded by hand).
class ResultTable {
 public:
  ResultTable(std::vector<std::string> teams, std::vector<std::string> tasks);

  const std::vector<std::string>& teams() const { return teams_; }
  const std::vector<std::string>& tasks() const { return tasks_; }
  std::size_t team_index(std::string_view team) const;
  std::size_t task_index(std::string_view task) const;

  // Appends a repeat. Throws InvalidTable unless alc is in [-1, 1].
  void add(std::size_t team, std::size_t task, double alc);
  void add(std::string_view team, std::string_view task, double alc);
  // Stores a value at an explicit repeat slot, leaving gaps absent.
  void set(std::size_t team, std::size_t task, std::size_t repeat, double alc);

  std::span<const std::optional<double>> slots(std::size_t team,
                                               std::size_t task) const {
    return cells_[team * tasks_.size() + task];
  }
  std::vector<double> present(std::size_t team, std::size_t task) const;

  struct Exclusion {
    std::string team;
    std::string task;
    std::size_t repeat = 0;
  };
  // Copy with the listed repeat slots marked absent.
  ResultTable without(std::span<const Exclusion> exclusions) const;
  // Copy restricted to `tasks`, in that order.
  ResultTable restricted_to(std::span<const std::string> tasks) const;

 private:
  std::vector<std::string> teams_;
  std::vector<std::string> tasks_;
  std::vector<std::vector<std::optional<double>>> cells_;
};

// Long format "team,task,repeat,alc".
ResultTable read_results_csv(const std::string& path);
std::vector<ResultTable::Exclusion> read_exclusions_csv(
    const std::string& path);

struct RepeatSummary {
  Grid<double> mean;  // teams x tasks
  Grid<double> std;   // sample standard deviation, 0 for a single repeat
};

RepeatSummary aggregate_repeats(const ResultTable& table);

// Per-team ranks, 1 = best. Higher score ranks better; ties share the mean
// of the ranks they span.
using RankVector = std::vector<double>;
RankVector ranks_per_task(std::span<const double> scores);

struct LeaderboardEntry {
  std::string team;
  std::vector<double> mean;  // per task
  std::vector<double> std;   // per task
  double average_rank = 0.0;
  double overall_mean = 0.0;  // mean ALC across tasks, first tie-break
  std::size_t position = 0;   // 1-based
};

struct Leaderboard {
  std::vector<std::string> tasks;
  std::vector<LeaderboardEntry> entries;  // ordered by position
};

// Ascending average rank; ties go to the higher mean ALC across tasks, then
// to the lexicographically smaller team id.
Leaderboard average_rank(const ResultTable& table);

std::string leaderboard_csv(const Leaderboard& board);
// One JSON object per line, same content as the CSV.
std::string leaderboard_jsonl(const Leaderboard& board);

struct ConsistencyReport {
  // Team orderings (best first, tied teams adjacent) per part and overall.
  std::vector<std::vector<std::string>> part_orderings;
  std::vector<std::string> whole_ordering;
  // Every non-empty part induces the same weak order on teams.
  bool premise_holds = false;
  // The whole task set induces that same weak order.
  bool conclusion_holds = false;

  bool consistent() const { return !premise_holds || conclusion_holds; }
};

// Partition-consistency of average ranking. `parts` must be disjoint and
// cover every task; empty parts are ignored.
ConsistencyReport check_consistency(
    const ResultTable& table,
    std::span<const std::vector<std::string>> parts);

struct PermutationOptions {
  enum class Method { kAuto, kExact, kMonteCarlo };
  Method method = Method::kAuto;
  // kAuto enumerates all n! orderings up to this size.
  std::size_t exact_limit = 8;
  std::size_t draws = 100000;
  std::uint64_t seed = 0;
};

struct CorrelationResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided
  bool exact = false;
  std::size_t permutations = 0;
};

// Pearson correlation of two rank vectors with a permutation p-value.
CorrelationResult pearson_rank_correlation(std::span<const double> rx,
                                           std::span<const double> ry,
                                           const PermutationOptions& options = {});

}  // namespace anytime
