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

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "anytime/matrix.hpp"
#include "anytime/metrics.hpp"
#include "anytime/ranking.hpp"

namespace anytime {

struct ArchiveKey {
  std::string method;
  std::string task;
  std::size_t repeat = 0;

  friend auto operator<=>(const ArchiveKey&, const ArchiveKey&) = default;
};

// Learning curves of past runs, kept as raw (timestamp, NAUC) points so ALC
// can be recomputed under any t0.
class CurveArchive {
 public:
  // Throws InvalidCurve if the points are not a valid curve under `budget`,
  // KeyMismatch if the key is already present.
  void add(ArchiveKey key, double budget, std::vector<CurvePoint> points);
  void add(ArchiveKey key, const LearningCurve& curve);

  struct Run {
    double budget = 0.0;
    std::vector<CurvePoint> points;
  };
  const std::map<ArchiveKey, Run>& runs() const { return runs_; }
  // Methods and tasks in first-insertion order.
  const std::vector<std::string>& methods() const { return methods_; }
  const std::vector<std::string>& tasks() const { return tasks_; }

  LearningCurve curve(const ArchiveKey& key, double t0) const;

 private:
  std::map<ArchiveKey, Run> runs_;
  std::vector<std::string> methods_;
  std::vector<std::string> tasks_;
};

// Long format "method,task,repeat,budget,timestamp,score". A run with no
// predictions is a single row with empty timestamp and score.
CurveArchive read_archive_csv(const std::string& path);
std::string archive_csv(const CurveArchive& archive);

// 20 log-spaced values from 1e-2 to 1e6 seconds.
std::vector<double> default_t0_grid();

struct OrderFlip {
  std::string method_a;
  std::string method_b;
  std::string task;  // empty: the flip is in the average-rank order
  double t0_a_ahead = 0.0;  // a grid value where a beats b
  double t0_b_ahead = 0.0;  // a grid value where b beats a
};

struct T0Sweep {
  std::vector<double> grid;
  std::vector<std::string> methods;
  std::vector<std::string> tasks;
  std::vector<Grid<double>> alc;             // per t0: methods x tasks
  std::vector<RankVector> average_ranks;     // per t0: per method
  std::vector<OrderFlip> flips;
};

// Rescoring of every archived run at every t0 (mean over repeats), the
// average rank per t0, and every method pair whose order changes on the
// grid. All curves must share one budget.
T0Sweep t0_sweep(const CurveArchive& archive, std::span<const double> grid);

// "method,task,t0,alc" rows, plot-ready.
std::string t0_sweep_alc_csv(const T0Sweep& sweep);
// "method,t0,average_rank" rows.
std::string t0_sweep_rank_csv(const T0Sweep& sweep);
std::string t0_sweep_flips_csv(const T0Sweep& sweep);

inline constexpr double kDefaultNaucThreshold = 0.05;

struct BudgetComparisonRow {
  std::string method;
  std::string task;
  double final_a = 0.0;  // mean final NAUC over repeats
  double final_b = 0.0;
  double diff = 0.0;     // final_b - final_a
  bool flagged = false;  // |diff| > threshold
};

std::vector<BudgetComparisonRow> budget_comparison(
    const CurveArchive& archive_a, const CurveArchive& archive_b,
    double threshold = kDefaultNaucThreshold);
std::string budget_comparison_csv(std::span<const BudgetComparisonRow> rows,
                                  double budget_a, double budget_b);

// Variants ordered by average rank with per-task mean and std.
Leaderboard ablation_table(const ResultTable& results);

struct ComponentSource {
  std::string tag;    // e.g. "DL", "EN", "HPO"
  std::string donor;  // method the component is taken from
};

struct VariantSpec {
  std::string base_method;
  std::set<std::string> removed_components;
  std::vector<ComponentSource> added_components;
  // Row of this variant in the result table; defaults to base + label().
  std::string method;

  // "-X" per removed tag, then "+Y" per added tag.
  std::string label() const;
  std::string method_id() const;
};

enum class CellState { kCount, kSameAsBase, kDuplicate, kNotTested };

struct CombinationCell {
  CellState state = CellState::kNotTested;
  std::size_t count = 0;  // tasks where the variant's mean ALC > the base's
  std::string variant;    // result-table id, for kCount
};

struct CombinationMatrix {
  std::vector<std::string> bases;
  std::vector<std::string> columns;           // variant labels
  std::vector<std::vector<CombinationCell>> cells;  // bases x columns
  std::size_t n_tasks = 0;
};

CombinationMatrix combination_matrix(
    const ResultTable& results, std::span<const std::string> bases,
    const std::map<std::string, std::vector<VariantSpec>>& variants);

// Blank field for every cell that is not a count.
std::string combination_matrix_csv(const CombinationMatrix& matrix);

}  // namespace anytime
