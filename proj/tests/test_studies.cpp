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

#include <algorithm>
#include <cmath>
#include <random>

#include "anytime/errors.hpp"
#include "anytime/studies.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace anytime;
using anytime::testing::TempDir;
using anytime::testing::write_text;

namespace {

double direct_alc(const std::vector<CurvePoint>& points, double budget,
                  double t0) {
  std::vector<oracle::Step> steps;
  for (const auto& p : points) steps.push_back({p.timestamp, p.score});
  return oracle::quadrature_alc(steps, budget, t0);
}

CurveArchive crossing_archive(double early_t, double early_s, double late_t,
                              double late_s, double budget) {
  CurveArchive a;
  a.add({"early", "task", 0}, budget, {{early_t, early_s}});
  a.add({"late", "task", 0}, budget, {{late_t, late_s}});
  return a;
}

}  // namespace

TEST_CASE("curve archive") {
  CurveArchive a;
  a.add({"m", "t", 0}, 100, {{1, 0.2}, {5, 0.4}});
  CHECK_THROWS_AS(a.add({"m", "t", 0}, 100, {{1, 0.2}}), KeyMismatch);
  CHECK_THROWS_AS(a.add({"m", "t", 1}, 100, {{200, 0.2}}), InvalidCurve);
  a.add({"m", "u", 0}, 100, {});
  a.add({"n", "t", 0}, 100, {{3, 0.1}});
  CHECK(a.methods() == std::vector<std::string>{"m", "n"});
  CHECK(a.tasks() == std::vector<std::string>{"t", "u"});
  const LearningCurve c = a.curve({"m", "t", 0}, 7);
  CHECK(c.params().t0() == 7);
  CHECK(c.params().budget() == 100);
  CHECK(alc(a.curve({"m", "u", 0}, 7)) == 0.0);
}

TEST_CASE("archive csv round trip") {
  CurveArchive a;
  a.add({"m", "t", 0}, 100, {{1, 0.2}, {5.5, 0.4}});
  a.add({"m", "t", 1}, 100, {});
  a.add({"n", "t", 0}, 100, {{0, -0.1}});
  TempDir dir;
  write_text(dir / "curves.csv", archive_csv(a));
  const CurveArchive b = read_archive_csv((dir / "curves.csv").string());
  REQUIRE(b.runs().size() == 3);
  for (const auto& [key, run] : a.runs()) {
    const auto& other = b.runs().at(key);
    CHECK(other.budget == run.budget);
    REQUIRE(other.points.size() == run.points.size());
    for (std::size_t i = 0; i < run.points.size(); ++i) {
      CHECK(other.points[i].timestamp == run.points[i].timestamp);
      CHECK(other.points[i].score == run.points[i].score);
    }
  }
  CHECK(archive_csv(b) == archive_csv(a));

  write_text(dir / "bad.csv",
             "method,task,repeat,budget,timestamp,score\n"
             "m,t,0,100,1,0.2\nm,t,0,200,2,0.3\n");
  CHECK_THROWS_AS(read_archive_csv((dir / "bad.csv").string()), ParseError);
}

TEST_CASE("default grid") {
  const auto g = default_t0_grid();
  REQUIRE(g.size() == 20);
  CHECK(g.front() == doctest::Approx(1e-2));
  CHECK(g.back() == doctest::Approx(1e6));
  for (std::size_t i = 1; i < g.size(); ++i) {
    CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(1e8, 1.0 / 19)));
  }
}

TEST_CASE("constant curves never flip") {
  CurveArchive a;
  a.add({"x", "t1", 0}, 600, {{0, 0.3}});
  a.add({"y", "t1", 0}, 600, {{0, 0.7}});
  a.add({"x", "t2", 0}, 600, {{0, 0.9}});
  a.add({"y", "t2", 0}, 600, {{0, 0.1}});
  const auto grid = default_t0_grid();
  const T0Sweep s = t0_sweep(a, grid);
  CHECK(s.flips.empty());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(s.alc[g](0, 0) == 0.3);
    CHECK(s.alc[g](1, 0) == 0.7);
    CHECK(s.average_ranks[g] == s.average_ranks[0]);
  }
}

TEST_CASE("crossing curves flip between small and large t0") {
  const std::vector<double> grid{1.0, 1e6};
  // Early 0.6 at t = 1 against late 0.9 at t = 60 under T = 1200.
  const CurveArchive a = crossing_archive(1, 0.6, 60, 0.9, 1200);
  const double e1 = direct_alc({{1, 0.6}}, 1200, 1.0);
  const double l1 = direct_alc({{60, 0.9}}, 1200, 1.0);
  const double e6 = direct_alc({{1, 0.6}}, 1200, 1e6);
  const double l6 = direct_alc({{60, 0.9}}, 1200, 1e6);
  REQUIRE(e1 > l1);
  REQUIRE(e6 < l6);
  const T0Sweep s = t0_sweep(a, grid);
  CHECK(s.alc[0](0, 0) == doctest::Approx(e1).epsilon(1e-10));
  CHECK(s.alc[1](1, 0) == doctest::Approx(l6).epsilon(1e-10));
  REQUIRE(s.flips.size() == 2);  // per task and in the average rank
  CHECK(s.flips[0].method_a == "early");
  CHECK(s.flips[0].method_b == "late");
  CHECK(s.flips[0].task == "task");
  CHECK(s.flips[0].t0_a_ahead == 1.0);
  CHECK(s.flips[0].t0_b_ahead == 1e6);
  CHECK(s.flips[1].task.empty());
  CHECK(t0_sweep_flips_csv(s).find("early,late,task,1,1e+06\n") !=
        std::string::npos);
}

TEST_CASE("early 0.6 at 5 against late 0.9 at 600 keeps its order") {
  // The late curve would need NAUC above 1 to overtake in the large-t0
  // limit, so no grid point reverses the order.
  const CurveArchive a = crossing_archive(5, 0.6, 600, 0.9, 1200);
  const T0Sweep s = t0_sweep(a, default_t0_grid());
  CHECK(s.flips.empty());
  CHECK(s.alc.back()(1, 0) == doctest::Approx(0.45).epsilon(1e-3));
  CHECK(s.alc.back()(0, 0) == doctest::Approx(0.6 * 1195 / 1200).epsilon(1e-3));
}

TEST_CASE("single-t0 sweep equals alc") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  CurveArchive a;
  for (int m = 0; m < 3; ++m) {
    for (int r = 0; r < 2; ++r) {
      std::vector<CurvePoint> pts;
      double t = 0;
      for (int i = 0; i < 4; ++i) {
        t += u(rng) * 200;
        pts.push_back({t, u(rng)});
      }
      a.add({"m" + std::to_string(m), "t", static_cast<std::size_t>(r)}, 1000,
            pts);
    }
  }
  const std::vector<double> grid{42.0};
  const T0Sweep s = t0_sweep(a, grid);
  for (std::size_t m = 0; m < 3; ++m) {
    const std::string id = "m" + std::to_string(m);
    const double mean = (alc(a.curve({id, "t", 0}, 42)) +
                         alc(a.curve({id, "t", 1}, 42))) / 2;
    CHECK(s.alc[0](m, 0) == mean);
  }
  CHECK(t0_sweep_alc_csv(s).rfind("method,task,t0,alc\n", 0) == 0);
  CHECK(t0_sweep_rank_csv(s).rfind("method,t0,average_rank\n", 0) == 0);

  CurveArchive mixed = a;
  mixed.add({"m0", "u", 0}, 500, {});
  CHECK_THROWS_AS(t0_sweep(mixed, grid), InvalidParams);
  CHECK_THROWS_AS(t0_sweep(a, std::vector<double>{}), InvalidParams);
}

TEST_CASE("budget comparison") {
  CurveArchive short_run, long_run;
  short_run.add({"m", "t", 0}, 1200, {{10, 0.5}, {100, 0.6}});
  short_run.add({"m", "t", 1}, 1200, {{10, 0.7}});
  short_run.add({"m", "u", 0}, 1200, {{10, 0.8}});
  long_run.add({"m", "t", 0}, 7200, {{10, 0.5}, {5000, 0.8}});
  long_run.add({"m", "u", 0}, 7200, {{10, 0.82}});
  const auto rows = budget_comparison(short_run, long_run);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].task == "t");
  CHECK(rows[0].final_a == doctest::Approx(0.65));
  CHECK(rows[0].final_b == 0.8);
  CHECK(rows[0].diff == doctest::Approx(0.15));
  CHECK(rows[0].flagged);
  CHECK(rows[1].diff == doctest::Approx(0.02));
  CHECK_FALSE(rows[1].flagged);

  const auto swapped = budget_comparison(long_run, short_run);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(swapped[i].diff == -rows[i].diff);
    CHECK(swapped[i].flagged == rows[i].flagged);
  }
  const std::string csv = budget_comparison_csv(rows, 1200, 7200);
  CHECK(csv.find("m,t,") != std::string::npos);

  long_run.add({"n", "t", 0}, 7200, {});
  CHECK_THROWS_AS(budget_comparison(short_run, long_run), KeyMismatch);
}

TEST_CASE("ablation table") {
  ResultTable t({"full", "-DL", "-EN"}, {"a", "b"});
  t.add(0, 0, 0.8); t.add(0, 1, 0.7);
  t.add(1, 0, 0.6); t.add(1, 1, 0.75);
  t.add(2, 0, 0.5); t.add(2, 1, 0.4);
  const Leaderboard b = ablation_table(t);
  CHECK(b.entries[0].team == "full");
  CHECK(b.entries[2].team == "-EN");
  CHECK(b.entries[2].average_rank == 3.0);
  CHECK_THROWS(ablation_table(ResultTable({"only"}, {"a"})));
}

TEST_CASE("combination matrix reproduces the three-base design") {
  const std::vector<std::string> bases{"DW", "DB", "AF"};
  // Component owners: DL from DW, EN from DB, HPO from AF.
  const std::map<std::string, std::string> owner{
      {"DL", "DW"}, {"EN", "DB"}, {"HPO", "AF"}};
  const std::vector<std::vector<std::string>> column_tags{
      {"DL"}, {"EN"}, {"HPO"}, {"DL", "EN"}, {"DL", "HPO"}, {"EN", "HPO"}};
  std::map<std::string, std::vector<VariantSpec>> variants;
  for (const auto& base : bases) {
    for (const auto& tags : column_tags) {
      VariantSpec v;
      v.base_method = base;
      for (const auto& tag : tags) v.added_components.push_back({tag, owner.at(tag)});
      variants[base].push_back(v);
    }
  }
  // Counts of tasks (out of 6) where the variant beats its base.
  const std::map<std::string, int> wins{
      {"DW+EN", 1}, {"DW+HPO", 1}, {"DW+EN+HPO", 1},
      {"DB+DL", 0}, {"DB+HPO", 0}, {"DB+DL+HPO", 0},
      {"AF+DL", 1}, {"AF+EN", 4}, {"AF+DL+EN", 2}};
  std::vector<std::string> teams = bases;
  for (const auto& [id, n] : wins) teams.push_back(id);
  const std::vector<std::string> tasks{"i1", "i2", "i3", "v1", "v2", "v3"};
  ResultTable results(teams, tasks);
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    for (const auto& base : bases) {
      results.add(base, tasks[k], 0.5);
      results.add(base, tasks[k], 0.5);
    }
    for (const auto& [id, n] : wins) {
      const int kk = static_cast<int>(k);
      // One tie right after the wins: equal means are not improvements.
      const double v = kk < n ? 0.6 : (kk == n ? 0.5 : 0.4);
      results.add(id, tasks[k], v);
    }
  }

  const CombinationMatrix m = combination_matrix(results, bases, variants);
  CHECK(m.columns == std::vector<std::string>{"+DL", "+EN", "+HPO", "+DL+EN",
                                              "+DL+HPO", "+EN+HPO"});
  CHECK(m.n_tasks == 6);
  const std::string csv = combination_matrix_csv(m);
  CHECK(csv ==
        "base,+DL,+EN,+HPO,+DL+EN,+DL+HPO,+EN+HPO\n"
        "DW,,1,1,,,1\n"
        "DB,0,,0,,0,\n"
        "AF,1,4,,2,,\n");
  std::size_t same = 0, dup = 0, counts = 0;
  for (const auto& row : m.cells) {
    for (const auto& c : row) {
      same += c.state == CellState::kSameAsBase;
      dup += c.state == CellState::kDuplicate;
      if (c.state == CellState::kCount) {
        ++counts;
        CHECK(c.count <= m.n_tasks);
      }
    }
  }
  CHECK(same == 3);
  CHECK(dup == 6);
  CHECK(counts == 9);
  CHECK(m.cells[2][1].variant == "AF+EN");
}

TEST_CASE("combination matrix errors") {
  ResultTable results({"A", "A-X"}, {"t"});
  results.add(0, 0, 0.5);
  results.add(1, 0, 0.6);
  const std::vector<std::string> bases{"A"};
  VariantSpec v;
  v.base_method = "A";
  v.removed_components = {"X"};
  CHECK(v.label() == "-X");
  CHECK(v.method_id() == "A-X");
  std::map<std::string, std::vector<VariantSpec>> ok{{"A", {v}}};
  CHECK(combination_matrix(results, bases, ok).cells[0][0].count == 1);
  std::map<std::string, std::vector<VariantSpec>> unknown{{"B", {v}}};
  CHECK_THROWS_AS(combination_matrix(results, bases, unknown), UnknownBase);
  VariantSpec both = v;
  both.added_components.push_back({"X", "B"});
  std::map<std::string, std::vector<VariantSpec>> clash{{"A", {both}}};
  CHECK_THROWS_AS(combination_matrix(results, bases, clash), InvalidConfig);
}
