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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "../oracles.hpp"
#include "anytime/cli.hpp"
#include "anytime/metrics.hpp"
#include "anytime/orchestrator.hpp"
#include "anytime/portfolio.hpp"
#include "anytime/ranking.hpp"

namespace fs = std::filesystem;
using namespace anytime;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const std::string& name, double time_limit,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double took =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (took > time_limit) {
    o.pass = false;
    o.detail += " (over time limit)";
  }
  if (!o.pass) ++failures;
  std::ostringstream line;
  line.precision(3);
  line << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << std::fixed
       << took << " s]  " << o.detail;
  std::cout << line.str() << std::endl;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Random step curve with `n` points in [0, budget); optionally pinned at t=0.
std::vector<CurvePoint> random_curve(std::mt19937_64& rng, double budget,
                                     std::size_t n, bool at_zero) {
  std::uniform_real_distribution<double> t(0.0, budget);
  std::uniform_real_distribution<double> s(-1.0, 1.0);
  std::vector<double> times(n);
  for (auto& v : times) v = t(rng);
  if (at_zero) times[0] = 0.0;
  std::sort(times.begin(), times.end());
  std::vector<CurvePoint> pts;
  for (double v : times) pts.push_back({v, s(rng)});
  return pts;
}

std::vector<oracle::Step> steps_of(const std::vector<CurvePoint>& pts) {
  std::vector<oracle::Step> out;
  for (const auto& p : pts) out.push_back({p.timestamp, p.score});
  return out;
}

Outcome auc_oracle() {
  std::mt19937_64 rng(101);
  std::size_t mismatches = 0, done = 0;
  while (done < 1000) {
    const std::size_t n = 2 + rng() % 99;
    const int levels = 1 + static_cast<int>(rng() % 20);  // few levels: ties
    std::vector<double> scores(n);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng() % levels) / levels;
      labels[i] = rng() % 2;
    }
    const auto pos = std::count(labels.begin(), labels.end(), 1);
    if (pos == 0 || pos == static_cast<long>(n)) continue;
    ++done;
    if (auc_binary(scores, labels) != oracle::pair_count_auc(scores, labels)) {
      ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches in 1000"};
}

Outcome alc_quadrature() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> budget(10.0, 7200.0);
  std::uniform_real_distribution<double> log_t0(std::log(0.1), std::log(1000.0));
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double T = budget(rng);
    const double t0 = std::exp(log_t0(rng));
    const auto pts = random_curve(rng, T, 1 + rng() % 50, rng() % 2);
    const double got = alc(LearningCurve(ScoringParams(T, t0), pts));
    const double want = oracle::quadrature_alc(steps_of(pts), T, t0);
    worst = std::max(worst, std::abs(got - want));
  }
  return {worst <= 1e-8, "max |diff| " + fmt(worst)};
}

Outcome constant_curve() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_real_distribution<double> T(1.0, 1e5);
  std::uniform_real_distribution<double> log_t0(-6, 6);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double v = i == 0 ? -1.0 : (i == 1 ? 1.0 : c(rng));
    const double budget = T(rng);
    const ScoringParams params(budget, std::pow(10.0, log_t0(rng)));
    std::vector<CurvePoint> pts{{0.0, v}};
    // Repeats of the same score change nothing.
    if (i % 2) pts.push_back({budget / 3, v});
    worst = std::max(worst, std::abs(alc(LearningCurve(params, pts)) - v));
  }
  return {worst <= 1e-12, "max |alc - c| " + fmt(worst) + " over 10000 curves"};
}

Outcome t0_limits() {
  std::mt19937_64 rng(404);
  double worst_small = 0.0, worst_large = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double T = 1200.0;
    const auto pts = random_curve(rng, T, 2 + rng() % 10, true);
    const double small = alc(LearningCurve(ScoringParams(T, 1e-9), pts));
    const double large = alc(LearningCurve(ScoringParams(T, 1e9), pts));
    worst_small = std::max(worst_small, std::abs(small - pts.front().score));
    worst_large = std::max(
        worst_large, std::abs(large - oracle::time_average(steps_of(pts), T)));
  }
  const bool small_ok = worst_small < 1e-4, large_ok = worst_large < 1e-4;
  return {small_ok && large_ok,
          "t0=1e-9: max |alc - s(0)| " + fmt(worst_small) +
              (small_ok ? "" : " (limit approached at rate 1/log(1/t0))") +
              "; t0=1e9: max |alc - time average| " + fmt(worst_large)};
}

Outcome rank_consistency() {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> level(0, 3);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::vector<std::string> teams{"t0", "t1", "t2", "t3"};
  const std::vector<std::string> tasks{"k0", "k1", "k2", "k3", "k4", "k5"};
  std::size_t premises = 0, violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    ResultTable table(teams, tasks);
    std::vector<double> quality(4);
    for (auto& q : quality) q = level(rng) / 4.0;
    const int kind = trial % 3;  // structured, noisy, uniform
    for (std::size_t t = 0; t < 4; ++t) {
      for (std::size_t k = 0; k < 6; ++k) {
        double v = kind == 2 ? u(rng) : quality[t] + (kind ? noise(rng) : 0.0);
        table.add(t, k, std::clamp(v, -1.0, 1.0));
      }
    }
    const std::size_t n_parts = 2 + rng() % 2;
    std::vector<std::vector<std::string>> parts(n_parts);
    for (const auto& task : tasks) parts[rng() % n_parts].push_back(task);
    const ConsistencyReport r = check_consistency(table, parts);
    if (!r.premise_holds) continue;
    ++premises;
    if (!r.conclusion_holds) ++violations;
  }
  return {violations == 0 && premises > 0,
          std::to_string(premises) + " premise-holding tables, " +
              std::to_string(violations) + " violations"};
}

Outcome crossing_flip() {
  const ScoringParams at1(1200.0, 1.0), at1e6(1200.0, 1e6);
  const std::vector<CurvePoint> early{{5.0, 0.6}}, late{{600.0, 0.9}};
  const double e1 = alc(LearningCurve(at1, early));
  const double l1 = alc(LearningCurve(at1, late));
  const double e6 = alc(LearningCurve(at1e6, early));
  const double l6 = alc(LearningCurve(at1e6, late));
  const bool flipped = (e1 > l1) != (e6 > l6);
  return {flipped, "t0=1: early " + fmt(e1) + " late " + fmt(l1) +
                       "; t0=1e6: early " + fmt(e6) + " late " + fmt(l6)};
}

Outcome timing_fidelity() {
  testing::TempDir dir;
  const TaskBundle task = testing::make_small_task(dir / "task");
  ScriptedSolver s;
  s.schedule = {{2.0, testing::tied_scores()}, {8.0, testing::perfect_scores()}};
  RunConfig config;
  config.budget = 60.0;
  const ScoringParams params(60.0, 3.0);
  const double virtual_alc = score_run(simulate_run(task, s, config), task, params).alc;
  double worst = 0.0;
  for (int run = 0; run < 5; ++run) {
    const RunRecord r = run_scripted(task, s, config, ANYTIME_SCRIPTED_SOLVER,
                                     dir / ("stage" + std::to_string(run)));
    worst = std::max(worst, std::abs(score_run(r, task, params).alc - virtual_alc));
  }
  return {worst <= 0.02, "virtual " + fmt(virtual_alc) + ", max |diff| " +
                             fmt(worst) + " over 5 runs"};
}

Outcome greedy_portfolio_bound() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double bound = 1.0 - 1.0 / std::exp(1.0);
  std::size_t checks = 0, below = 0, modular_miss = 0;
  double worst_ratio = 1.0;
  for (int m = 0; m < 500; ++m) {
    const std::size_t n = 1 + rng() % 12;
    const std::size_t d = m % 5 == 0 ? 1 : 1 + rng() % 8;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<double> flat;
    for (auto& r : rows) {
      for (auto& v : r) {
        v = u(rng);
        flat.push_back(v);
      }
    }
    std::vector<std::string> configs(n), datasets(d);
    for (std::size_t i = 0; i < n; ++i) configs[i] = "c" + std::to_string(i);
    for (std::size_t j = 0; j < d; ++j) datasets[j] = "d" + std::to_string(j);
    const PerformanceMatrix matrix(configs, datasets, Grid<double>(n, d, flat));
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, n); ++k) {
      const double got = oracle::coverage(rows, greedy_portfolio(matrix, k));
      const double opt = oracle::best_subset_coverage(rows, k);
      ++checks;
      worst_ratio = std::min(worst_ratio, got / opt);
      if (got < bound * opt) ++below;
      if (d == 1 && got != opt) ++modular_miss;
    }
  }
  return {below == 0 && modular_miss == 0,
          std::to_string(checks) + " checks, worst greedy/opt " +
              fmt(worst_ratio) + ", single-dataset misses " +
              std::to_string(modular_miss)};
}

Outcome pearson_monte_carlo() {
  std::mt19937_64 rng(707);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x{1, 2, 3, 4, 5}, y{1, 2, 3, 4, 5};
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    if (trial == 4) y = {1.5, 1.5, 3, 4.5, 4.5};  // tied ranks
    PermutationOptions opts;
    opts.method = PermutationOptions::Method::kMonteCarlo;
    opts.draws = 1000000;
    opts.seed = 1000 + trial;
    const double mc = pearson_rank_correlation(x, y, opts).p_value;
    worst = std::max(worst, std::abs(mc - oracle::exhaustive_permutation_p(x, y)));
  }
  return {worst <= 0.005, "max |p_mc - p_exact| " + fmt(worst) + " over 5 pairs"};
}

Outcome score_determinism() {
  testing::TempDir dir;
  testing::make_small_task(dir / "task");
  fs::create_directories(dir / "events");
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::string events;
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<double> v(8);
    for (auto& x : v) x = u(rng);
    const auto p = write_predictions(ScoreMatrix(4, 2, v), dir / "events", i);
    events += format_real(1.5 * i + u(rng)) + " " + p.filename().string() + "\n";
  }
  testing::write_text(dir / "events" / "events.txt", events);
  std::vector<std::string> stdout_text, payloads;
  for (const char* sub : {"a", "b", "c"}) {
    std::ostringstream out, err;
    const int code = cli::run({"--out", (dir / sub).string(), "score",
                               (dir / "events" / "events.txt").string(),
                               (dir / "task").string()},
                              out, err);
    if (code != cli::kOk) return {false, "score failed: " + err.str()};
    stdout_text.push_back(out.str());
    payloads.push_back(read_file(dir / sub / "curve.csv") + "\n" +
                       read_file(dir / sub / "score.json"));
  }
  const bool same = std::adjacent_find(stdout_text.begin(), stdout_text.end(),
                                       std::not_equal_to<>()) ==
                        stdout_text.end() &&
                    std::adjacent_find(payloads.begin(), payloads.end(),
                                       std::not_equal_to<>()) == payloads.end();
  return {same, same ? "3 invocations byte-identical" : "outputs differ"};
}

}  // namespace

int main() {
  criterion("AUC oracle equivalence", 5, auc_oracle);
  criterion("ALC quadrature equivalence", 10, alc_quadrature);
  criterion("Constant-curve identity", 10, constant_curve);
  criterion("t0 limit checks", 10, t0_limits);
  criterion("Rank-consistency theorem regression", 30, rank_consistency);
  criterion("Crossing-curve t0 flip", 10, crossing_flip);
  criterion("End-to-end timing fidelity", 360, timing_fidelity);
  criterion("Greedy portfolio near-optimality", 60, greedy_portfolio_bound);
  criterion("Pearson permutation exactness", 60, pearson_monte_carlo);
  criterion("Score determinism", 10, score_determinism);
  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
