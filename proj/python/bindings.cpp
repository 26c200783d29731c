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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "anytime/cli.hpp"
#include "anytime/errors.hpp"
#include "anytime/metrics.hpp"
#include "anytime/portfolio.hpp"
#include "anytime/ranking.hpp"
#include "anytime/taskio.hpp"

namespace py = pybind11;
using namespace anytime;

namespace {

using Doubles = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Bytes =
    py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

std::vector<double> flat(const Doubles& a) {
  return {a.data(), a.data() + a.size()};
}

ScoreMatrix score_matrix(const Doubles& a) {
  if (a.ndim() != 2) throw ShapeMismatch("score matrix must be 2-D");
  return ScoreMatrix(a.shape(0), a.shape(1), flat(a));
}

LabelMatrix label_matrix(const Bytes& a) {
  if (a.ndim() != 2) throw ShapeMismatch("label matrix must be 2-D");
  return LabelMatrix(a.shape(0), a.shape(1),
                     std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

PerformanceMatrix performance_matrix(const Doubles& a) {
  if (a.ndim() != 2) throw ShapeMismatch("performance matrix must be 2-D");
  std::vector<std::string> configs, datasets;
  for (py::ssize_t i = 0; i < a.shape(0); ++i) configs.push_back("c" + std::to_string(i));
  for (py::ssize_t j = 0; j < a.shape(1); ++j) datasets.push_back("d" + std::to_string(j));
  return PerformanceMatrix(configs, datasets,
                           Grid<double>(a.shape(0), a.shape(1), flat(a)));
}

py::array_t<double> to_numpy(const Grid<double>& g) {
  py::array_t<double> out({g.rows(), g.cols()});
  std::copy(g.values().begin(), g.values().end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scoring, ranking and portfolio routines of the anytime benchmark";
  py::register_exception<Error>(m, "AnytimeError", PyExc_ValueError);

  m.def("auc_binary",
        [](const Doubles& scores, const Bytes& labels) {
          return auc_binary(std::span(scores.data(), scores.size()),
                            std::span(labels.data(), labels.size()));
        },
        py::arg("scores"), py::arg("labels"));
  m.def("nauc",
        [](const Doubles& scores, const Bytes& labels) {
          return nauc(score_matrix(scores), label_matrix(labels));
        },
        py::arg("scores"), py::arg("labels"));
  m.def("time_transform",
        [](double t, double budget, double t0) {
          return time_transform(t, ScoringParams(budget, t0));
        },
        py::arg("t"), py::arg("budget") = ScoringParams::kDefaultBudget,
        py::arg("t0") = ScoringParams::kDefaultT0);
  m.def("alc",
        [](const Doubles& timestamps, const Doubles& scores, double budget,
           double t0) {
          if (timestamps.size() != scores.size()) {
            throw ShapeMismatch("timestamps and scores differ in length");
          }
          std::vector<CurvePoint> pts;
          for (py::ssize_t i = 0; i < timestamps.size(); ++i) {
            pts.push_back({timestamps.data()[i], scores.data()[i]});
          }
          return alc(LearningCurve(ScoringParams(budget, t0), std::move(pts)));
        },
        py::arg("timestamps"), py::arg("scores"),
        py::arg("budget") = ScoringParams::kDefaultBudget,
        py::arg("t0") = ScoringParams::kDefaultT0);
  m.def("score_events",
        [](const std::vector<double>& timestamps,
           const std::vector<Doubles>& predictions, const Bytes& labels,
           double budget, double t0) {
          if (timestamps.size() != predictions.size()) {
            throw ShapeMismatch("timestamps and predictions differ in length");
          }
          std::vector<TimedScores> events;
          for (std::size_t i = 0; i < timestamps.size(); ++i) {
            events.push_back({timestamps[i], score_matrix(predictions[i])});
          }
          const LearningCurve curve = curve_from_events(
              events, label_matrix(labels), ScoringParams(budget, t0));
          std::vector<std::pair<double, double>> points;
          for (const auto& p : curve.points()) points.emplace_back(p.timestamp, p.score);
          py::dict out;
          out["curve"] = points;
          out["alc"] = alc(curve);
          out["final_nauc"] = points.empty() ? 0.0 : points.back().second;
          return out;
        },
        py::arg("timestamps"), py::arg("predictions"), py::arg("labels"),
        py::arg("budget") = ScoringParams::kDefaultBudget,
        py::arg("t0") = ScoringParams::kDefaultT0,
        "Learning curve and ALC for timestamped prediction matrices.");
  m.def("parse_predictions",
        [](const std::string& text, std::size_t n_rows, std::size_t n_cols) {
          return to_numpy(parse_prediction_text(text, n_rows, n_cols, "<text>"));
        },
        py::arg("text"), py::arg("n_rows"), py::arg("n_cols"));
  m.def("format_predictions",
        [](const Doubles& scores) { return format_predictions(score_matrix(scores)); },
        py::arg("scores"));

  m.def("ranks_per_task",
        [](const Doubles& scores) {
          return ranks_per_task(std::span(scores.data(), scores.size()));
        },
        py::arg("scores"));
  m.def("leaderboard",
        [](const std::vector<std::tuple<std::string, std::string, double>>& rows) {
          std::vector<std::string> teams, tasks;
          for (const auto& [team, task, value] : rows) {
            if (std::find(teams.begin(), teams.end(), team) == teams.end()) teams.push_back(team);
            if (std::find(tasks.begin(), tasks.end(), task) == tasks.end()) tasks.push_back(task);
          }
          ResultTable table(teams, tasks);
          for (const auto& [team, task, value] : rows) table.add(team, task, value);
          const Leaderboard board = average_rank(table);
          py::list out;
          for (const auto& e : board.entries) {
            py::dict d;
            d["team"] = e.team;
            d["position"] = e.position;
            d["average_rank"] = e.average_rank;
            d["overall_mean"] = e.overall_mean;
            d["mean"] = e.mean;
            d["std"] = e.std;
            out.append(d);
          }
          return out;
        },
        py::arg("rows"),
        "Average-rank leaderboard from (team, task, alc) rows; repeated "
        "(team, task) rows are repeats.");
  m.def("pearson_rank_correlation",
        [](const Doubles& x, const Doubles& y, const std::string& method,
           std::size_t draws, std::uint64_t seed) {
          PermutationOptions opts;
          if (method == "exact") opts.method = PermutationOptions::Method::kExact;
          else if (method == "monte_carlo") opts.method = PermutationOptions::Method::kMonteCarlo;
          else if (method != "auto") throw InvalidConfig("unknown method '" + method + "'");
          opts.draws = draws;
          opts.seed = seed;
          const CorrelationResult r = pearson_rank_correlation(
              std::span(x.data(), x.size()), std::span(y.data(), y.size()), opts);
          py::dict out;
          out["rho"] = r.rho;
          out["p_value"] = r.p_value;
          out["exact"] = r.exact;
          out["permutations"] = r.permutations;
          return out;
        },
        py::arg("x"), py::arg("y"), py::arg("method") = "auto",
        py::arg("draws") = 100000, py::arg("seed") = 0);

  m.def("portfolio_coverage",
        [](const Doubles& matrix, const std::vector<std::size_t>& subset) {
          return portfolio_coverage(performance_matrix(matrix), subset);
        },
        py::arg("matrix"), py::arg("subset"));
  m.def("greedy_portfolio",
        [](const Doubles& matrix, std::size_t k) {
          return greedy_portfolio(performance_matrix(matrix), k);
        },
        py::arg("matrix"), py::arg("k"));
  m.def("generalist_config",
        [](const Doubles& matrix) {
          return generalist_config(performance_matrix(matrix));
        },
        py::arg("matrix"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code;
          {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
          }
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"),
        "Runs the command line in-process; returns (exit code, stdout, stderr).");
}
