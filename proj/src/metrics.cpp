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

#include "anytime/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anytime/errors.hpp"

namespace anytime {

ScoringParams::ScoringParams(double budget, double t0)
    : budget_(budget), t0_(t0) {
  if (!(budget_ > 0.0) || !std::isfinite(budget_)) {
    throw InvalidParams("budget must be a positive number of seconds, got " +
                        std::to_string(budget));
  }
  if (!(t0_ > 0.0) || !std::isfinite(t0_)) {
    throw InvalidParams("t0 must be a positive number of seconds, got " +
                        std::to_string(t0));
  }
}

LearningCurve::LearningCurve(ScoringParams params,
                             std::vector<CurvePoint> points)
    : params_(params), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const CurvePoint& p = points_[i];
    if (!(p.timestamp >= 0.0 && p.timestamp <= params_.budget())) {
      throw InvalidCurve("point " + std::to_string(i) + " has timestamp " +
                         std::to_string(p.timestamp) + " outside [0, " +
                         std::to_string(params_.budget()) + "]");
    }
    if (!(p.score >= -1.0 && p.score <= 1.0)) {
      throw InvalidCurve("point " + std::to_string(i) + " has score " +
                         std::to_string(p.score) + " outside [-1, 1]");
    }
    if (i > 0 && !(points_[i - 1].timestamp < p.timestamp)) {
      throw InvalidCurve("timestamps must be strictly increasing at point " +
                         std::to_string(i));
    }
  }
}

double LearningCurve::value_at(double t) const {
  auto it = std::upper_bound(
      points_.begin(), points_.end(), t,
      [](double v, const CurvePoint& p) { return v < p.timestamp; });
  if (it == points_.begin()) return 0.0;
  return std::prev(it)->score;
}

double auc_binary(std::span<const double> scores,
                  std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeMismatch("auc_binary: " + std::to_string(scores.size()) +
                        " scores but " + std::to_string(labels.size()) +
                        " labels");
  }
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw NonFiniteScore("auc_binary: score " + std::to_string(i) +
                           " is not finite");
    }
    if (labels[i] > 1) {
      throw InvalidLabels("auc_binary: label " + std::to_string(i) +
                          " is not 0 or 1");
    }
    n_pos += labels[i];
  }
  const std::uint64_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DegenerateClass("auc_binary: labels need both classes (" +
                          std::to_string(n_pos) + " positive, " +
                          std::to_string(n_neg) + " negative)");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the Mann-Whitney U statistic, kept integral so the result is the
  // exact pair-count ratio.
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  for (std::size_t begin = 0; begin < order.size();) {
    std::size_t end = begin;
    std::uint64_t pos_tied = 0;
    while (end < order.size() && scores[order[end]] == scores[order[begin]]) {
      pos_tied += labels[order[end]];
      ++end;
    }
    const std::uint64_t neg_tied = (end - begin) - pos_tied;
    twice_u += 2 * pos_tied * neg_below + pos_tied * neg_tied;
    neg_below += neg_tied;
    begin = end;
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double nauc(const ScoreMatrix& scores, const LabelMatrix& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
    throw ShapeMismatch("nauc: scores are " + std::to_string(scores.rows()) +
                        "x" + std::to_string(scores.cols()) +
                        " but labels are " + std::to_string(labels.rows()) +
                        "x" + std::to_string(labels.cols()));
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < labels.cols(); ++c) {
    const std::vector<std::uint8_t> y = labels.column(c);
    const auto positives = std::count(y.begin(), y.end(), std::uint8_t{1});
    if (positives == 0 || positives == static_cast<long>(y.size())) continue;
    sum += 2.0 * auc_binary(scores.column(c), y) - 1.0;
    ++counted;
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

double time_transform(double t, const ScoringParams& params) {
  if (!(t >= 0.0 && t <= params.budget())) {
    throw OutOfBudgetRange("time " + std::to_string(t) + " outside [0, " +
                           std::to_string(params.budget()) + "]");
  }
  return std::log1p(t / params.t0()) /
         std::log1p(params.budget() / params.t0());
}

double alc(const LearningCurve& curve) {
  const ScoringParams& params = curve.params();
  const double t0 = params.t0();
  const double norm = std::log1p(params.budget() / t0);
  const auto points = curve.points();
  double area = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double begin = points[i].timestamp;
    const double end =
        i + 1 < points.size() ? points[i + 1].timestamp : params.budget();
    // t~(end) - t~(begin) without cancellation.
    area += points[i].score * (std::log1p((end - begin) / (t0 + begin)) / norm);
  }
  return area;
}

LearningCurve curve_from_events(std::span<const TimedScores> events,
                                const LabelMatrix& labels,
                                const ScoringParams& params) {
  std::vector<std::size_t> order;
  order.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const double t = events[i].timestamp;
    if (!(t >= 0.0) || std::isnan(t)) {
      throw OutOfBudgetRange("event " + std::to_string(i) +
                             " has negative timestamp " + std::to_string(t));
    }
    if (t <= params.budget()) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return events[a].timestamp < events[b].timestamp;
  });

  std::vector<CurvePoint> points;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k + 1 < order.size() &&
        events[order[k + 1]].timestamp == events[i].timestamp) {
      continue;  // superseded by a later write at the same time
    }
    double score = 0.0;
    try {
      score = nauc(events[i].scores, labels);
    } catch (const ShapeMismatch& e) {
      throw ShapeMismatch("event " + std::to_string(i) + ": " + e.what());
    } catch (const NonFiniteScore& e) {
      throw NonFiniteScore("event " + std::to_string(i) + ": " + e.what());
    }
    points.push_back({events[i].timestamp, score});
  }
  return LearningCurve(params, std::move(points));
}

}  // namespace anytime
