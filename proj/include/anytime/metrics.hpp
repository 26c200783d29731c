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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "anytime/matrix.hpp"

namespace anytime {

// Time budget T and log-warp parameter t0, both in seconds.
class ScoringParams {
 public:
  static constexpr double kDefaultBudget = 1200.0;
  static constexpr double kDefaultT0 = 60.0;

  ScoringParams() = default;
  ScoringParams(double budget, double t0);

  double budget() const { return budget_; }
  double t0() const { return t0_; }

  friend bool operator==(const ScoringParams&, const ScoringParams&) = default;

 private:
  double budget_ = kDefaultBudget;
  double t0_ = kDefaultT0;
};

struct CurvePoint {
  double timestamp = 0.0;
  double score = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

// Right-continuous step function over [0, T]: zero before the first point,
// then the score of the latest point at or before t.
class LearningCurve {
 public:
  explicit LearningCurve(ScoringParams params = {},
                         std::vector<CurvePoint> points = {});

  const ScoringParams& params() const { return params_; }
  std::span<const CurvePoint> points() const { return points_; }
  bool empty() const { return points_.empty(); }

  double value_at(double t) const;
  // Same points, rescored under different parameters. Points beyond the new
  // budget are rejected by the constructor.
  LearningCurve with_params(ScoringParams params) const {
    return LearningCurve(params, points_);
  }

 private:
  ScoringParams params_;
  std::vector<CurvePoint> points_;
};

// Mann-Whitney AUC with half credit for tied (positive, negative) pairs.
double auc_binary(std::span<const double> scores,
                  std::span<const std::uint8_t> labels);

// Mean of 2*AUC-1 over classes that have both positive and negative examples;
// 0 when every class is degenerate.
double nauc(const ScoreMatrix& scores, const LabelMatrix& labels);

// log(1 + t/t0) / log(1 + T/t0).
double time_transform(double t, const ScoringParams& params);

// Exact area under the step curve in transformed time.
double alc(const LearningCurve& curve);

struct TimedScores {
  double timestamp = 0.0;
  ScoreMatrix scores;
};

// Sorts events by time (stable: among equal timestamps the last one in input
// order wins), drops events past the budget and scores each with nauc.
LearningCurve curve_from_events(std::span<const TimedScores> events,
                                const LabelMatrix& labels,
                                const ScoringParams& params);

}  // namespace anytime
