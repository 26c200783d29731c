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

#include "anytime/portfolio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "anytime/csv.hpp"
#include "anytime/errors.hpp"

namespace anytime {

PerformanceMatrix::PerformanceMatrix(std::vector<std::string> configs,
                                     std::vector<std::string> datasets,
                                     Grid<double> alc)
    : configs_(std::move(configs)),
      datasets_(std::move(datasets)),
      alc_(std::move(alc)) {
  if (alc_.rows() != configs_.size() || alc_.cols() != datasets_.size()) {
    throw ShapeMismatch("performance matrix is " + std::to_string(alc_.rows()) +
                        "x" + std::to_string(alc_.cols()) + " but has " +
                        std::to_string(configs_.size()) + " configs and " +
                        std::to_string(datasets_.size()) + " datasets");
  }
  if (configs_.empty() || datasets_.empty()) {
    throw ShapeMismatch("performance matrix is empty");
  }
  for (double v : alc_.values()) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      throw InvalidTable("performance matrix entries must be finite ALC "
                         "values in [-1, 1]");
    }
  }
}

std::size_t PerformanceMatrix::dataset_index(const std::string& dataset) const {
  const auto it = std::find(datasets_.begin(), datasets_.end(), dataset);
  if (it == datasets_.end()) {
    throw MissingFeatures("dataset '" + dataset +
                          "' is not a column of the performance matrix");
  }
  return static_cast<std::size_t>(it - datasets_.begin());
}

PerformanceMatrix read_performance_csv(const std::string& path) {
  const CsvTable csv = read_csv(path);
  if (csv.header.size() < 2 || csv.header[0] != "config") {
    throw ParseError("header must be 'config,<dataset>,...'",
                     Location{path, 1, 0});
  }
  std::vector<std::string> datasets(csv.header.begin() + 1, csv.header.end());
  std::vector<std::string> configs;
  std::vector<double> values;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    configs.push_back(csv.rows[r][0]);
    for (std::size_t c = 1; c < csv.header.size(); ++c) {
      values.push_back(csv.real(r, c));
    }
  }
  try {
    return PerformanceMatrix(
        std::move(configs), std::move(datasets),
        Grid<double>(csv.rows.size(), csv.header.size() - 1, std::move(values)));
  } catch (const Error& e) {
    throw ParseError(e.what(), Location{path, 0, 0});
  }
}

std::map<std::string, MetaFeatures> read_features_csv(const std::string& path) {
  const CsvTable csv = read_csv(path);
  const std::size_t name = csv.column("dataset");
  const std::array<std::size_t, 6> cols{
      csv.column("rows"),    csv.column("cols"),   csv.column("n_classes"),
      csv.column("n_train"), csv.column("n_test"), csv.column("sequence_length")};
  std::map<std::string, MetaFeatures> out;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    std::array<std::size_t, 6> v{};
    for (std::size_t i = 0; i < cols.size(); ++i) {
      v[i] = csv.count(r, cols[i]);
      if (v[i] == 0) {
        throw ParseError("meta-features must be positive",
                         Location{path, csv.line_numbers[r], cols[i] + 1});
      }
    }
    if (!out.emplace(csv.rows[r][name],
                     MetaFeatures{v[0], v[1], v[2], v[3], v[4], v[5]})
             .second) {
      throw ParseError("duplicate dataset '" + csv.rows[r][name] + "'",
                       Location{path, csv.line_numbers[r], name + 1});
    }
  }
  return out;
}

double portfolio_coverage(const PerformanceMatrix& matrix,
                          std::span<const std::size_t> subset) {
  if (subset.empty()) return 0.0;
  const std::size_t n_datasets = matrix.datasets().size();
  double total = 0.0;
  for (std::size_t d = 0; d < n_datasets; ++d) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c : subset) best = std::max(best, matrix(c, d));
    total += best;
  }
  return total / static_cast<double>(n_datasets);
}

std::vector<std::size_t> greedy_portfolio(const PerformanceMatrix& matrix,
                                          std::size_t k) {
  const std::size_t n_configs = matrix.configs().size();
  if (k < 1 || k > n_configs) {
    throw BadK("portfolio size must be in [1, " + std::to_string(n_configs) +
               "], got " + std::to_string(k));
  }
  std::vector<std::size_t> picked;
  std::vector<bool> used(n_configs, false);
  // Comparing coverage after adding each candidate is equivalent to comparing
  // marginal gains, since the current coverage is shared.
  while (picked.size() < k) {
    std::size_t best = n_configs;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_configs; ++c) {
      if (used[c]) continue;
      picked.push_back(c);
      const double value = portfolio_coverage(matrix, picked);
      picked.pop_back();
      if (value > best_value) {
        best_value = value;
        best = c;
      }
    }
    used[best] = true;
    picked.push_back(best);
  }
  return picked;
}

std::size_t generalist_config(const PerformanceMatrix& matrix) {
  std::size_t best = 0;
  double best_sum = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < matrix.configs().size(); ++c) {
    const auto row = matrix.alc().row(c);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (sum > best_sum) {
      best_sum = sum;
      best = c;
    }
  }
  return best;
}

namespace {

constexpr std::size_t kFeatureCount = 5;

std::array<double, kFeatureCount> log_features(const MetaFeatures& f) {
  for (std::size_t v : {f.rows, f.cols, f.n_classes, f.n_train, f.n_test,
                        f.sequence_length}) {
    if (v == 0) throw MissingFeatures("meta-features must be positive");
  }
  return {std::log(static_cast<double>(f.n_train)),
          std::log(static_cast<double>(f.n_test)),
          std::log(static_cast<double>(f.n_classes)),
          std::log(static_cast<double>(f.sequence_length)),
          std::log(static_cast<double>(f.rows) * static_cast<double>(f.cols))};
}

}  // namespace

std::size_t select_config(
    std::span<const std::size_t> portfolio, const PerformanceMatrix& matrix,
    const std::map<std::string, MetaFeatures>& train_features,
    const MetaFeatures& query) {
  if (portfolio.empty()) throw EmptyPortfolio("portfolio is empty");
  for (std::size_t c : portfolio) {
    if (c >= matrix.configs().size()) {
      throw EmptyPortfolio("portfolio refers to unknown config index " +
                           std::to_string(c));
    }
  }
  if (train_features.empty()) {
    throw MissingFeatures("no training datasets with meta-features");
  }

  // std::map iterates in dataset-id order, so the statistics and the
  // nearest-neighbour tie-break do not depend on how the caller built it.
  std::vector<std::size_t> columns;
  std::vector<std::array<double, kFeatureCount>> points;
  for (const auto& [dataset, features] : train_features) {
    columns.push_back(matrix.dataset_index(dataset));
    points.push_back(log_features(features));
  }
  const double n = static_cast<double>(points.size());
  std::array<double, kFeatureCount> mean{}, scale{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    for (const auto& p : points) mean[j] += p[j];
    mean[j] /= n;
    double ss = 0.0;
    for (const auto& p : points) ss += (p[j] - mean[j]) * (p[j] - mean[j]);
    // Constant features carry no information and are dropped.
    scale[j] = ss > 0.0 ? std::sqrt(ss / n) : 0.0;
  }
  const auto q = log_features(query);
  std::size_t nearest = 0;
  double nearest_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    double dist = 0.0;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      if (scale[j] == 0.0) continue;
      const double z = (points[i][j] - q[j]) / scale[j];
      dist += z * z;
    }
    if (dist < nearest_dist) {
      nearest_dist = dist;
      nearest = i;
    }
  }

  const std::size_t column = columns[nearest];
  std::vector<std::size_t> candidates(portfolio.begin(), portfolio.end());
  std::sort(candidates.begin(), candidates.end());
  std::size_t best = candidates.front();
  for (std::size_t c : candidates) {
    if (matrix(c, column) > matrix(best, column)) best = c;
  }
  return best;
}

}  // namespace anytime
