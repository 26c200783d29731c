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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "anytime/matrix.hpp"

namespace anytime {

// Configurations x datasets ALC scores.
class PerformanceMatrix {
 public:
  PerformanceMatrix(std::vector<std::string> configs,
                    std::vector<std::string> datasets, Grid<double> alc);

  const std::vector<std::string>& configs() const { return configs_; }
  const std::vector<std::string>& datasets() const { return datasets_; }
  const Grid<double>& alc() const { return alc_; }
  double operator()(std::size_t config, std::size_t dataset) const {
    return alc_(config, dataset);
  }
  std::size_t dataset_index(const std::string& dataset) const;

 private:
  std::vector<std::string> configs_;
  std::vector<std::string> datasets_;
  Grid<double> alc_;
};

// Header "config,<dataset>,...", one row per configuration.
PerformanceMatrix read_performance_csv(const std::string& path);

struct MetaFeatures {
  std::size_t rows = 1;  // image resolution
  std::size_t cols = 1;
  std::size_t n_classes = 1;
  std::size_t n_train = 1;
  std::size_t n_test = 1;
  std::size_t sequence_length = 1;  // 1 for still images
};

// Header "dataset,rows,cols,n_classes,n_train,n_test,sequence_length".
std::map<std::string, MetaFeatures> read_features_csv(const std::string& path);

// Coverage objective: mean over datasets of the best ALC among `subset`.
// The empty subset scores 0.
double portfolio_coverage(const PerformanceMatrix& matrix,
                          std::span<const std::size_t> subset);

// Greedy maximization of portfolio_coverage. Config indices in pick order;
// equal gains go to the lower index.
std::vector<std::size_t> greedy_portfolio(const PerformanceMatrix& matrix,
                                          std::size_t k);

// Config with the best mean ALC; equal means go to the lower index.
std::size_t generalist_config(const PerformanceMatrix& matrix);

// Picks the portfolio member that scored best on the training dataset
// closest to `query`. Distance is Euclidean over z-scored log features
// (n_train, n_test, n_classes, sequence_length, rows*cols).
std::size_t select_config(std::span<const std::size_t> portfolio,
                          const PerformanceMatrix& matrix,
                          const std::map<std::string, MetaFeatures>& train_features,
                          const MetaFeatures& query);

}  // namespace anytime
