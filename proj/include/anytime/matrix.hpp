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
#include <span>
#include <vector>

namespace anytime {

// Dense row-major grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols, std::vector<T> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return values_.empty(); }

  const T& operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  std::span<const T> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::vector<T> column(std::size_t c) const;
  std::span<const T> values() const { return values_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 protected:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

// Multi-label ground truth: every entry is 0 or 1, at least one row and one
// column.
class LabelMatrix : public Grid<std::uint8_t> {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols,
              std::vector<std::uint8_t> values);
};

// Solver output: finite reals. The shape is checked against labels at scoring
// time.
class ScoreMatrix : public Grid<double> {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);
};

}  // namespace anytime
