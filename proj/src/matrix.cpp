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

#include "anytime/matrix.hpp"

#include <cmath>
#include <string>

#include "anytime/errors.hpp"

namespace anytime {

template <typename T>
Grid<T>::Grid(std::size_t rows, std::size_t cols, std::vector<T> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw ShapeMismatch("grid of " + std::to_string(rows_) + "x" +
                        std::to_string(cols_) + " given " +
                        std::to_string(values_.size()) + " values");
  }
}

template <typename T>
std::vector<T> Grid<T>::column(std::size_t c) const {
  std::vector<T> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

template class Grid<std::uint8_t>;
template class Grid<double>;

LabelMatrix::LabelMatrix(std::size_t rows, std::size_t cols,
                         std::vector<std::uint8_t> values)
    : Grid(rows, cols, std::move(values)) {
  if (rows_ == 0 || cols_ == 0) {
    throw InvalidLabels("label matrix needs at least one row and one column");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 1) {
      throw InvalidLabels("label is not 0 or 1",
                          Location{"", i / cols_ + 1, i % cols_ + 1});
    }
  }
}

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : Grid(rows, cols, std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NonFiniteScore("score is not finite",
                           Location{"", i / cols_ + 1, i % cols_ + 1});
    }
  }
}

}  // namespace anytime
