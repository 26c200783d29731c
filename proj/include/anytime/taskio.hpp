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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "anytime/matrix.hpp"

namespace anytime {

enum class Domain { kImage, kVideo, kSpeech, kText, kTabular, kOther };

std::string_view to_string(Domain domain);
std::optional<Domain> parse_domain(std::string_view text);

// A tensor extent; std::nullopt encodes a variable-size axis ("var").
using TensorDim = std::optional<std::int64_t>;

struct TaskMetadata {
  std::string name;
  Domain domain = Domain::kOther;
  std::size_t n_classes = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  // time, row, col, channel
  std::array<TensorDim, 4> tensor_dims{};
  std::optional<double> budget_override;
};

// On-disk layout:
//   <root>/metadata.txt   key=value lines
//   <root>/solution.txt   n_test lines of n_classes space-separated 0/1
//   <root>/train/         opaque payload handed to the solver, never read here
struct TaskBundle {
  std::filesystem::path root;
  TaskMetadata metadata;
  std::filesystem::path training_path;
  LabelMatrix solution;
};

struct PredictionDocument {
  ScoreMatrix matrix;
  std::filesystem::path source_path;
  std::size_t sequence_index = 0;
};

inline constexpr std::string_view kMetadataFile = "metadata.txt";
inline constexpr std::string_view kSolutionFile = "solution.txt";
inline constexpr std::string_view kTrainDir = "train";

TaskMetadata parse_metadata(std::string_view text,
                            const std::string& source_name = "metadata.txt");
std::string format_metadata(const TaskMetadata& meta);

TaskBundle load_task(const std::filesystem::path& root);

// Writes metadata.txt, solution.txt and an empty train/ directory.
void write_task(const std::filesystem::path& root, const TaskMetadata& meta,
                const LabelMatrix& solution);

// "iteration_<k>.predict"
std::string prediction_file_name(std::size_t sequence_index);
// Sequence index encoded in a prediction file name, if it is one.
std::optional<std::size_t> parse_prediction_file_name(std::string_view name);

PredictionDocument parse_predictions(const std::filesystem::path& path,
                                     const TaskMetadata& meta);
// Parses prediction text already in memory; `source` only labels errors.
ScoreMatrix parse_prediction_text(std::string_view text, std::size_t n_rows,
                                  std::size_t n_cols,
                                  const std::string& source);

// Shortest decimal form that reads back to exactly the same double.
std::string format_real(double value);
std::string format_predictions(const ScoreMatrix& matrix);

// Writes iteration_<k>.predict under `dir` via a temporary file and rename.
std::filesystem::path write_predictions(const ScoreMatrix& matrix,
                                        const std::filesystem::path& dir,
                                        std::size_t sequence_index);

// Atomically replaces `path` with `contents`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace anytime
