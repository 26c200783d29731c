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

#include <stdlib.h>

#include <filesystem>
#include <string>

#include "anytime/matrix.hpp"
#include "anytime/taskio.hpp"

namespace anytime::testing {

// Fresh directory under $TMPDIR, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string pattern =
        (std::filesystem::temp_directory_path() / "anytime_XXXXXX").string();
    path_ = mkdtemp(pattern.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  write_file_atomic(p, text);
}

// 4 test rows x 2 classes; both classes non-degenerate.
inline LabelMatrix small_solution() {
  return LabelMatrix(4, 2, {1, 0, 0, 1, 1, 1, 0, 0});
}

inline TaskMetadata small_metadata(const std::string& name = "toy") {
  TaskMetadata meta;
  meta.name = name;
  meta.domain = Domain::kTabular;
  meta.n_classes = 2;
  meta.n_train = 16;
  meta.n_test = 4;
  meta.tensor_dims = {1, 1, 8, 1};
  return meta;
}

inline TaskBundle make_small_task(const std::filesystem::path& root) {
  write_task(root, small_metadata(), small_solution());
  return load_task(root);
}

// Perfect scores for small_solution(): NAUC 1.
inline ScoreMatrix perfect_scores() {
  return ScoreMatrix(4, 2, {1, 0, 0, 1, 1, 1, 0, 0});
}

// Every score tied: NAUC 0.
inline ScoreMatrix tied_scores() {
  return ScoreMatrix(4, 2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
}

}  // namespace anytime::testing
