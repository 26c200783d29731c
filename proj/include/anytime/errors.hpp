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
#include <optional>
#include <stdexcept>
#include <string>

namespace anytime {

// Position of a problem inside an input file. Rows and columns are 1-based;
// 0 means "not applicable".
struct Location {
  std::string file;
  std::size_t row = 0;
  std::size_t column = 0;

  std::string describe() const;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
  Error(const std::string& message, Location where)
      : std::runtime_error(where.describe() + ": " + message),
        where_(std::move(where)) {}

  const std::optional<Location>& where() const { return where_; }

 private:
  std::optional<Location> where_;
};

#define ANYTIME_DEFINE_ERROR(Name)   \
  class Name : public Error {        \
   public:                           \
    using Error::Error;              \
  }

// metrics
ANYTIME_DEFINE_ERROR(InvalidParams);
ANYTIME_DEFINE_ERROR(InvalidCurve);
ANYTIME_DEFINE_ERROR(InvalidLabels);
ANYTIME_DEFINE_ERROR(DegenerateClass);
ANYTIME_DEFINE_ERROR(ShapeMismatch);
ANYTIME_DEFINE_ERROR(NonFiniteScore);
ANYTIME_DEFINE_ERROR(OutOfBudgetRange);

// taskio
ANYTIME_DEFINE_ERROR(MissingFile);
ANYTIME_DEFINE_ERROR(MetadataParseError);
ANYTIME_DEFINE_ERROR(SolutionShapeError);
ANYTIME_DEFINE_ERROR(BadPredictionShape);
ANYTIME_DEFINE_ERROR(EncodingError);
ANYTIME_DEFINE_ERROR(IoError);

// orchestrator
ANYTIME_DEFINE_ERROR(LaunchFailure);
ANYTIME_DEFINE_ERROR(InvalidConfig);

// ranking
ANYTIME_DEFINE_ERROR(EmptyCell);
ANYTIME_DEFINE_ERROR(InvalidTable);
ANYTIME_DEFINE_ERROR(BadPartition);
ANYTIME_DEFINE_ERROR(ZeroVariance);
ANYTIME_DEFINE_ERROR(LengthMismatch);

// studies
ANYTIME_DEFINE_ERROR(KeyMismatch);
ANYTIME_DEFINE_ERROR(UnknownBase);

// portfolio
ANYTIME_DEFINE_ERROR(BadK);
ANYTIME_DEFINE_ERROR(EmptyPortfolio);
ANYTIME_DEFINE_ERROR(MissingFeatures);

// Generic malformed tabular input (CSV archives, events files).
ANYTIME_DEFINE_ERROR(ParseError);

#undef ANYTIME_DEFINE_ERROR

}  // namespace anytime
