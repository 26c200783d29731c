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

#include "anytime/errors.hpp"

namespace anytime {

std::string Location::describe() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (row > 0) out += ":" + std::to_string(row);
  if (column > 0) out += ":" + std::to_string(column);
  return out;
}

}  // namespace anytime
