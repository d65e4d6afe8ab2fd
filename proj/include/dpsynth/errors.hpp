// Copyright 2026 The dpsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dpsynth {

// Bad inputs: malformed files, mismatched codebooks, out-of-range levels,
// invalid configuration. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A noisy table lost all of its mass after clamping, so no probability
// vector can be formed. Usually means epsilon was too small for the table
// at hand. The CLI maps this to exit code 3.
class DegenerateTableError : public std::runtime_error {
 public:
  explicit DegenerateTableError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace dpsynth
