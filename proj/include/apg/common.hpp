// Copyright 2026 The apgsearch Authors
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
#include <limits>
#include <stdexcept>
#include <string>

namespace apg {

/// Index of an item in a dataset / vertex in a search graph.
using ItemId = std::uint32_t;

/// Distances are accumulated and compared in double precision.
using Distance = double;

/// Covering radius of a queue that is not yet full. Compares greater than
/// every finite distance.
inline constexpr Distance kInfiniteDistance = std::numeric_limits<Distance>::infinity();

/// Caller violated a precondition (bad argument, mismatched dimension...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unreadable input data. The message carries the position.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace apg
