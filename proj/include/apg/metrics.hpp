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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "apg/common.hpp"

namespace apg {

/// One non-zero coordinate of a sparse vector.
struct SparseEntry {
  std::uint32_t term = 0;
  double weight = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Entries sorted by strictly increasing term, all weights > 0.
using SparseVector = std::vector<SparseEntry>;

/// Euclidean distance. Single-precision inputs, double-precision sum.
inline Distance l2_distance(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw UsageError("l2_distance: dimension mismatch (" + std::to_string(u.size()) +
                     " vs " + std::to_string(v.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = static_cast<double>(u[i]) - static_cast<double>(v[i]);
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

/// Edit distance over code points with unit insert/delete/substitute costs.
inline Distance levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return static_cast<Distance>(a.size());

  // Single row over the shorter string.
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return static_cast<Distance>(row[b.size()]);
}

/// Angle in radians between two sparse vectors, in [0, pi]. Computed as
/// 2 atan2(|u/|u| - v/|v||, |u/|u| + v/|v||), which stays accurate for
/// nearly parallel vectors where acos of the cosine does not.
inline Distance angle_distance(std::span<const SparseEntry> u, std::span<const SparseEntry> v) {
  double nu = 0.0, nv = 0.0;
  for (const auto& e : u) nu += e.weight * e.weight;
  for (const auto& e : v) nv += e.weight * e.weight;
  if (!(nu > 0.0) || !(nv > 0.0)) throw UsageError("angle_distance: zero-norm vector");
  nu = std::sqrt(nu);
  nv = std::sqrt(nv);

  double diff = 0.0, sum = 0.0;
  auto add = [&](double a, double b) {
    diff += (a - b) * (a - b);
    sum += (a + b) * (a + b);
  };
  std::size_t i = 0, j = 0;
  while (i < u.size() || j < v.size()) {
    if (j == v.size() || (i < u.size() && u[i].term < v[j].term)) {
      add(u[i++].weight / nu, 0.0);
    } else if (i == u.size() || v[j].term < u[i].term) {
      add(0.0, v[j++].weight / nv);
    } else {
      add(u[i++].weight / nu, v[j++].weight / nv);
    }
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace apg
