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
#include <cstdint>
#include <queue>
#include <span>
#include <thread>
#include <vector>

#include "apg/collections.hpp"
#include "apg/common.hpp"
#include "apg/dataset.hpp"

namespace apg {

/// Exact neighbors of a query set: `rows[i]` holds the k nearest items of
/// query i in ascending (dist, id) order.
struct GroundTruth {
  std::uint32_t k = 0;
  std::vector<std::vector<ScoredId>> rows;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Brute-force k nearest neighbors. Returns min(k, n) pairs sorted by
/// (dist, id); ties at the k-th distance keep the lower id.
template <Dataset D>
std::vector<ScoredId> exact_knn(const D& data, typename D::query_type q, std::size_t k) {
  if (k == 0) throw UsageError("exact_knn: k must be positive");
  if (data.size() == 0) throw UsageError("exact_knn: empty dataset");

  // Max-heap of the best k so far; top is the current worst.
  std::priority_queue<ScoredId> heap;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ScoredId cand{data.distance(q, static_cast<ItemId>(i)), static_cast<ItemId>(i)};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (cand < heap.top()) {
      heap.pop();
      heap.push(cand);
    }
  }
  std::vector<ScoredId> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = heap.top();
    heap.pop();
  }
  return out;
}

/// Ground truth for every item of `queries` against `data`. Queries are
/// split over `workers` threads (pure reads).
template <Dataset D>
GroundTruth compute_ground_truth(const D& data, const D& queries, std::uint32_t k,
                                 unsigned workers = 1) {
  if (k > data.size()) {
    throw UsageError("k=" + std::to_string(k) + " exceeds dataset size " +
                     std::to_string(data.size()));
  }
  GroundTruth gt{k, std::vector<std::vector<ScoredId>>(queries.size())};
  workers = std::max(1u, workers);
  auto run = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < queries.size(); i += step) {
      gt.rows[i] = exact_knn(data, queries.query(static_cast<ItemId>(i)), k);
    }
  };
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  return gt;
}

/// Fraction of the exact ids that appear in the approximate answer.
/// Order of either argument is irrelevant.
inline double recall(std::span<const ScoredId> approx, std::span<const ScoredId> exact) {
  if (exact.empty()) return 1.0;
  std::vector<ItemId> a, e;
  a.reserve(approx.size());
  e.reserve(exact.size());
  for (const auto& p : approx) a.push_back(p.id);
  for (const auto& p : exact) e.push_back(p.id);
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(e.begin(), e.end());
  std::vector<ItemId> common;
  std::set_intersection(a.begin(), a.end(), e.begin(), e.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(exact.size());
}

/// Macro average: the arithmetic mean of per-query values.
inline double macro_recall(std::span<const double> per_query) {
  if (per_query.empty()) throw UsageError("macro_recall: no values");
  double sum = 0.0;
  for (double r : per_query) sum += r;
  return sum / static_cast<double>(per_query.size());
}

inline double queries_per_second(std::size_t num_queries, double elapsed_seconds) {
  if (!(elapsed_seconds > 0.0)) throw UsageError("queries_per_second: elapsed time must be positive");
  return static_cast<double>(num_queries) / elapsed_seconds;
}

}  // namespace apg
