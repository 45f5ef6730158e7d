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
#include <functional>
#include <queue>
#include <span>
#include <vector>

#include "apg/common.hpp"

namespace apg {

/// A (distance, id) pair. Ordered lexicographically so that ties on the
/// distance are broken by the lower id everywhere.
struct ScoredId {
  Distance dist = 0.0;
  ItemId id = 0;

  friend bool operator==(const ScoredId&, const ScoredId&) = default;
  friend bool operator<(const ScoredId& a, const ScoredId& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  }
  friend bool operator>(const ScoredId& a, const ScoredId& b) { return b < a; }
};

/// Bounded set of the best `capacity` pairs seen so far, kept sorted in
/// ascending (dist, id) order. Ids are unique.
class KnnQueue {
 public:
  explicit KnnQueue(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw UsageError("KnnQueue: capacity must be positive");
    items_.reserve(capacity + 1);
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  bool full() const noexcept { return items_.size() == capacity_; }

  /// Distance to the farthest retained pair when full, infinity otherwise.
  Distance covering_radius() const noexcept {
    return full() ? items_.back().dist : kInfiniteDistance;
  }

  /// Returns true if `item` was retained.
  bool push(ScoredId item) {
    if (full() && !(item < items_.back())) return false;

    auto dup = std::find_if(items_.begin(), items_.end(),
                            [&](const ScoredId& e) { return e.id == item.id; });
    if (dup != items_.end()) {
      if (!(item < *dup)) return false;
      items_.erase(dup);
    }
    items_.insert(std::upper_bound(items_.begin(), items_.end(), item), item);
    if (items_.size() > capacity_) items_.pop_back();
    return true;
  }

  /// Ascending (dist, id) order.
  std::span<const ScoredId> items() const noexcept { return items_; }
  std::vector<ScoredId> sorted() const { return items_; }

  void clear() noexcept { items_.clear(); }

 private:
  std::size_t capacity_;
  std::vector<ScoredId> items_;
};

/// dst <- best `capacity` distinct-id pairs of dst U src.
inline void merge_into(KnnQueue& dst, const KnnQueue& src) {
  if (dst.capacity() != src.capacity()) throw UsageError("merge_into: capacity mismatch");
  for (const auto& item : src.items()) dst.push(item);
}

/// Unbounded nearest-first queue.
class CandidateQueue {
 public:
  void push(ScoredId item) { heap_.push(item); }
  bool empty() const noexcept { return heap_.empty(); }
  std::size_t size() const noexcept { return heap_.size(); }

  ScoredId pop_nearest() {
    if (heap_.empty()) throw UsageError("pop_nearest: empty candidate queue");
    ScoredId top = heap_.top();
    heap_.pop();
    return top;
  }

 private:
  std::priority_queue<ScoredId, std::vector<ScoredId>, std::greater<>> heap_;
};

/// Membership over [0, n). clear() is O(1) amortized: stamps are compared
/// against a generation counter, so one set can be reused across queries.
class VisitedSet {
 public:
  VisitedSet() = default;
  explicit VisitedSet(std::size_t n) { resize(n); }

  void resize(std::size_t n) { stamp_.resize(n, 0); }
  std::size_t universe() const noexcept { return stamp_.size(); }

  void clear() {
    count_ = 0;
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
  }

  bool contains(ItemId id) const noexcept {
    return id < stamp_.size() && stamp_[id] == generation_;
  }

  /// Returns true if `id` was not present before.
  bool insert(ItemId id) {
    if (id >= stamp_.size()) throw UsageError("VisitedSet: id out of range");
    if (stamp_[id] == generation_) return false;
    stamp_[id] = generation_;
    ++count_;
    return true;
  }

  std::size_t size() const noexcept { return count_; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 1;
  std::size_t count_ = 0;
};

}  // namespace apg
