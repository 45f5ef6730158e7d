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

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "apg/common.hpp"
#include "apg/metrics.hpp"
#include "apg/random.hpp"

namespace apg {

enum class DatasetKind : std::uint8_t { kDense, kString, kSparse };

/// An indexed collection of items together with the metric over them.
/// `query_type` is a cheap view; `query(id)` lets an item act as a query.
template <class D>
concept Dataset = requires(const D& d, typename D::query_type q, ItemId id) {
  typename D::item_type;
  { d.size() } -> std::convertible_to<std::size_t>;
  { d.query(id) } -> std::convertible_to<typename D::query_type>;
  { d.distance(q, id) } -> std::convertible_to<Distance>;
};

/// Row-major single-precision vectors under L2.
class DenseDataset {
 public:
  using item_type = std::vector<float>;
  using query_type = std::span<const float>;
  static constexpr DatasetKind kind = DatasetKind::kDense;

  DenseDataset() = default;
  explicit DenseDataset(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) throw UsageError("DenseDataset: dimension must be positive");
  }
  DenseDataset(std::uint32_t dim, std::vector<float> data) : DenseDataset(dim) {
    if (data.size() % dim != 0) throw UsageError("DenseDataset: payload is not a multiple of dim");
    for (float x : data) {
      if (!std::isfinite(x)) throw UsageError("DenseDataset: non-finite coordinate");
    }
    data_ = std::move(data);
  }

  std::uint32_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const float> item(ItemId id) const {
    return std::span<const float>(data_).subspan(std::size_t{id} * dim_, dim_);
  }
  query_type query(ItemId id) const { return item(id); }

  Distance distance(query_type q, ItemId id) const { return l2_distance(q, item(id)); }

  void reserve(std::size_t n) { data_.reserve(n * dim_); }

  void push_back(std::span<const float> v) {
    if (v.size() != dim_) {
      throw UsageError("DenseDataset: item has dimension " + std::to_string(v.size()) +
                       ", expected " + std::to_string(dim_));
    }
    for (float x : v) {
      if (!std::isfinite(x)) throw UsageError("DenseDataset: non-finite coordinate");
    }
    data_.insert(data_.end(), v.begin(), v.end());
  }

  std::span<const float> raw() const noexcept { return data_; }

  friend bool operator==(const DenseDataset&, const DenseDataset&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::vector<float> data_;
};

/// Unicode strings (as code points) under Levenshtein distance.
class StringDataset {
 public:
  using item_type = std::u32string;
  using query_type = std::u32string_view;
  static constexpr DatasetKind kind = DatasetKind::kString;

  StringDataset() = default;
  explicit StringDataset(std::vector<std::u32string> items) : items_(std::move(items)) {}

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  const std::u32string& item(ItemId id) const { return items_.at(id); }
  query_type query(ItemId id) const { return items_[id]; }

  Distance distance(query_type q, ItemId id) const { return levenshtein(q, items_[id]); }

  void reserve(std::size_t n) { items_.reserve(n); }
  void push_back(std::u32string_view s) { items_.emplace_back(s); }

  friend bool operator==(const StringDataset&, const StringDataset&) = default;

 private:
  std::vector<std::u32string> items_;
};

/// Throws UsageError unless `v` is non-empty, strictly sorted by term and
/// carries finite positive weights.
inline void validate_sparse(std::span<const SparseEntry> v) {
  if (v.empty()) throw UsageError("sparse vector has no entries");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i].weight > 0.0) || !std::isfinite(v[i].weight)) {
      throw UsageError("sparse vector weight must be finite and positive");
    }
    if (i > 0 && v[i].term <= v[i - 1].term) {
      throw UsageError("sparse vector terms must be strictly increasing");
    }
  }
}

/// Sparse term-weight vectors under the angle distance.
class SparseDataset {
 public:
  using item_type = SparseVector;
  using query_type = std::span<const SparseEntry>;
  static constexpr DatasetKind kind = DatasetKind::kSparse;

  SparseDataset() = default;
  explicit SparseDataset(std::vector<SparseVector> items) {
    for (const auto& v : items) validate_sparse(v);
    items_ = std::move(items);
  }

  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  const SparseVector& item(ItemId id) const { return items_.at(id); }
  query_type query(ItemId id) const { return items_[id]; }

  Distance distance(query_type q, ItemId id) const { return angle_distance(q, items_[id]); }

  void reserve(std::size_t n) { items_.reserve(n); }
  void push_back(std::span<const SparseEntry> v) {
    validate_sparse(v);
    items_.emplace_back(v.begin(), v.end());
  }

  friend bool operator==(const SparseDataset&, const SparseDataset&) = default;

 private:
  std::vector<SparseVector> items_;
};

static_assert(Dataset<DenseDataset>);
static_assert(Dataset<StringDataset>);
static_assert(Dataset<SparseDataset>);

/// A dataset of any of the supported kinds, as loaded by the tools.
using DatasetHandle = std::variant<DenseDataset, StringDataset, SparseDataset>;

/// `n` vectors of dimension `dim` with coordinates i.i.d. uniform in [0,1).
/// The stream is std::mt19937_64 seeded with `seed`; each coordinate takes
/// the top 24 bits of one 64-bit draw.
inline DenseDataset gen_rvec(std::uint32_t dim, std::size_t n, std::uint64_t seed) {
  if (dim == 0) throw UsageError("gen_rvec: dimension must be positive");
  if (n == 0) throw UsageError("gen_rvec: n must be positive");
  Rng rng(seed);
  std::vector<float> data(n * dim);
  for (auto& x : data) x = rng.unit_float();
  return DenseDataset(dim, std::move(data));
}

}  // namespace apg
