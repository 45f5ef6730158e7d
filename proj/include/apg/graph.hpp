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
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apg/common.hpp"
#include "apg/dataset.hpp"
#include "apg/io.hpp"
#include "apg/random.hpp"
#include "apg/search.hpp"

namespace apg {

/// Incrementally built proximity graph.
///
/// Item j is linked in both directions to the (approximate) N nearest of
/// items 0..j-1, found with the same search algorithm and parameters used
/// for queries. While fewer than N+1 items exist, a new item is linked to
/// all of them. Reverse links are never pruned, so the mean degree is
/// close to 2N.
///
/// The dataset may hold more items than are indexed: `size()` counts
/// indexed vertices only and searches never see the rest. This lets
/// `build` index a dataset in place.
template <Dataset D>
class SearchGraph {
 public:
  using dataset_type = D;
  using query_type = typename D::query_type;

  SearchGraph(D data, std::uint32_t n_links, SearchParams params)
      : data_(std::move(data)), n_links_(n_links), params_(params) {
    if (n_links == 0) throw UsageError("N (links per insertion) must be positive");
    params_.validate();
    adj_.reserve(data_.size());
  }

  /// Indexes every item of `data` in order.
  static SearchGraph build(D data, const SearchParams& params, std::uint32_t n_links,
                           std::uint64_t seed) {
    if (data.size() == 0) throw UsageError("build: empty dataset");
    SearchGraph g(std::move(data), n_links, params);
    Rng rng(seed);
    while (g.size() < g.data_.size()) g.index_next(rng);
    return g;
  }

  std::size_t size() const noexcept { return adj_.size(); }
  const D& data() const noexcept { return data_; }
  std::uint32_t n_links() const noexcept { return n_links_; }
  const SearchParams& params() const noexcept { return params_; }

  /// Neighbors in the order their links were created.
  std::span<const ItemId> neighbors(ItemId id) const {
    if (id >= adj_.size()) {
      throw UsageError("neighbors: id " + std::to_string(id) + " out of range (n=" +
                       std::to_string(adj_.size()) + ")");
    }
    return adj_[id];
  }

  /// Unchecked variant used by the search loops.
  std::span<const ItemId> adjacency(ItemId id) const noexcept { return adj_[id]; }

  /// Appends `item` to the dataset and links it. Returns its id.
  template <class Item>
  ItemId insert_item(const Item& item, Rng& rng) {
    if (data_.size() != adj_.size()) throw UsageError("insert_item: graph has unindexed items pending");
    data_.push_back(item);
    return index_next(rng);
  }

  /// Links the first stored item that is not indexed yet.
  ItemId index_next(Rng& rng) {
    const std::size_t n = adj_.size();
    if (n >= data_.size()) throw UsageError("index_next: no pending item");
    if (n >= std::size_t{UINT32_MAX}) throw UsageError("graph is full");
    const auto id = static_cast<ItemId>(n);

    std::vector<ItemId> links;
    if (n <= n_links_) {
      links.resize(n);
      for (std::size_t i = 0; i < n; ++i) links[i] = static_cast<ItemId>(i);
    } else {
      ctx_.rng.seed(rng.next());
      const SearchResult r = search(*this, data_.query(id), n_links_, params_, ctx_);
      links.reserve(r.pairs.size());
      for (const auto& p : r.pairs) links.push_back(p.id);
    }
    for (ItemId v : links) adj_[v].push_back(id);
    adj_.push_back(std::move(links));
    return id;
  }

  /// Replaces the adjacency wholesale (used by the graph file loader).
  void assign_adjacency(std::vector<std::vector<ItemId>> adj) {
    if (adj.size() > data_.size()) throw UsageError("adjacency larger than dataset");
    adj_ = std::move(adj);
  }

  const std::vector<std::vector<ItemId>>& adjacency_lists() const noexcept { return adj_; }

 private:
  D data_;
  std::uint32_t n_links_;
  SearchParams params_;
  std::vector<std::vector<ItemId>> adj_;
  QueryContext ctx_;  // construction-time search workspace
};

struct GraphStats {
  std::size_t n = 0;
  std::size_t min_degree = 0;
  double mean_degree = 0.0;
  std::size_t max_degree = 0;
  bool connected = true;
};

template <class G>
GraphStats graph_stats(const G& graph) {
  GraphStats s;
  s.n = graph.size();
  if (s.n == 0) return s;
  s.min_degree = SIZE_MAX;
  std::size_t total = 0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const std::size_t d = graph.adjacency(static_cast<ItemId>(i)).size();
    s.min_degree = std::min(s.min_degree, d);
    s.max_degree = std::max(s.max_degree, d);
    total += d;
  }
  s.mean_degree = static_cast<double>(total) / static_cast<double>(s.n);

  std::vector<char> seen(s.n, 0);
  std::vector<ItemId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const ItemId u = stack.back();
    stack.pop_back();
    for (ItemId v : graph.adjacency(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  s.connected = reached == s.n;
  return s;
}

/// Empty string if the adjacency is symmetric, loop-free, duplicate-free
/// and in range; otherwise a description of the first violation.
template <class G>
std::string check_adjacency(const G& graph) {
  const std::size_t n = graph.size();
  std::vector<std::vector<ItemId>> sorted(n);
  for (std::size_t u = 0; u < n; ++u) {
    auto adj = graph.adjacency(static_cast<ItemId>(u));
    sorted[u].assign(adj.begin(), adj.end());
    std::sort(sorted[u].begin(), sorted[u].end());
    for (std::size_t j = 0; j < sorted[u].size(); ++j) {
      const ItemId v = sorted[u][j];
      if (v >= n) return "vertex " + std::to_string(u) + ": neighbor out of range";
      if (v == u) return "vertex " + std::to_string(u) + ": self loop";
      if (j > 0 && sorted[u][j - 1] == v) return "vertex " + std::to_string(u) + ": duplicate neighbor";
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (ItemId v : sorted[u]) {
      if (!std::binary_search(sorted[v].begin(), sorted[v].end(), static_cast<ItemId>(u))) {
        return "edge " + std::to_string(u) + "->" + std::to_string(v) + " has no reverse";
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------- persistence
//
//   "APGX" u32 version=1, u32 N, u8 variant, u64 n,
//   n * (u32 degree, degree * u32 neighbor)

inline constexpr std::uint32_t kGraphFormatVersion = 1;

template <Dataset D>
std::string encode_graph(const SearchGraph<D>& graph) {
  io_detail::ByteWriter w;
  w.magic("APGX");
  w.u32(kGraphFormatVersion);
  w.u32(graph.n_links());
  w.u8(static_cast<std::uint8_t>(graph.params().variant));
  w.u64(graph.size());
  for (const auto& list : graph.adjacency_lists()) {
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (ItemId v : list) w.u32(v);
  }
  return w.bytes();
}

template <Dataset D>
void save_graph(const std::filesystem::path& path, const SearchGraph<D>& graph) {
  io_detail::write_file(path, encode_graph(graph));
}

/// Rebuilds a graph from its adjacency file and companion dataset. N and
/// the variant come from the file; sigma, m and beam from `params`.
template <Dataset D>
SearchGraph<D> decode_graph(std::string_view bytes, D data, SearchParams params,
                            const std::string& name = "graph") {
  io_detail::ByteReader r(bytes, name);
  r.expect_magic("APGX");
  const std::size_t ver_at = r.offset();
  if (r.u32() != kGraphFormatVersion) r.fail("unsupported format version", ver_at);
  const std::size_t n_at = r.offset();
  const std::uint32_t n_links = r.u32();
  if (n_links == 0) r.fail("N must be positive", n_at);
  const std::size_t var_at = r.offset();
  const std::uint8_t code = r.u8();
  if (code > 3) r.fail("unknown variant code", var_at);
  params.variant = static_cast<Variant>(code);
  const std::size_t count_at = r.offset();
  const std::uint64_t n = r.u64();
  if (n != data.size()) {
    r.fail("graph has " + std::to_string(n) + " vertices but dataset has " + std::to_string(data.size()) +
               " items",
           count_at);
  }
  std::vector<std::vector<ItemId>> adj(n);
  for (std::uint64_t u = 0; u < n; ++u) {
    const std::size_t deg_at = r.offset();
    const std::uint32_t deg = r.u32();
    if (deg > r.remaining() / 4) r.fail("truncated adjacency", deg_at);
    adj[u].resize(deg);
    for (auto& v : adj[u]) {
      const std::size_t at = r.offset();
      v = r.u32();
      if (v >= n || v == u) r.fail("invalid neighbor id " + std::to_string(v), at);
    }
  }
  r.expect_end();
  SearchGraph<D> g(std::move(data), n_links, params);
  g.assign_adjacency(std::move(adj));
  return g;
}

template <Dataset D>
SearchGraph<D> load_graph(const std::filesystem::path& path, D data, SearchParams params) {
  return decode_graph(io_detail::read_file(path), std::move(data), params, path.string());
}

}  // namespace apg
