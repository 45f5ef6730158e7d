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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apg/collections.hpp"
#include "apg/common.hpp"
#include "apg/dataset.hpp"
#include "apg/random.hpp"

namespace apg {

/// Local-search strategy over the graph. The numeric codes are part of
/// the graph file format.
enum class Variant : std::uint8_t {
  kApg = 0,       // best-first search with m random restarts
  kApgStar = 1,   // best-first with on-line restart control
  kApgStarR = 2,  // random restarts with a local evaluation loop
  kBeam = 3,      // beam search
};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kApg: return "apg";
    case Variant::kApgStar: return "apg-star";
    case Variant::kApgStarR: return "apg-star-r";
    case Variant::kBeam: return "beam";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "apg") return Variant::kApg;
  if (s == "apg-star") return Variant::kApgStar;
  if (s == "apg-star-r") return Variant::kApgStarR;
  if (s == "beam") return Variant::kBeam;
  throw UsageError("unknown variant \"" + std::string(s) + "\"");
}

inline Variant variant_from_code(std::uint8_t code) {
  if (code > 3) throw UsageError("unknown variant code " + std::to_string(code));
  return static_cast<Variant>(code);
}

/// Query-time parameters, reused for construction. Only the fields that
/// belong to `variant` are read: m for APG, beam for beam search.
struct SearchParams {
  Variant variant = Variant::kApgStar;
  std::uint32_t sigma = 4;
  std::uint32_t m = 16;
  std::uint32_t beam = 16;

  void validate() const {
    if (sigma < 1) throw UsageError("sigma must be >= 1");
    if (variant == Variant::kApg && m < 1) throw UsageError("m must be >= 1");
    if (variant == Variant::kBeam && beam < 1) throw UsageError("beam size must be >= 1");
  }

  friend bool operator==(const SearchParams&, const SearchParams&) = default;
};

struct SearchStats {
  std::uint64_t distance_evaluations = 0;
  /// Inner tries (sigma per round) for the sigma-driven variants, restarts
  /// for APG.
  std::uint64_t restarts = 0;
  /// Vertex expansions: neighborhoods scanned.
  std::uint64_t hops = 0;
  std::uint64_t outer_iterations = 0;

  friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

struct SearchResult {
  std::vector<ScoredId> pairs;  // ascending (dist, id)
  SearchStats stats;
};

/// A graph the search algorithms can walk: `size()` indexed vertices,
/// their adjacency and the dataset holding the items.
template <class G>
concept SearchableGraph = requires(const G& g, ItemId id) {
  typename G::query_type;
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.adjacency(id) } -> std::convertible_to<std::span<const ItemId>>;
  { g.data().distance(std::declval<typename G::query_type>(), id) } -> std::convertible_to<Distance>;
};

/// Per-query working state. One context serves one query at a time;
/// `begin()` clears it for the next query while keeping its buffers.
///
/// `visited` is the set of items whose distance to the query has been
/// computed. `expanded` is used by APG*-R only, to mark the vertices chosen
/// as local-search centers.
class QueryContext {
 public:
  explicit QueryContext(std::uint64_t seed = 0) : rng(seed) {}

  void begin(std::size_t n) {
    visited.resize(n);
    expanded.resize(n);
    visited.clear();
    expanded.clear();
    if (cache_.size() < n) cache_.resize(n);
    stats = {};
  }

  /// d(q, item(id)), computed at most once per query.
  template <Dataset D>
  Distance eval(const D& data, typename D::query_type q, ItemId id) {
    if (visited.contains(id)) return cache_[id];
    const Distance d = data.distance(q, id);
    visited.insert(id);
    cache_[id] = d;
    ++stats.distance_evaluations;
    return d;
  }

  bool evaluated(ItemId id) const noexcept { return visited.contains(id); }

  /// Uniform id in [0, n) not in `excluded`: up to 64 rejection draws,
  /// then a linear scan from a random offset. nullopt when none is left.
  std::optional<ItemId> random_outside(std::size_t n, const VisitedSet& excluded) {
    if (n == 0 || excluded.size() >= n) return std::nullopt;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto id = static_cast<ItemId>(rng.below(n));
      if (!excluded.contains(id)) return id;
    }
    const std::size_t start = rng.below(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = static_cast<ItemId>((start + i) % n);
      if (!excluded.contains(id)) return id;
    }
    return std::nullopt;
  }

  VisitedSet visited;
  VisitedSet expanded;
  SearchStats stats;
  Rng rng;
  /// Called with COV(res) after every outer round; used by tests.
  std::function<void(Distance)> on_round;

 private:
  std::vector<Distance> cache_;
};

namespace search_detail {

inline SearchResult finish(const KnnQueue& res, const QueryContext& ctx) {
  return SearchResult{res.sorted(), ctx.stats};
}

/// Outer-loop condition shared by the sigma-driven variants. The rounds end
/// once COV(res) stops decreasing; an under-full result keeps going as long
/// as the last round still reached new vertices.
inline bool another_round(const KnnQueue& res, Distance cov_before, std::uint64_t progress_before,
                          std::uint64_t progress_after) {
  if (res.covering_radius() != cov_before) return true;
  return !res.full() && progress_after != progress_before;
}

inline std::uint64_t progress(const QueryContext& ctx) {
  return ctx.stats.distance_evaluations + ctx.expanded.size();
}

inline void check(std::size_t n, std::size_t k) {
  if (n == 0) throw UsageError("search on an empty graph");
  if (k == 0) throw UsageError("k must be positive");
}

}  // namespace search_detail

namespace search_detail {

/// One restart shared by APG and APG*: seed `candidates` with a random
/// unevaluated vertex, then expand the nearest candidate until it lies
/// beyond the covering radius of `res`.
template <SearchableGraph G>
void best_first_try(const G& graph, typename G::query_type q, KnnQueue& res,
                    CandidateQueue& candidates, QueryContext& ctx) {
  const auto& data = graph.data();
  const auto c = ctx.random_outside(graph.size(), ctx.visited);
  if (!c) return;
  const ScoredId seed{ctx.eval(data, q, *c), *c};
  candidates.push(seed);
  res.push(seed);
  while (!candidates.empty()) {
    const ScoredId best = candidates.pop_nearest();
    // Everything left in `candidates` is at least as far as `best`.
    if (best.dist > res.covering_radius()) break;
    ++ctx.stats.hops;
    for (ItemId u : graph.adjacency(best.id)) {
      if (ctx.evaluated(u)) continue;
      const ScoredId cand{ctx.eval(data, q, u), u};
      candidates.push(cand);
      res.push(cand);
    }
  }
}

}  // namespace search_detail

/// Greedy search amplified with `m` restarts. The visited set, candidate
/// list and result persist across restarts; every restart appends one
/// random unevaluated vertex to the candidates and greedily expands the
/// nearest candidate while it can still improve the result. If the result
/// is under-full after m restarts, restarts continue while unevaluated
/// vertices remain.
template <SearchableGraph G>
SearchResult search_apg(const G& graph, typename G::query_type q, std::size_t k, std::uint32_t m,
                        QueryContext& ctx) {
  const std::size_t n = graph.size();
  search_detail::check(n, k);
  if (m < 1) throw UsageError("m must be >= 1");
  ctx.begin(n);
  KnnQueue res(k);
  CandidateQueue candidates;

  for (std::uint64_t i = 0; i < m || !res.full(); ++i) {
    if (ctx.visited.size() >= n) break;
    ++ctx.stats.restarts;
    search_detail::best_first_try(graph, q, res, candidates, ctx);
  }
  ctx.stats.outer_iterations = 1;
  return search_detail::finish(res, ctx);
}

/// APG*: best-first expansion from random seeds, pruned by the covering
/// radius, repeated in batches of `sigma` tries until COV(res) stops
/// decreasing.
template <SearchableGraph G>
SearchResult search_apg_star(const G& graph, typename G::query_type q, std::size_t k,
                             std::uint32_t sigma, QueryContext& ctx) {
  const std::size_t n = graph.size();
  search_detail::check(n, k);
  if (sigma < 1) throw UsageError("sigma must be >= 1");
  ctx.begin(n);
  KnnQueue res(k);
  CandidateQueue candidates;

  Distance cov_star;
  std::uint64_t before;
  do {
    cov_star = res.covering_radius();
    before = search_detail::progress(ctx);
    for (std::uint32_t i = 0; i < sigma; ++i) {
      ++ctx.stats.restarts;
      search_detail::best_first_try(graph, q, res, candidates, ctx);
    }
    ++ctx.stats.outer_iterations;
    if (ctx.on_round) ctx.on_round(res.covering_radius());
  } while (search_detail::another_round(res, cov_star, before, search_detail::progress(ctx)));
  return search_detail::finish(res, ctx);
}

/// APG*-R: every try starts a local search from a random vertex that has
/// not been a local-search center yet. The local loop keeps a private
/// k-queue, adds the not-yet-evaluated neighbors of the current center and
/// moves to the closest entry that has not been a center. Local results are
/// merged into the global result after each try.
template <SearchableGraph G>
SearchResult search_apg_star_r(const G& graph, typename G::query_type q, std::size_t k,
                               std::uint32_t sigma, QueryContext& ctx) {
  const std::size_t n = graph.size();
  search_detail::check(n, k);
  if (sigma < 1) throw UsageError("sigma must be >= 1");
  ctx.begin(n);
  const auto& data = graph.data();
  KnnQueue res(k);
  KnnQueue local(k);

  Distance cov_star;
  std::uint64_t before;
  do {
    cov_star = res.covering_radius();
    before = search_detail::progress(ctx);
    for (std::uint32_t i = 0; i < sigma; ++i) {
      ++ctx.stats.restarts;
      local.clear();
      auto s = ctx.random_outside(n, ctx.expanded);
      if (!s) continue;
      ctx.expanded.insert(*s);
      local.push({ctx.eval(data, q, *s), *s});
      while (s) {
        ++ctx.stats.hops;
        for (ItemId v : graph.adjacency(*s)) {
          if (ctx.evaluated(v)) continue;
          local.push({ctx.eval(data, q, v), v});
        }
        s.reset();
        for (const auto& p : local.items()) {
          if (!ctx.expanded.contains(p.id)) {
            s = p.id;
            ctx.expanded.insert(p.id);
            break;
          }
        }
      }
      merge_into(res, local);
    }
    ++ctx.stats.outer_iterations;
    if (ctx.on_round) ctx.on_round(res.covering_radius());
  } while (search_detail::another_round(res, cov_star, before, search_detail::progress(ctx)));
  return search_detail::finish(res, ctx);
}

/// Beam search: a beam of `beam_size` vertices is replaced, step by step,
/// by the closest not-yet-evaluated neighbors of all its members. An empty
/// beam is reseeded with one random unevaluated vertex.
template <SearchableGraph G>
SearchResult search_beam(const G& graph, typename G::query_type q, std::size_t k,
                         std::uint32_t sigma, std::uint32_t beam_size, QueryContext& ctx) {
  const std::size_t n = graph.size();
  search_detail::check(n, k);
  if (sigma < 1) throw UsageError("sigma must be >= 1");
  if (beam_size < 1) throw UsageError("beam size must be >= 1");
  ctx.begin(n);
  const auto& data = graph.data();
  KnnQueue res(k);
  KnnQueue beam(beam_size);
  KnnQueue next(beam_size);

  for (std::uint32_t i = 0; i < beam_size; ++i) {
    const auto u = ctx.random_outside(n, ctx.visited);
    if (!u) break;
    const ScoredId p{ctx.eval(data, q, *u), *u};
    res.push(p);
    beam.push(p);
  }

  Distance cov_star;
  std::uint64_t before;
  do {
    cov_star = res.covering_radius();
    before = search_detail::progress(ctx);
    for (std::uint32_t i = 0; i < sigma; ++i) {
      ++ctx.stats.restarts;
      if (beam.empty()) {
        if (const auto u = ctx.random_outside(n, ctx.visited)) {
          const ScoredId p{ctx.eval(data, q, *u), *u};
          res.push(p);
          beam.push(p);
        }
      }
      next.clear();
      for (const auto& c : beam.items()) {
        ++ctx.stats.hops;
        for (ItemId u : graph.adjacency(c.id)) {
          if (ctx.evaluated(u)) continue;
          const ScoredId p{ctx.eval(data, q, u), u};
          res.push(p);
          next.push(p);
        }
      }
      std::swap(beam, next);
    }
    ++ctx.stats.outer_iterations;
    if (ctx.on_round) ctx.on_round(res.covering_radius());
  } while (search_detail::another_round(res, cov_star, before, search_detail::progress(ctx)));
  return search_detail::finish(res, ctx);
}

/// Runs the variant selected by `params`.
template <SearchableGraph G>
SearchResult search(const G& graph, typename G::query_type q, std::size_t k,
                    const SearchParams& params, QueryContext& ctx) {
  params.validate();
  switch (params.variant) {
    case Variant::kApg: return search_apg(graph, q, k, params.m, ctx);
    case Variant::kApgStar: return search_apg_star(graph, q, k, params.sigma, ctx);
    case Variant::kApgStarR: return search_apg_star_r(graph, q, k, params.sigma, ctx);
    case Variant::kBeam: return search_beam(graph, q, k, params.sigma, params.beam, ctx);
  }
  throw UsageError("unknown variant");
}

/// Same as above with a fresh context seeded by `seed`.
template <SearchableGraph G>
SearchResult search(const G& graph, typename G::query_type q, std::size_t k,
                    const SearchParams& params, std::uint64_t seed) {
  QueryContext ctx(seed);
  return search(graph, q, k, params, ctx);
}

/// Number of independent tries needed to lift a per-try success
/// probability `p` to `p_star`: ceil(log(1 - p_star) / log(1 - p)).
inline std::uint32_t estimate_restarts(double p, double p_star) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("estimate_restarts: P must be in (0, 1)");
  if (!(p_star > 0.0 && p_star < 1.0)) throw UsageError("estimate_restarts: P* must be in (0, 1)");
  const double tries = std::log1p(-p_star) / std::log1p(-p);
  // Ratios that are integral in exact arithmetic can land one ulp above.
  const double m = std::ceil(tries * (1.0 - 1e-12));
  return static_cast<std::uint32_t>(std::max(1.0, m));
}

}  // namespace apg
