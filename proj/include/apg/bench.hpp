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
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "apg/eval.hpp"
#include "apg/graph.hpp"
#include "apg/random.hpp"
#include "apg/search.hpp"

namespace apg {

/// One benchmark configuration: a graph built with `n_links` and `params`,
/// queried with the same params.
struct BenchEntry {
  SearchParams params;
  std::uint32_t n_links = 16;

  /// Display name, e.g. "APG m=8 N=8", "APG* N=16", "APG*-R N=16", "BS b=8 N=8".
  std::string name() const {
    const std::string n = "N=" + std::to_string(n_links);
    switch (params.variant) {
      case Variant::kApg: return "APG m=" + std::to_string(params.m) + " " + n;
      case Variant::kApgStar: return "APG* " + n;
      case Variant::kApgStarR: return "APG*-R " + n;
      case Variant::kBeam: return "BS b=" + std::to_string(params.beam) + " " + n;
    }
    return "?";
  }
};

/// Cross product of the given lists. m only multiplies APG rows and beam
/// sizes only multiply BS rows.
inline std::vector<BenchEntry> make_grid(std::span<const Variant> variants,
                                         std::span<const std::uint32_t> n_links,
                                         std::span<const std::uint32_t> ms,
                                         std::span<const std::uint32_t> beams, std::uint32_t sigma) {
  std::vector<BenchEntry> grid;
  for (Variant v : variants) {
    for (std::uint32_t n : n_links) {
      SearchParams p;
      p.variant = v;
      p.sigma = sigma;
      if (v == Variant::kApg) {
        for (std::uint32_t m : ms) {
          p.m = m;
          grid.push_back({p, n});
        }
      } else if (v == Variant::kBeam) {
        for (std::uint32_t b : beams) {
          p.beam = b;
          grid.push_back({p, n});
        }
      } else {
        grid.push_back({p, n});
      }
    }
  }
  for (const auto& e : grid) e.params.validate();
  return grid;
}

struct BenchRow {
  std::string name;
  double recall = 0.0;
  double qps = 0.0;
  double mean_dist_evals = 0.0;
  double mean_hops = 0.0;
  double build_seconds = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  bool parallel = false;
};

/// Seed streams: construction uses stream 0, query i uses stream i + 1.
inline std::uint64_t build_seed(std::uint64_t seed) { return split_seed(seed, 0); }
inline std::uint64_t query_seed(std::uint64_t seed, std::size_t i) { return split_seed(seed, i + 1); }

/// Runs every query against `graph` and scores it against `gt`. Only the
/// query loop is timed.
template <Dataset D>
BenchRow evaluate_graph(const SearchGraph<D>& graph, const D& queries, const GroundTruth& gt,
                        const SearchParams& params, std::uint64_t seed, unsigned workers = 1) {
  if (gt.rows.size() != queries.size()) {
    throw UsageError("ground truth has " + std::to_string(gt.rows.size()) + " rows for " +
                     std::to_string(queries.size()) + " queries");
  }
  if (queries.size() == 0) throw UsageError("no queries");
  const std::size_t k = gt.k;
  std::vector<SearchResult> results(queries.size());
  workers = std::max(1u, workers);

  auto run = [&](std::size_t begin, std::size_t step) {
    QueryContext ctx;
    for (std::size_t i = begin; i < queries.size(); i += step) {
      ctx.rng.seed(query_seed(seed, i));
      results[i] = search(graph, queries.query(static_cast<ItemId>(i)), k, params, ctx);
    }
  };

  const auto t0 = std::chrono::steady_clock::now();
  if (workers == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w, workers);
  }
  const auto t1 = std::chrono::steady_clock::now();
  double elapsed = std::chrono::duration<double>(t1 - t0).count();
  if (!(elapsed > 0.0)) elapsed = 1e-9;

  std::vector<double> recalls(queries.size());
  double evals = 0.0, hops = 0.0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    recalls[i] = recall(results[i].pairs, gt.rows[i]);
    evals += static_cast<double>(results[i].stats.distance_evaluations);
    hops += static_cast<double>(results[i].stats.hops);
  }
  BenchRow row;
  row.recall = macro_recall(recalls);
  row.qps = queries_per_second(queries.size(), elapsed);
  row.mean_dist_evals = evals / static_cast<double>(queries.size());
  row.mean_hops = hops / static_cast<double>(queries.size());
  return row;
}

/// Builds the graph for `entry` (timed separately) and evaluates it.
template <Dataset D>
BenchRow run_entry(const D& data, const D& queries, const GroundTruth& gt, const BenchEntry& entry,
                   std::uint64_t seed, unsigned workers = 1) {
  const auto t0 = std::chrono::steady_clock::now();
  auto graph = SearchGraph<D>::build(data, entry.params, entry.n_links, build_seed(seed));
  const auto t1 = std::chrono::steady_clock::now();
  BenchRow row = evaluate_graph(graph, queries, gt, entry.params, seed, workers);
  row.name = entry.name();
  row.build_seconds = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

template <Dataset D>
BenchReport run_bench(const D& data, const D& queries, const GroundTruth& gt,
                      std::span<const BenchEntry> grid, std::uint64_t seed, unsigned workers = 1) {
  BenchReport report;
  report.parallel = workers > 1;
  for (const auto& e : grid) report.rows.push_back(run_entry(data, queries, gt, e, seed, workers));
  return report;
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// CSV with header name,recall,qps,mean_dist_evals,mean_hops.
inline void write_csv(std::ostream& out, const BenchReport& report) {
  out << "name,recall,qps,mean_dist_evals,mean_hops\n";
  for (const auto& r : report.rows) {
    out << r.name << ',' << format_fixed(r.recall, 6) << ',' << format_fixed(r.qps, 3) << ','
        << format_fixed(r.mean_dist_evals, 3) << ',' << format_fixed(r.mean_hops, 3) << '\n';
  }
}

/// Aligned text table, including the construction time.
inline void write_table(std::ostream& out, const BenchReport& report) {
  const std::vector<std::string> header{"name", "recall", "q/s", "dist_evals", "hops", "build_s"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : report.rows) {
    cells.push_back({r.name, format_fixed(r.recall, 3), format_fixed(r.qps, 1),
                     format_fixed(r.mean_dist_evals, 1), format_fixed(r.mean_hops, 1),
                     format_fixed(r.build_seconds, 2)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
  }
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << '\n';
  };
  emit(header);
  for (const auto& row : cells) emit(row);
  if (report.parallel) out << "# parallel query loop: q/s is not comparable with single-worker runs\n";
}

}  // namespace apg
