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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers as arguments to
// run a subset, e.g. `acceptance 6 7 8 9`.
//
// Workload: uniform vectors in [0,1)^dim, n = 100000 (data seed 1),
// 200 queries (query seed 2), k = 30, bench seed 42, sigma = 4.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "apg/apg.hpp"

using namespace apg;

namespace {

constexpr std::size_t kN = 100000;
constexpr std::size_t kQueries = 200;
constexpr std::size_t kK = 30;
constexpr std::uint64_t kDataSeed = 1;
constexpr std::uint64_t kQuerySeed = 2;
constexpr std::uint64_t kBenchSeed = 42;

struct Workload {
  DenseDataset data;
  DenseDataset queries;
  GroundTruth gt;
};

const Workload& workload(std::uint32_t dim) {
  static std::map<std::uint32_t, Workload> cache;
  auto it = cache.find(dim);
  if (it == cache.end()) {
    Workload w{gen_rvec(dim, kN, kDataSeed), gen_rvec(dim, kQueries, kQuerySeed), {}};
    w.gt = compute_ground_truth(w.data, w.queries, kK);
    it = cache.emplace(dim, std::move(w)).first;
  }
  return it->second;
}

struct Outcome {
  double recall = 0.0;
  double mean_evals = 0.0;
  // Every query evaluated exactly as many distances as its cache holds.
  bool evals_match_cache = true;
  double build_seconds = 0.0;
};

BenchEntry entry(Variant v, std::uint32_t n_links, std::uint32_t m_or_b = 0) {
  BenchEntry e;
  e.params.variant = v;
  e.n_links = n_links;
  if (v == Variant::kApg) e.params.m = m_or_b;
  if (v == Variant::kBeam) e.params.beam = m_or_b;
  return e;
}

/// Builds and evaluates one configuration; results are memoized so that
/// criteria sharing a configuration share the build.
const Outcome& outcome(std::uint32_t dim, const BenchEntry& e) {
  static std::map<std::pair<std::uint32_t, std::string>, Outcome> cache;
  const auto key = std::make_pair(dim, e.name());
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const Workload& w = workload(dim);
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto graph = SearchGraph<DenseDataset>::build(w.data, e.params, e.n_links, build_seed(kBenchSeed));
  o.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<double> recalls;
  double evals = 0.0;
  QueryContext ctx;
  for (std::size_t i = 0; i < kQueries; ++i) {
    ctx.rng.seed(query_seed(kBenchSeed, i));
    const auto r = search(graph, w.queries.item(static_cast<ItemId>(i)), kK, e.params, ctx);
    recalls.push_back(recall(r.pairs, w.gt.rows[i]));
    evals += static_cast<double>(r.stats.distance_evaluations);
    if (r.stats.distance_evaluations != ctx.visited.size()) o.evals_match_cache = false;
  }
  o.recall = macro_recall(recalls);
  o.mean_evals = evals / kQueries;
  std::fprintf(stderr, "  [dim %u] %-14s recall %.3f  evals %.1f  build %.1f s\n", dim, e.name().c_str(),
               o.recall, o.mean_evals, o.build_seconds);
  return cache.emplace(key, o).first->second;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [X]");
    pass = pass && ok;
  }
};

// --- criteria -------------------------------------------------------------

Verdict recall_targets() {
  Verdict v;
  struct Target {
    BenchEntry e;
    double expected, below, above;
  };
  const Target targets[] = {
      {entry(Variant::kApgStar, 8), 0.654, 0.03, 0.03},
      {entry(Variant::kApgStar, 32), 0.985, 0.03, 0.03},
      {entry(Variant::kApgStarR, 16), 0.978, 0.03, 0.03},
      {entry(Variant::kBeam, 8, 8), 0.969, 0.03, 0.03},
      {entry(Variant::kBeam, 16, 16), 0.999, 0.02, 0.001},
  };
  for (const auto& t : targets) {
    const double r = outcome(16, t.e).recall;
    v.require(r >= t.expected - t.below && r <= t.expected + t.above,
              t.e.name() + " " + fmt(r) + " vs " + fmt(t.expected));
  }
  return v;
}

Verdict dimension_trend() {
  Verdict v;
  const double r16 = outcome(16, entry(Variant::kApgStar, 8)).recall;
  const double r32 = outcome(32, entry(Variant::kApgStar, 8)).recall;
  const double r64 = outcome(64, entry(Variant::kApgStar, 8)).recall;
  v.require(r16 > r32 && r32 > r64, "APG* N=8 dims 16/32/64: " + fmt(r16) + " > " + fmt(r32) + " > " + fmt(r64));
  v.require(std::abs(r32 - 0.32) <= 0.05, "dim 32 " + fmt(r32) + " vs 0.32");
  v.require(std::abs(r64 - 0.18) <= 0.05, "dim 64 " + fmt(r64) + " vs 0.18");
  return v;
}

Verdict beam_monotonicity() {
  Verdict v;
  constexpr std::uint32_t kVals[] = {8, 16, 32};
  constexpr double kSlack = 0.01;
  double r[3][3];  // [b][N]
  for (int bi = 0; bi < 3; ++bi) {
    for (int ni = 0; ni < 3; ++ni) r[bi][ni] = outcome(32, entry(Variant::kBeam, kVals[ni], kVals[bi])).recall;
  }
  int violations = 0;
  std::string worst;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j + 1 < 3; ++j) {
      if (r[j + 1][i] < r[j][i] - kSlack) {
        ++violations;
        worst += " b" + std::to_string(kVals[j + 1]) + "<b" + std::to_string(kVals[j]) + "@N" + std::to_string(kVals[i]);
      }
      if (r[i][j + 1] < r[i][j] - kSlack) {
        ++violations;
        worst += " N" + std::to_string(kVals[j + 1]) + "<N" + std::to_string(kVals[j]) + "@b" + std::to_string(kVals[i]);
      }
    }
  }
  std::string grid;
  for (int bi = 0; bi < 3; ++bi) {
    grid += (bi ? " | b=" : "b=") + std::to_string(kVals[bi]) + ":";
    for (int ni = 0; ni < 3; ++ni) grid += " " + fmt(r[bi][ni]);
  }
  v.require(violations == 0, "dim 32 BS grid " + grid + (worst.empty() ? "" : ";" + worst));
  return v;
}

Verdict apg_star_matches_tuned_apg() {
  Verdict v;
  for (std::uint32_t n_links : {8u, 16u, 32u}) {
    const double star = outcome(16, entry(Variant::kApgStar, n_links)).recall;
    double best = 0.0;
    for (std::uint32_t m : {8u, 16u, 32u}) best = std::max(best, outcome(16, entry(Variant::kApg, n_links, m)).recall);
    v.require(std::abs(star - best) <= 0.05,
              "N=" + std::to_string(n_links) + " APG* " + fmt(star) + " vs best APG " + fmt(best));
  }
  return v;
}

Verdict beam_evaluation_budget() {
  Verdict v;
  const Outcome& o = outcome(16, entry(Variant::kBeam, 8, 8));
  v.require(o.mean_evals < 0.1 * kN, "BS b=8 N=8 mean evals " + fmt(o.mean_evals) + " < " + fmt(0.1 * kN));
  v.require(o.evals_match_cache, "evaluations equal cache size on every query");
  return v;
}

Verdict complete_graph_exactness() {
  Verdict v;
  std::mt19937_64 rng(2024);
  int mismatches = 0, checks = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t n_links = 2 + rng() % 30;
    const std::size_t n = 1 + rng() % (n_links + 1);
    const std::uint32_t dim = 1 + rng() % 16;
    auto data = gen_rvec(dim, n, rng());
    auto queries = gen_rvec(dim, 3, rng());
    for (Variant var : {Variant::kApg, Variant::kApgStar, Variant::kApgStarR, Variant::kBeam}) {
      SearchParams p;
      p.variant = var;
      p.m = 1 + rng() % 8;
      p.beam = 1 + rng() % 8;
      auto g = SearchGraph<DenseDataset>::build(data, p, n_links, rng());
      for (ItemId qi = 0; qi < queries.size(); ++qi) {
        const std::size_t k = 1 + rng() % n;
        ++checks;
        if (search(g, queries.item(qi), k, p, rng()).pairs != exact_knn(data, queries.item(qi), k)) ++mismatches;
      }
    }
  }
  v.require(mismatches == 0, std::to_string(checks - mismatches) + "/" + std::to_string(checks) +
                                 " searches on complete graphs equal the exact answer");
  return v;
}

Verdict property_suite() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(77);

  {  // Bounded queue against sort-and-truncate.
    int bad = 0;
    for (int s = 0; s < 1000; ++s) {
      const std::size_t len = rng() % 200, cap = 1 + rng() % 40;
      std::vector<ScoredId> all;
      for (std::size_t i = 0; i < len; ++i) all.push_back({static_cast<double>(rng() % 50), static_cast<ItemId>(i)});
      std::shuffle(all.begin(), all.end(), rng);
      KnnQueue q(cap);
      Distance last_cov = kInfiniteDistance;
      for (const auto& x : all) {
        q.push(x);
        if (q.covering_radius() > last_cov) ++bad;
        last_cov = q.covering_radius();
      }
      std::sort(all.begin(), all.end());
      all.resize(std::min(cap, all.size()));
      if (q.sorted() != all) ++bad;
    }
    v.require(bad == 0, "KnnQueue oracle x1000");
  }

  {  // COV(res) never increases across rounds.
    auto data = gen_rvec(8, 3000, 5);
    auto queries = gen_rvec(8, 30, 6);
    int bad = 0;
    for (Variant var : {Variant::kApg, Variant::kApgStar, Variant::kApgStarR, Variant::kBeam}) {
      SearchParams p;
      p.variant = var;
      p.m = 4;
      p.beam = 4;
      auto g = SearchGraph<DenseDataset>::build(data, p, 8, 1);
      for (ItemId qi = 0; qi < queries.size(); ++qi) {
        QueryContext ctx(qi);
        Distance last = kInfiniteDistance;
        ctx.on_round = [&](Distance c) {
          if (c > last) ++bad;
          last = c;
        };
        search(g, queries.item(qi), 10, p, ctx);
      }
    }
    v.require(bad == 0, "COV non-increasing");
  }

  {  // Symmetric, connected adjacency after every build size.
    int bad = 0;
    for (std::size_t n = 1; n <= 200; ++n) {
      auto data = gen_rvec(4, n, n);
      SearchParams p;
      p.variant = static_cast<Variant>(n % 4);
      p.m = 2;
      p.beam = 2;
      auto g = SearchGraph<DenseDataset>::build(data, p, 1 + n % 8, n);
      if (!check_adjacency(g).empty() || !graph_stats(g).connected) ++bad;
    }
    v.require(bad == 0, "adjacency symmetric and connected n=1..200");
  }

  {  // Two bench runs with one seed agree exactly.
    auto data = gen_rvec(6, 2000, 8);
    auto queries = gen_rvec(6, 20, 9);
    auto gt = compute_ground_truth(data, queries, 10);
    const Variant vs[] = {Variant::kApg, Variant::kApgStar, Variant::kApgStarR, Variant::kBeam};
    const std::uint32_t eights[] = {8};
    auto grid = make_grid(vs, eights, eights, eights, 4);
    auto a = run_bench(data, queries, gt, grid, 5);
    auto b = run_bench(data, queries, gt, grid, 5);
    bool same = a.rows.size() == b.rows.size();
    for (std::size_t i = 0; same && i < a.rows.size(); ++i) {
      same = a.rows[i].recall == b.rows[i].recall && a.rows[i].mean_dist_evals == b.rows[i].mean_dist_evals &&
             a.rows[i].mean_hops == b.rows[i].mean_hops;
    }
    v.require(same, "bench deterministic");
  }

  {  // Metric axioms.
    constexpr int kTriples = 10000;
    auto axioms = [&](auto&& d, auto&& sample) {
      int bad = 0;
      for (int t = 0; t < kTriples; ++t) {
        const auto x = sample(), y = sample(), z = sample();
        const double xy = d(x, y), yx = d(y, x), yz = d(y, z), xz = d(x, z);
        const double eps = 1e-9 * (1.0 + xy + yz);
        if (xy < 0 || d(x, x) > 1e-12 || std::abs(xy - yx) > 1e-12 || xz > xy + yz + eps) ++bad;
      }
      return bad;
    };
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    const int l2_bad = axioms([](const std::vector<float>& a, const std::vector<float>& b) { return l2_distance(a, b); },
                              [&] {
                                std::vector<float> x(12);
                                for (auto& c : x) c = u(rng);
                                return x;
                              });
    const int lev_bad = axioms([](const std::u32string& a, const std::u32string& b) { return levenshtein(a, b); },
                               [&] {
                                 static constexpr char32_t kAlpha[] = {U'a', U'b', U'c', U'é', U'\U0001F600'};
                                 std::u32string s(rng() % 10, U'a');
                                 for (auto& c : s) c = kAlpha[rng() % 5];
                                 return s;
                               });
    std::uniform_real_distribution<double> w(0.01, 2.0);
    const int ang_bad = axioms([](const SparseVector& a, const SparseVector& b) { return angle_distance(a, b); },
                               [&] {
                                 SparseVector s;
                                 for (std::uint32_t t = 0; t < 20; ++t) {
                                   if (rng() % 3 == 0) s.push_back({t, w(rng)});
                                 }
                                 if (s.empty()) s.push_back({static_cast<std::uint32_t>(rng() % 20), w(rng)});
                                 return s;
                               });
    v.require(l2_bad == 0 && lev_bad == 0 && ang_bad == 0, "metric axioms x1e4 per metric");
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.require(secs < 60.0, "elapsed " + fmt(secs) + " s < 60 s");
  return v;
}

Verdict restart_estimate() {
  Verdict v;
  const auto m = estimate_restarts(0.5, 0.9375);
  v.require(m == 4, "estimate_restarts(0.5, 0.9375) = " + std::to_string(m));
  return v;
}

Verdict format_round_trips() {
  Verdict v;
  std::mt19937_64 rng(31);

  const auto dense = gen_rvec(7, 300, 3);
  const std::string d1 = encode_dense(dense);
  v.require(encode_dense(decode_dense(d1)) == d1, "dense");

  auto gt = compute_ground_truth(dense, gen_rvec(7, 12, 4), 9);
  const std::string g1 = encode_gt(gt);
  v.require(encode_gt(decode_gt(g1)) == g1, "gt");

  std::vector<SparseVector> vecs;
  std::uniform_real_distribution<double> w(0.001, 100.0);
  for (int i = 0; i < 200; ++i) {
    SparseVector s;
    for (std::uint32_t t = 0; t < 1000; t += 1 + rng() % 200) s.push_back({t, w(rng)});
    if (s.empty()) s.push_back({0, 1.0});
    vecs.push_back(s);
  }
  const std::string s1 = encode_sparse(SparseDataset(vecs));
  v.require(encode_sparse(decode_sparse(s1)) == s1, "sparse");

  std::vector<std::u32string> words;
  for (int i = 0; i < 200; ++i) {
    std::u32string s(1 + rng() % 12, U'a');
    for (auto& c : s) c = U"xyzéλ\U0001F600"[rng() % 6];
    words.push_back(s);
  }
  const std::string t1 = encode_strings(StringDataset(words));
  v.require(encode_strings(decode_strings(t1)) == t1, "strings");
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "recall at dim 16 matches reference values", recall_targets},
      {2, "APG* recall falls with dimension", dimension_trend},
      {3, "beam search recall is monotone in b and N", beam_monotonicity},
      {4, "APG* matches the best-tuned APG", apg_star_matches_tuned_apg},
      {5, "beam search evaluates under 10% of the data", beam_evaluation_budget},
      {6, "complete graphs give exact answers", complete_graph_exactness},
      {7, "property suite within one minute", property_suite},
      {8, "restart estimate", restart_estimate},
      {9, "file formats round-trip byte for byte", format_round_trips},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
