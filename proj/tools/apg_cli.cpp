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

// apg: dataset generation, ground truth, index construction, single
// queries and benchmark grids.
//
// Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "apg/apg.hpp"

namespace {

using namespace apg;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

const std::map<std::string, DatasetKind> kKinds{
    {"dense", DatasetKind::kDense}, {"string", DatasetKind::kString}, {"sparse", DatasetKind::kSparse}};

const std::map<std::string, Variant> kVariants{{"apg", Variant::kApg},
                                               {"apg-star", Variant::kApgStar},
                                               {"apg-star-r", Variant::kApgStarR},
                                               {"beam", Variant::kBeam}};

unsigned worker_count(bool parallel) {
  return parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Loads the query file with the same kind as the dataset.
template <Dataset D>
D load_same_kind(const std::string& path) {
  return std::get<D>(read_dataset(path, D::kind));
}

struct GenOptions {
  std::uint32_t dim = 0;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_gen(const GenOptions& o) {
  write_dense(o.out, gen_rvec(o.dim, o.n, o.seed));
  std::cerr << "wrote " << o.n << " x " << o.dim << " vectors to " << o.out << "\n";
}

struct GtOptions {
  std::string dataset, queries, out;
  DatasetKind kind = DatasetKind::kDense;
  std::uint32_t k = 30;
  bool parallel = false;
};

void cmd_gt(const GtOptions& o) {
  auto handle = read_dataset(o.dataset, o.kind);
  std::visit(
      [&]<class D>(const D& data) {
        const D queries = load_same_kind<D>(o.queries);
        if (o.k > data.size()) {
          throw UsageError("--k " + std::to_string(o.k) + " exceeds the dataset size (" +
                           std::to_string(data.size()) + " items); choose k <= n");
        }
        std::cerr << "computing exact " << o.k << "-NN for " << queries.size() << " queries over "
                  << data.size() << " items\n";
        const auto t0 = std::chrono::steady_clock::now();
        const auto gt = compute_ground_truth(data, queries, o.k, worker_count(o.parallel));
        write_gt(o.out, gt);
        std::cerr << "done in " << format_fixed(seconds_since(t0), 2) << " s, wrote " << o.out << "\n";
      },
      handle);
}

struct ParamOptions {
  std::string variant = "apg-star";
  std::uint32_t n_links = 16;
  std::uint32_t sigma = 4;
  std::uint32_t m = 16;
  std::uint32_t beam = 16;
  std::uint64_t seed = 1;
};

SearchParams to_params(const ParamOptions& o) {
  SearchParams p;
  p.variant = parse_variant(o.variant);
  p.sigma = o.sigma;
  p.m = o.m;
  p.beam = o.beam;
  p.validate();
  return p;
}

struct BuildOptions {
  std::string dataset, out;
  DatasetKind kind = DatasetKind::kDense;
  ParamOptions params;
};

void cmd_build(const BuildOptions& o) {
  const SearchParams params = to_params(o.params);
  auto handle = read_dataset(o.dataset, o.kind);
  std::visit(
      [&]<class D>(D& data) {
        const auto t0 = std::chrono::steady_clock::now();
        auto graph = SearchGraph<D>::build(std::move(data), params, o.params.n_links, build_seed(o.params.seed));
        const double secs = seconds_since(t0);
        const auto s = graph_stats(graph);
        std::cout << "n=" << s.n << " degree min/mean/max=" << s.min_degree << "/"
                  << format_fixed(s.mean_degree, 2) << "/" << s.max_degree
                  << " connected=" << (s.connected ? "true" : "false")
                  << " build_seconds=" << format_fixed(secs, 3) << "\n";
        if (!o.out.empty()) save_graph(o.out, graph);
      },
      handle);
}

struct BenchOptions {
  std::string dataset, queries, gt, out;
  DatasetKind kind = DatasetKind::kDense;
  std::uint32_t k = 0;
  std::vector<std::string> variants{"apg", "apg-star", "apg-star-r", "beam"};
  std::vector<std::uint32_t> n_links{8, 16, 32};
  std::vector<std::uint32_t> ms{8, 16, 32};
  std::vector<std::uint32_t> beams{8, 16, 32};
  std::uint32_t sigma = 4;
  std::uint64_t seed = 1;
  bool parallel = false;
};

void cmd_bench(const BenchOptions& o) {
  std::vector<Variant> variants;
  for (const auto& v : o.variants) variants.push_back(parse_variant(v));
  const auto grid = make_grid(variants, o.n_links, o.ms, o.beams, o.sigma);
  const GroundTruth gt = read_gt(o.gt);
  if (o.k != 0 && o.k != gt.k) {
    throw UsageError("--k " + std::to_string(o.k) + " does not match the ground truth k=" + std::to_string(gt.k));
  }

  auto handle = read_dataset(o.dataset, o.kind);
  BenchReport report;
  std::visit(
      [&]<class D>(const D& data) {
        const D queries = load_same_kind<D>(o.queries);
        if (gt.rows.size() != queries.size()) {
          throw FormatError(o.gt + ": " + std::to_string(gt.rows.size()) + " rows for " +
                            std::to_string(queries.size()) + " queries");
        }
        for (const auto& row : gt.rows) {
          for (const auto& p : row) {
            if (p.id >= data.size()) throw FormatError(o.gt + ": id " + std::to_string(p.id) + " out of range");
          }
        }
        report.parallel = o.parallel;
        for (const auto& entry : grid) {
          auto row = run_entry(data, queries, gt, entry, o.seed, worker_count(o.parallel));
          std::cerr << row.name << ": recall " << format_fixed(row.recall, 3) << ", build "
                    << format_fixed(row.build_seconds, 2) << " s\n";
          report.rows.push_back(std::move(row));
        }
      },
      handle);

  write_table(std::cout, report);
  if (!o.out.empty()) {
    std::ofstream csv(o.out);
    if (!csv) throw FormatError(o.out + ": cannot open for writing");
    write_csv(csv, report);
    std::filesystem::path table_path(o.out);
    table_path.replace_extension(".txt");
    std::ofstream table(table_path);
    if (!table) throw FormatError(table_path.string() + ": cannot open for writing");
    write_table(table, report);
  }
}

struct SearchOptions {
  std::string graph, dataset, queries;
  DatasetKind kind = DatasetKind::kDense;
  std::size_t query_index = 0;
  std::uint32_t k = 30;
  std::string variant;  // empty: the variant the graph was built with
  ParamOptions params;
};

void cmd_search(const SearchOptions& o) {
  auto handle = read_dataset(o.dataset, o.kind);
  std::visit(
      [&]<class D>(D& data) {
        const D queries = o.queries.empty() ? data : load_same_kind<D>(o.queries);
        if (o.query_index >= queries.size()) {
          throw UsageError("--query-index " + std::to_string(o.query_index) + " out of range (" +
                           std::to_string(queries.size()) + " queries)");
        }
        SearchParams params;
        params.sigma = o.params.sigma;
        params.m = o.params.m;
        params.beam = o.params.beam;
        auto graph = load_graph(o.graph, std::move(data), params);
        params.variant = o.variant.empty() ? graph.params().variant : parse_variant(o.variant);
        params.validate();

        QueryContext ctx(query_seed(o.params.seed, o.query_index));
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = search(graph, queries.query(static_cast<ItemId>(o.query_index)), o.k, params, ctx);
        const double secs = seconds_since(t0);

        std::cout << "rank id distance\n";
        for (std::size_t i = 0; i < r.pairs.size(); ++i) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.6f", r.pairs[i].dist);
          std::cout << i + 1 << ' ' << r.pairs[i].id << ' ' << buf << '\n';
        }
        std::cout << "stats variant=" << to_string(params.variant)
                  << " distance_evaluations=" << r.stats.distance_evaluations << " n=" << graph.size()
                  << " restarts=" << r.stats.restarts << " hops=" << r.stats.hops
                  << " outer_iterations=" << r.stats.outer_iterations
                  << " seconds=" << format_fixed(secs, 6) << '\n';
      },
      handle);
}

void add_kind(CLI::App* cmd, DatasetKind& kind) {
  cmd->add_option("--kind", kind, "Item domain of the dataset")
      ->transform(CLI::CheckedTransformer(kKinds, CLI::ignore_case));
}

// `for_build` adds the construction-only options.
void add_params(CLI::App* cmd, ParamOptions& p, bool for_build) {
  if (for_build) {
    cmd->add_option("--variant", p.variant, "Search algorithm")
        ->check(CLI::IsMember({"apg", "apg-star", "apg-star-r", "beam"}));
    cmd->add_option("--n-links", p.n_links, "Forward links per insertion (N)")->check(CLI::PositiveNumber);
  }
  cmd->add_option("--sigma", p.sigma, "Tries between stopping checks")->check(CLI::PositiveNumber);
  cmd->add_option("--m", p.m, "Restarts for apg")->check(CLI::PositiveNumber);
  cmd->add_option("--beam", p.beam, "Beam size for beam")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", p.seed, "Random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate k-nearest-neighbor search over proximity graphs"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a uniform random dense dataset");
  gen_cmd->add_option("--dim", gen.dim, "Dimension")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--n", gen.n, "Number of vectors")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--out", gen.out, "Output file")->required();

  GtOptions gt;
  auto* gt_cmd = app.add_subcommand("gt", "Compute exact k nearest neighbors of a query set");
  gt_cmd->add_option("--dataset", gt.dataset, "Dataset file")->required();
  gt_cmd->add_option("--queries", gt.queries, "Query file (same kind)")->required();
  gt_cmd->add_option("--k", gt.k, "Neighbors per query")->check(CLI::PositiveNumber);
  gt_cmd->add_option("--out", gt.out, "Ground truth output file")->required();
  gt_cmd->add_flag("--parallel", gt.parallel, "Use all hardware threads");
  add_kind(gt_cmd, gt.kind);

  BuildOptions build;
  auto* build_cmd = app.add_subcommand("build", "Build a search graph and report its structure");
  build_cmd->add_option("--dataset", build.dataset, "Dataset file")->required();
  build_cmd->add_option("--out", build.out, "Write the graph to this file");
  add_kind(build_cmd, build.kind);
  add_params(build_cmd, build.params, true);

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Build and benchmark a grid of configurations");
  bench_cmd->add_option("--dataset", bench.dataset, "Dataset file")->required();
  bench_cmd->add_option("--queries", bench.queries, "Query file (same kind)")->required();
  bench_cmd->add_option("--gt", bench.gt, "Ground truth file")->required();
  bench_cmd->add_option("--k", bench.k, "Expected k (must match the ground truth)");
  bench_cmd->add_option("--variant", bench.variants, "Algorithms to run")
      ->check(CLI::IsMember({"apg", "apg-star", "apg-star-r", "beam"}))
      ->delimiter(',');
  bench_cmd->add_option("--n-links", bench.n_links, "Values of N")->check(CLI::PositiveNumber)->delimiter(',');
  bench_cmd->add_option("--m", bench.ms, "Restart counts for apg")->check(CLI::PositiveNumber)->delimiter(',');
  bench_cmd->add_option("--beam", bench.beams, "Beam sizes")->check(CLI::PositiveNumber)->delimiter(',');
  bench_cmd->add_option("--sigma", bench.sigma, "Tries between stopping checks")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Random seed");
  bench_cmd->add_option("--out", bench.out, "CSV report (an aligned table is written next to it as .txt)");
  bench_cmd->add_flag("--parallel", bench.parallel, "Run queries on all hardware threads");
  add_kind(bench_cmd, bench.kind);

  SearchOptions srch;
  auto* search_cmd = app.add_subcommand("search", "Answer one query with a saved graph");
  search_cmd->add_option("--graph", srch.graph, "Graph file written by build --out")->required();
  search_cmd->add_option("--dataset", srch.dataset, "Dataset the graph was built on")->required();
  search_cmd->add_option("--queries", srch.queries, "Query file (defaults to the dataset)");
  search_cmd->add_option("--query-index", srch.query_index, "Which query to run");
  search_cmd->add_option("--k", srch.k, "Neighbors to return")->check(CLI::PositiveNumber);
  search_cmd->add_option("--variant", srch.variant, "Override the graph's algorithm")
      ->check(CLI::IsMember({"apg", "apg-star", "apg-star-r", "beam"}));
  add_kind(search_cmd, srch.kind);
  add_params(search_cmd, srch.params, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) cmd_gen(gen);
    if (*gt_cmd) cmd_gt(gt);
    if (*build_cmd) cmd_build(build);
    if (*bench_cmd) cmd_bench(bench);
    if (*search_cmd) cmd_search(srch);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::bad_variant_access&) {
    std::cerr << "error: query file kind does not match the dataset kind\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
