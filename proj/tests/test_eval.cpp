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
#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>
#include <vector>

#include "apg/eval.hpp"
#include "test_util.hpp"

using Catch::Approx;
using namespace apg;

TEST_CASE("exact_knn", "[eval]") {
  auto one = gen_rvec(3, 1, 4);
  auto q = gen_rvec(3, 1, 5);
  auto r = exact_knn(one, q.item(0), 5);
  REQUIRE(r.size() == 1);
  REQUIRE(r[0].id == 0);

  auto data = gen_rvec(3, 50, 6);
  auto self = exact_knn(data, data.item(5), 1);
  REQUIRE(self[0] == ScoredId{0.0, 5});

  REQUIRE_THROWS_AS(exact_knn(data, q.item(0), 0), UsageError);
  REQUIRE_THROWS_AS(exact_knn(DenseDataset(3), q.item(0), 1), UsageError);
}

TEST_CASE("exact_knn agrees with the sort-everything oracle", "[eval][oracle]") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    // Few distinct coordinates to force distance ties.
    const std::uint32_t dim = 1 + rng() % 3;
    const std::size_t n = 1 + rng() % 200;
    std::vector<float> raw(n * dim);
    for (auto& x : raw) x = static_cast<float>(rng() % 4);
    DenseDataset data(dim, raw);
    std::vector<float> q(dim);
    for (auto& x : q) x = static_cast<float>(rng() % 4);
    const std::size_t k = 1 + rng() % 40;
    REQUIRE(exact_knn(data, q, k) == testutil::sort_all_knn(data, q, k));
  }
}

TEST_CASE("compute_ground_truth", "[eval]") {
  auto data = gen_rvec(4, 300, 1);
  auto queries = gen_rvec(4, 20, 2);
  auto serial = compute_ground_truth(data, queries, 7);
  auto threaded = compute_ground_truth(data, queries, 7, 3);
  REQUIRE(serial == threaded);
  REQUIRE(serial.rows.size() == 20);
  REQUIRE_THROWS_AS(compute_ground_truth(data, queries, 301), UsageError);
}

TEST_CASE("recall", "[eval]") {
  std::vector<ScoredId> exact{{1, 0}, {2, 1}, {3, 2}, {4, 3}};
  REQUIRE(recall(exact, exact) == 1.0);
  std::vector<ScoredId> disjoint{{1, 10}, {2, 11}, {3, 12}, {4, 13}};
  REQUIRE(recall(disjoint, exact) == 0.0);
  std::vector<ScoredId> three{{1, 0}, {2, 1}, {3, 2}, {4, 9}};
  REQUIRE(recall(three, exact) == 0.75);

  std::vector<ScoredId> shuffled{{4, 9}, {3, 2}, {1, 0}, {2, 1}};
  std::vector<ScoredId> exact_rev(exact.rbegin(), exact.rend());
  REQUIRE(recall(shuffled, exact_rev) == 0.75);
}

TEST_CASE("macro_recall and queries_per_second", "[eval]") {
  REQUIRE(macro_recall(std::vector<double>{1.0}) == 1.0);
  REQUIRE(macro_recall(std::vector<double>{1.0, 0.0}) == 0.5);
  REQUIRE_THROWS_AS(macro_recall(std::vector<double>{}), UsageError);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> vals(256);
  for (auto& v : vals) v = u(rng);
  long double ref = 0;
  for (double v : vals) ref += v;
  REQUIRE(macro_recall(vals) == Approx(static_cast<double>(ref / 256)).epsilon(1e-12));

  REQUIRE(queries_per_second(100, 1.0) == 100.0);
  REQUIRE(queries_per_second(256, 0.5) == 512.0);
  // A 0.005 s sequential scan solves 200 queries per second.
  REQUIRE(queries_per_second(1, 0.005) == Approx(200.0));
  REQUIRE_THROWS_AS(queries_per_second(10, 0.0), UsageError);
  REQUIRE_THROWS_AS(queries_per_second(10, -1.0), UsageError);
}
