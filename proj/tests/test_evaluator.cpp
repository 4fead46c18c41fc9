/*
 * Copyright 2026 VGCL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "vgcl/evaluator.hpp"
#include "vgcl/rng.hpp"

using namespace vgcl;

namespace {

struct RandomInstance {
  Matrix users;
  Matrix items;
  InteractionTable train;
  InteractionTable test;
};

RandomInstance random_instance(int n_users, int n_items, std::uint64_t seed) {
  RandomInstance inst;
  RngStream rng(seed);
  inst.users.resize(n_users, 3);
  inst.items.resize(n_items, 3);
  rng.fill_normal(inst.users);
  rng.fill_normal(inst.items);
  inst.train.user_count = inst.test.user_count = n_users;
  inst.train.item_count = inst.test.item_count = n_items;
  for (int u = 0; u < n_users; ++u) {
    for (int i = 0; i < n_items; ++i) {
      const double roll = rng.uniform();
      if (roll < 0.25) {
        inst.train.pairs.emplace_back(u, i);
      } else if (roll < 0.45) {
        inst.test.pairs.emplace_back(u, i);
      }
    }
  }
  return inst;
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("one test item ranked first scores perfectly") {
  Matrix users(1, 2), items(4, 2);
  users << 1, 0;
  items << 5, 0,  // test item, highest score
      1, 0, 0.5, 0, 0.1, 0;
  InteractionTable train{{}, 1, 4};
  InteractionTable test{{{0, 0}}, 1, 4};
  const MetricsReport report = evaluate(users, items, train, test, {10});
  CHECK(report.recall[0] == 1.0);
  CHECK(report.ndcg[0] == 1.0);
  CHECK(report.evaluated_users == 1);
}

TEST_CASE("one test item ranked third gives ndcg 1/log2(4)") {
  Matrix users(1, 2), items(4, 2);
  users << 1, 0;
  items << 1, 0,  // rank 2
      2, 0,       // rank 1
      0.5, 0,     // the test item, rank 3
      0.1, 0;
  InteractionTable train{{}, 1, 4};
  InteractionTable test{{{0, 2}}, 1, 4};
  const MetricsReport report = evaluate(users, items, train, test, {10});
  CHECK(report.ndcg[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(report.recall[0] == 1.0);
}

TEST_CASE("random instances match the brute-force oracle exactly") {
  const std::vector<int> cutoffs = {1, 3, 5, 10};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomInstance inst = random_instance(6, 9, 900 + seed);
    if (inst.test.pairs.empty()) continue;

    const auto per_user =
        evaluate_per_user(inst.users, inst.items, inst.train, inst.test, cutoffs);

    std::vector<std::set<int>> train_sets(6), test_sets(6);
    for (const auto& [u, i] : inst.train.pairs) train_sets[u].insert(i);
    for (const auto& [u, i] : inst.test.pairs) test_sets[u].insert(i);

    for (const auto& m : per_user) {
      std::vector<double> scores(9);
      for (int i = 0; i < 9; ++i) {
        scores[i] = inst.users.row(m.user).dot(inst.items.row(i));
      }
      for (std::size_t c = 0; c < cutoffs.size(); ++c) {
        const auto expected = oracle::brute_force_rank(
            scores, train_sets[m.user], test_sets[m.user], cutoffs[c]);
        CHECK(m.recall[c] == expected.recall);
        CHECK(m.ndcg[c] == expected.ndcg);
      }
    }
  }
}

TEST_CASE("recall is monotone non-decreasing in the cutoff") {
  // NDCG is monotone only when the user has a single test item (the ideal
  // DCG is truncated at min(N, |test|), so its denominator grows with N).
  const RandomInstance inst = random_instance(8, 12, 77);
  const std::vector<int> cutoffs = {1, 2, 3, 5, 8, 12};
  const auto per_user =
      evaluate_per_user(inst.users, inst.items, inst.train, inst.test, cutoffs);
  std::vector<std::set<int>> test_sets(8);
  for (const auto& [u, i] : inst.test.pairs) test_sets[u].insert(i);
  for (const auto& m : per_user) {
    for (std::size_t c = 1; c < cutoffs.size(); ++c) {
      CHECK(m.recall[c] >= m.recall[c - 1]);
      if (test_sets[m.user].size() == 1) {
        CHECK(m.ndcg[c] >= m.ndcg[c - 1] - 1e-15);
      }
    }
  }
}

TEST_CASE("per-user metrics are invariant to per-user score shifts") {
  const RandomInstance base = random_instance(6, 10, 78);
  // Append one dimension: users carry a private constant, items carry 1,
  // shifting every score of user u by c_u without reordering anything.
  Matrix users(6, 4), items(10, 4);
  users.leftCols(3) = base.users;
  items.leftCols(3) = base.items;
  RngStream rng(79);
  for (int u = 0; u < 6; ++u) users(u, 3) = 10.0 * rng.normal();
  items.col(3).setOnes();

  const std::vector<int> cutoffs = {3, 5};
  const auto before =
      evaluate_per_user(base.users, base.items, base.train, base.test, cutoffs);
  const auto after = evaluate_per_user(users, items, base.train, base.test, cutoffs);
  REQUIRE(before.size() == after.size());
  for (std::size_t k = 0; k < before.size(); ++k) {
    CHECK(before[k].user == after[k].user);
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      CHECK(before[k].recall[c] == doctest::Approx(after[k].recall[c]).epsilon(1e-12));
      CHECK(before[k].ndcg[c] == doctest::Approx(after[k].ndcg[c]).epsilon(1e-12));
    }
  }
}

TEST_CASE("train items never occupy top slots") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const RandomInstance inst = random_instance(5, 8, seed);
    if (inst.test.pairs.empty()) continue;
    std::vector<std::set<int>> train_sets(5), test_sets(5);
    for (const auto& [u, i] : inst.train.pairs) train_sets[u].insert(i);
    for (const auto& [u, i] : inst.test.pairs) test_sets[u].insert(i);

    // give train items the highest raw scores so a masking bug would promote them
    Matrix items = inst.items;
    for (const auto& [u, i] : inst.train.pairs) items.row(i).array() += 100.0;

    const auto per_user =
        evaluate_per_user(inst.users, items, inst.train, inst.test, {8});
    for (const auto& m : per_user) {
      // recall can only come from test items; a leaked train item would
      // displace them and show up as an oracle mismatch
      std::vector<double> scores(8);
      for (int i = 0; i < 8; ++i) scores[i] = inst.users.row(m.user).dot(items.row(i));
      const auto expected =
          oracle::brute_force_rank(scores, train_sets[m.user], test_sets[m.user], 8);
      CHECK(m.recall[0] == expected.recall);
      CHECK(m.ndcg[0] == expected.ndcg);
    }
  }
}

TEST_CASE("empty test raises EmptyEvaluation") {
  const RandomInstance inst = random_instance(3, 5, 81);
  InteractionTable empty{{}, 3, 5};
  CHECK_THROWS_AS(evaluate(inst.users, inst.items, inst.train, empty, {5}),
                  EmptyEvaluationError);
}

TEST_CASE("degree quantile groups stay within one of equal size") {
  std::vector<int> degrees(10, 7);  // all identical
  const auto groups = degree_quantile_groups(degrees, 4);
  CHECK(groups.size() == 4);
  std::size_t lo = 100, hi = 0;
  int total = 0;
  for (const auto& g : groups) {
    lo = std::min(lo, g.size());
    hi = std::max(hi, g.size());
    total += static_cast<int>(g.size());
  }
  CHECK(total == 10);
  CHECK(hi - lo <= 1);
  // stable order: first group holds the first users
  CHECK(groups[0][0] == 0);
}

TEST_CASE("group boundaries equal the sorted-degree chunks") {
  std::vector<int> degrees = {50, 3, 18, 7, 2, 31, 9, 12, 1, 4, 22, 16};
  const int n_groups = 4;
  const auto groups = degree_quantile_groups(degrees, n_groups);

  std::vector<int> sorted_degrees = degrees;
  std::sort(sorted_degrees.begin(), sorted_degrees.end());
  std::size_t cursor = 0;
  for (const auto& g : groups) {
    std::vector<int> got;
    for (int user : g) got.push_back(degrees[user]);
    std::sort(got.begin(), got.end());
    for (int value : got) {
      CHECK(value == sorted_degrees[cursor]);
      ++cursor;
    }
  }
}

TEST_CASE("group analysis reports constant sigma as identical means") {
  const RandomInstance inst = random_instance(8, 10, 82);
  const Matrix sigma = Matrix::Constant(8, 3, 0.7);
  const auto rows =
      group_analysis(inst.users, inst.items, sigma, inst.train, inst.test, 4);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.mean_sigma == doctest::Approx(0.7).epsilon(1e-12));
  }
  CHECK_THROWS_AS(
      group_analysis(inst.users, inst.items, sigma, inst.train, inst.test, 9),
      ConfigError);
}

TEST_CASE("spearman correlation recovers monotone trends") {
  CHECK(spearman_correlation({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
  CHECK(spearman_correlation({1, 2, 3, 4}, {9, 7, 5, 3}) == doctest::Approx(-1.0));
  CHECK(spearman_correlation({1, 2, 3, 4}, {5, 5, 5, 5}) == 0.0);
}

}  // TEST_SUITE
