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

#include <set>

#include "vgcl/clustering.hpp"

using namespace vgcl;

namespace {

// Two tight 2-D blobs separated far beyond their spread.
Matrix two_blobs(int per_blob, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix points(2 * per_blob, 2);
  rng.fill_normal(points);
  points *= 0.1;
  for (int i = 0; i < per_blob; ++i) points.row(i).array() += 100.0;
  return points;
}

}  // namespace

TEST_SUITE("clustering") {

TEST_CASE("two well-separated blobs are recovered exactly") {
  const Matrix points = two_blobs(20, 5);
  RngStream rng(6);
  const KMeansResult result = kmeans_fit(points, 2, rng);

  std::set<int> first_labels, second_labels;
  for (int i = 0; i < 20; ++i) first_labels.insert(result.labels[i]);
  for (int i = 20; i < 40; ++i) second_labels.insert(result.labels[i]);
  CHECK(first_labels.size() == 1);
  CHECK(second_labels.size() == 1);
  CHECK(*first_labels.begin() != *second_labels.begin());
}

TEST_CASE("a single cluster lands on the mean") {
  RngStream gen(7);
  Matrix points(15, 3);
  gen.fill_normal(points);
  RngStream rng(8);
  const KMeansResult result = kmeans_fit(points, 1, rng);
  const RowVector mean = points.colwise().mean();
  CHECK((result.centroids.row(0) - mean).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fitting is deterministic for a fixed stream") {
  const Matrix points = two_blobs(10, 9);
  RngStream a(10), b(10);
  const KMeansResult ra = kmeans_fit(points, 3, a);
  const KMeansResult rb = kmeans_fit(points, 3, b);
  CHECK((ra.centroids.array() == rb.centroids.array()).all());
  CHECK(ra.labels == rb.labels);
}

TEST_CASE("k beyond the point count is rejected") {
  Matrix points = Matrix::Zero(3, 2);
  RngStream rng(1);
  CHECK_THROWS_AS(kmeans_fit(points, 4, rng), ConfigError);
}

TEST_CASE("the within-cluster objective never increases") {
  RngStream gen(11);
  Matrix points(60, 4);
  gen.fill_normal(points);
  RngStream rng(12);
  const KMeansResult result = kmeans_fit(points, 5, rng);
  REQUIRE(result.objective_history.size() >= 1);
  for (std::size_t i = 1; i < result.objective_history.size(); ++i) {
    CHECK(result.objective_history[i] <= result.objective_history[i - 1] + 1e-9);
  }
}

TEST_CASE("k repeated distinct locations are returned as the centroids") {
  Matrix locations(3, 2);
  locations << 0, 0, 5, 5, -4, 2;
  Matrix points(12, 2);
  for (int i = 0; i < 12; ++i) points.row(i) = locations.row(i % 3);
  RngStream rng(13);
  const KMeansResult result = kmeans_fit(points, 3, rng);

  for (int c = 0; c < 3; ++c) {  // each location matched by some centroid
    double best = 1e300;
    for (int k = 0; k < 3; ++k) {
      best = std::min(best, (result.centroids.row(k) - locations.row(c)).norm());
    }
    CHECK(best < 1e-12);
  }
}

TEST_CASE("hard assignment is one-hot at the nearest centroid") {
  Matrix centroids(2, 2);
  centroids << 0, 0, 10, 0;
  Matrix points(2, 2);
  points << 0, 0, 9, 0;
  const Matrix probs = assign_probs(points, centroids, AssignMode::kHard);
  CHECK(probs(0, 0) == 1.0);
  CHECK(probs(0, 1) == 0.0);
  CHECK(probs(1, 1) == 1.0);

  // equidistant point: tie broken toward the lower index
  Matrix mid(1, 2);
  mid << 5, 0;
  const Matrix tie = assign_probs(mid, centroids, AssignMode::kHard);
  CHECK(tie(0, 0) == 1.0);
}

TEST_CASE("soft assignment approaches uniform at infinite temperature") {
  RngStream gen(14);
  Matrix points(6, 3), centroids(4, 3);
  gen.fill_normal(points);
  gen.fill_normal(centroids);
  const Matrix probs = assign_probs(points, centroids, AssignMode::kSoft, 1e9);
  CHECK((probs.array() - 0.25).abs().maxCoeff() < 1e-6);
}

TEST_CASE("soft assignment with a wide gap is effectively one-hot") {
  Matrix points(2, 1), centroids(2, 1);
  points << 0, 10;
  centroids << 0, 10;
  const Matrix probs = assign_probs(points, centroids, AssignMode::kSoft, 1.0);
  // distance gap of 100 in the exponent: exp(-100) mass on the far centroid
  CHECK(probs(0, 1) < 1e-20);
  CHECK(probs(1, 0) < 1e-20);
  CHECK(probs(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("assignment rows are probability vectors") {
  RngStream gen(15);
  Matrix points(10, 3), centroids(3, 3);
  gen.fill_normal(points);
  gen.fill_normal(centroids);
  for (AssignMode mode : {AssignMode::kHard, AssignMode::kSoft}) {
    const Matrix probs = assign_probs(points, centroids, mode, 0.7);
    CHECK(probs.minCoeff() >= 0.0);
    for (Index r = 0; r < probs.rows(); ++r) {
      CHECK(probs.row(r).sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("same-cluster probability covers the closed-form cases") {
  Matrix probs(3, 4);
  probs << 1, 0, 0, 0,  // one-hot cluster 0
      0, 1, 0, 0,       // one-hot cluster 1
      0.25, 0.25, 0.25, 0.25;
  const std::vector<int> all = {0, 1, 2};
  const Matrix p = same_cluster_prob(probs, all, all);

  CHECK(p(0, 0) == 1.0);             // identical one-hots
  CHECK(p(0, 1) == 0.0);             // orthogonal one-hots
  CHECK(p(2, 2) == doctest::Approx(0.25));  // uniform rows over K=4 -> 1/K

  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) {
      CHECK(p(a, b) == doctest::Approx(p(b, a)));
      CHECK(p(a, b) >= 0.0);
      CHECK(p(a, b) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("cluster model fits both sides and keeps valid assignments") {
  const Matrix users = two_blobs(10, 16);
  const Matrix items = two_blobs(8, 17);
  RngStream rng(18);
  const ClusterModel model =
      fit_cluster_model(users, items, 2, 2, AssignMode::kHard, 1.0, rng);
  CHECK(model.assign_users.rows() == 20);
  CHECK(model.assign_items.rows() == 16);
  for (Index r = 0; r < model.assign_users.rows(); ++r) {
    CHECK(model.assign_users.row(r).sum() == doctest::Approx(1.0));
  }
}

}  // TEST_SUITE
