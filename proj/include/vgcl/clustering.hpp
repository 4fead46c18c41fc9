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
#pragma once

#include <span>
#include <string>
#include <vector>

#include "vgcl/core.hpp"
#include "vgcl/rng.hpp"

namespace vgcl {

enum class AssignMode { kHard, kSoft };

struct KMeansResult {
  Matrix centroids;          // K x d
  std::vector<int> labels;   // nearest centroid per point
  std::vector<double> objective_history;  // within-cluster sum of squares per iteration
  int iterations = 0;
};

// Lloyd's iterations from k-means++ seeding. Stops when the largest centroid
// shift drops below tol or max_iters is reached. Empty clusters are re-seeded
// from the point farthest from its assigned centroid. Deterministic for a
// fixed stream.
KMeansResult kmeans_fit(const Matrix& points, int k, RngStream& rng,
                        int max_iters = 100, double tol = 1e-6);

// Rows are probability vectors over centroids. Hard mode: one-hot at the
// nearest centroid, ties to the lowest index. Soft mode: softmax over
// -|x - c_k|^2 / temperature.
Matrix assign_probs(const Matrix& points, const Matrix& centroids, AssignMode mode,
                    double temperature = 1.0);

// p(a, b) = sum_k P[a,k] P[b,k] for every (a, b) in idx_a x idx_b.
Matrix same_cluster_prob(const Matrix& probs, std::span<const int> idx_a,
                         std::span<const int> idx_b);

// Prototypes for both node sides plus assignment probabilities.
struct ClusterModel {
  Matrix centroids_users;
  Matrix centroids_items;
  Matrix assign_users;  // M x K_u
  Matrix assign_items;  // N x K_i
  AssignMode mode = AssignMode::kHard;
  double temperature = 1.0;
};

ClusterModel fit_cluster_model(const Matrix& user_points, const Matrix& item_points,
                               int k_users, int k_items, AssignMode mode,
                               double temperature, RngStream& rng,
                               int max_iters = 100, double tol = 1e-6);

// Centroids plus a cluster-size histogram, one text file for inspection.
void write_cluster_summary(const std::string& path, const Matrix& centroids,
                           const std::vector<int>& labels);

}  // namespace vgcl
