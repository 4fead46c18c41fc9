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

#include <vector>

#include "vgcl/core.hpp"
#include "vgcl/dataset.hpp"

namespace vgcl {

struct GroupRow {
  int group = 0;
  int user_count = 0;        // users bucketed into this group
  int evaluated_users = 0;   // of those, users with test items
  double ndcg = 0.0;         // NDCG@20 over evaluated users
  double mean_sigma = 0.0;   // mean over the group of |sigma_row| / sqrt(d)
  double mean_degree = 0.0;
};

struct MetricsReport {
  std::vector<int> cutoffs;
  std::vector<double> recall;  // aligned with cutoffs
  std::vector<double> ndcg;
  int evaluated_users = 0;
  std::vector<GroupRow> groups;  // filled only by group analysis
};

struct UserMetrics {
  int user = 0;
  std::vector<double> recall;
  std::vector<double> ndcg;
};

// Full ranking for one test user at a time: every item is a candidate, the
// user's train items are masked to -inf, ties break toward the lower item
// index. Recall@N = hits / |test items|; NDCG@N uses the ideal DCG over
// min(N, |test items|). Users without test items are skipped.
MetricsReport evaluate(const Matrix& user_embeddings, const Matrix& item_embeddings,
                       const InteractionTable& train_mask, const InteractionTable& test,
                       const std::vector<int>& cutoffs);

// Per-user values behind the averages, for oracle comparison and grouping.
std::vector<UserMetrics> evaluate_per_user(const Matrix& user_embeddings,
                                           const Matrix& item_embeddings,
                                           const InteractionTable& train_mask,
                                           const InteractionTable& test,
                                           const std::vector<int>& cutoffs);

// Equal-count quantile buckets over train-interaction counts. Bucketing is
// stable in user order; group g spans users [g*M/n, (g+1)*M/n).
std::vector<std::vector<int>> degree_quantile_groups(const std::vector<int>& degrees,
                                                     int n_groups);

// Per-degree-group NDCG@20 and mean per-user sigma scale.
std::vector<GroupRow> group_analysis(const Matrix& user_embeddings,
                                     const Matrix& item_embeddings,
                                     const Matrix& user_sigma,
                                     const InteractionTable& train,
                                     const InteractionTable& test, int n_groups);

// Spearman rank correlation; ties get average ranks.
double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace vgcl
