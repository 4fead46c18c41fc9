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
#include "vgcl/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace vgcl {

namespace {

std::vector<std::unordered_set<int>> item_sets(const InteractionTable& table,
                                               int user_count) {
  std::vector<std::unordered_set<int>> sets(user_count);
  for (const auto& [u, i] : table.pairs) sets[u].insert(i);
  return sets;
}

}  // namespace

std::vector<UserMetrics> evaluate_per_user(const Matrix& user_embeddings,
                                           const Matrix& item_embeddings,
                                           const InteractionTable& train_mask,
                                           const InteractionTable& test,
                                           const std::vector<int>& cutoffs) {
  if (user_embeddings.cols() != item_embeddings.cols()) {
    throw ShapeError("evaluate: embedding widths differ");
  }
  const int n_users = static_cast<int>(user_embeddings.rows());
  const int n_items = static_cast<int>(item_embeddings.rows());
  const auto train_sets = item_sets(train_mask, n_users);
  const auto test_sets = item_sets(test, n_users);
  const int max_cutoff = *std::max_element(cutoffs.begin(), cutoffs.end());

  std::vector<UserMetrics> out;
  std::vector<int> order;
  order.reserve(n_items);
  for (int user = 0; user < n_users; ++user) {
    const auto& relevant = test_sets[user];
    if (relevant.empty()) continue;

    const Vector scores = item_embeddings * user_embeddings.row(user).transpose();

    // Candidates are all non-interacted items; train items never rank.
    order.clear();
    for (int item = 0; item < n_items; ++item) {
      if (train_sets[user].count(item) == 0) order.push_back(item);
    }
    const int candidates = static_cast<int>(order.size());
    const int top = std::min(max_cutoff, candidates);
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&scores](int lhs, int rhs) {
                        if (scores(lhs) != scores(rhs)) return scores(lhs) > scores(rhs);
                        return lhs < rhs;  // deterministic tie-break
                      });

    UserMetrics m;
    m.user = user;
    for (int cutoff : cutoffs) {
      const int depth = std::min(cutoff, candidates);
      int hits = 0;
      double dcg = 0.0;
      for (int pos = 0; pos < depth; ++pos) {
        if (relevant.count(order[pos]) != 0) {
          ++hits;
          dcg += 1.0 / std::log2(pos + 2.0);
        }
      }
      double ideal = 0.0;
      const int ideal_depth = std::min<int>(depth, relevant.size());
      for (int pos = 0; pos < ideal_depth; ++pos) ideal += 1.0 / std::log2(pos + 2.0);

      m.recall.push_back(static_cast<double>(hits) / static_cast<double>(relevant.size()));
      m.ndcg.push_back(ideal > 0.0 ? dcg / ideal : 0.0);
    }
    out.push_back(std::move(m));
  }
  return out;
}

MetricsReport evaluate(const Matrix& user_embeddings, const Matrix& item_embeddings,
                       const InteractionTable& train_mask, const InteractionTable& test,
                       const std::vector<int>& cutoffs) {
  if (test.pairs.empty()) throw EmptyEvaluationError("test set is empty");
  const auto per_user =
      evaluate_per_user(user_embeddings, item_embeddings, train_mask, test, cutoffs);
  if (per_user.empty()) throw EmptyEvaluationError("no evaluable test users");

  MetricsReport report;
  report.cutoffs = cutoffs;
  report.recall.assign(cutoffs.size(), 0.0);
  report.ndcg.assign(cutoffs.size(), 0.0);
  report.evaluated_users = static_cast<int>(per_user.size());
  for (const auto& m : per_user) {
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      report.recall[c] += m.recall[c];
      report.ndcg[c] += m.ndcg[c];
    }
  }
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    report.recall[c] /= report.evaluated_users;
    report.ndcg[c] /= report.evaluated_users;
  }
  return report;
}

std::vector<std::vector<int>> degree_quantile_groups(const std::vector<int>& degrees,
                                                     int n_groups) {
  const int n = static_cast<int>(degrees.size());
  if (n_groups < 2) throw ConfigError("group analysis needs n_groups >= 2");
  if (n < n_groups) throw ConfigError("fewer users than groups");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&degrees](int a, int b) {
    return degrees[a] < degrees[b];  // stable: equal degrees keep user order
  });

  std::vector<std::vector<int>> groups(n_groups);
  for (int g = 0; g < n_groups; ++g) {
    const int lo = static_cast<int>(static_cast<long>(g) * n / n_groups);
    const int hi = static_cast<int>(static_cast<long>(g + 1) * n / n_groups);
    groups[g].assign(order.begin() + lo, order.begin() + hi);
  }
  return groups;
}

std::vector<GroupRow> group_analysis(const Matrix& user_embeddings,
                                     const Matrix& item_embeddings,
                                     const Matrix& user_sigma,
                                     const InteractionTable& train,
                                     const InteractionTable& test, int n_groups) {
  const auto degrees = train.user_degrees();
  const auto groups = degree_quantile_groups(degrees, n_groups);

  const std::vector<int> cutoffs = {20};
  const auto per_user =
      evaluate_per_user(user_embeddings, item_embeddings, train, test, cutoffs);
  std::vector<double> user_ndcg(user_embeddings.rows(),
                                std::numeric_limits<double>::quiet_NaN());
  for (const auto& m : per_user) user_ndcg[m.user] = m.ndcg[0];

  const double sigma_scale = 1.0 / std::sqrt(static_cast<double>(user_sigma.cols()));
  std::vector<GroupRow> rows;
  for (int g = 0; g < n_groups; ++g) {
    GroupRow row;
    row.group = g;
    row.user_count = static_cast<int>(groups[g].size());
    double ndcg_sum = 0.0, sigma_sum = 0.0, degree_sum = 0.0;
    for (int user : groups[g]) {
      sigma_sum += user_sigma.row(user).norm() * sigma_scale;
      degree_sum += degrees[user];
      if (!std::isnan(user_ndcg[user])) {
        ndcg_sum += user_ndcg[user];
        ++row.evaluated_users;
      }
    }
    row.mean_sigma = row.user_count > 0 ? sigma_sum / row.user_count : 0.0;
    row.mean_degree = row.user_count > 0 ? degree_sum / row.user_count : 0.0;
    row.ndcg = row.evaluated_users > 0 ? ndcg_sum / row.evaluated_users : 0.0;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&values](int a, int b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * (i + j) + 1.0;
    for (int k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw ConfigError("spearman_correlation: need two equally sized series");
  }
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va <= 0.0 || vb <= 0.0) return 0.0;  // a constant series has no ranking trend
  return cov / std::sqrt(va * vb);
}

}  // namespace vgcl
