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

// Brute-force reference implementations for the test and acceptance suites.
// These deliberately avoid the sparse kernels, the analytic gradients, and the
// partial-sort ranking path they are used to check.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "vgcl/core.hpp"
#include "vgcl/dataset.hpp"

namespace vgcl::oracle {

// Materializes D^{-1/2} A D^{-1/2} densely from first principles.
inline Matrix dense_normalized_adjacency(const InteractionTable& table) {
  const Index n = static_cast<Index>(table.user_count) + table.item_count;
  Matrix a = Matrix::Zero(n, n);
  for (const auto& [u, i] : table.pairs) {
    a(u, table.user_count + i) = 1.0;
    a(table.user_count + i, u) = 1.0;
  }
  Vector degree = a.rowwise().sum();
  Matrix normalized = Matrix::Zero(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      if (a(r, c) != 0.0) {
        normalized(r, c) = 1.0 / std::sqrt(degree(r) * degree(c));
      }
    }
  }
  return normalized;
}

// Mean readout over dense matrix powers: (1/L) sum_{l=1..L} A^l E0, or the
// layer-0-inclusive average.
inline Matrix dense_mean_readout(const Matrix& normalized, const Matrix& embeddings,
                                 int layers, bool include_layer0 = false) {
  Matrix acc = include_layer0 ? embeddings
                              : Matrix(Matrix::Zero(embeddings.rows(), embeddings.cols()));
  Matrix current = embeddings;
  for (int l = 1; l <= layers; ++l) {
    current = normalized * current;
    acc += current;
  }
  return acc / static_cast<double>(include_layer0 ? layers + 1 : layers);
}

struct RankedMetrics {
  double recall = 0.0;
  double ndcg = 0.0;
};

// Full-list ranking oracle: materializes and sorts every candidate score.
inline RankedMetrics brute_force_rank(const std::vector<double>& scores,
                                      const std::set<int>& train_items,
                                      const std::set<int>& test_items, int cutoff) {
  const int n = static_cast<int>(scores.size());
  std::vector<int> items;
  for (int i = 0; i < n; ++i) {
    if (train_items.count(i) == 0) items.push_back(i);
  }
  std::sort(items.begin(), items.end(), [&scores](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  RankedMetrics m;
  double dcg = 0.0;
  int hits = 0;
  const int depth = std::min<int>(cutoff, static_cast<int>(items.size()));
  for (int pos = 0; pos < depth; ++pos) {
    if (test_items.count(items[pos]) != 0) {
      ++hits;
      dcg += 1.0 / std::log2(pos + 2.0);
    }
  }
  double ideal = 0.0;
  const int ideal_depth = std::min<int>(cutoff, static_cast<int>(test_items.size()));
  for (int pos = 0; pos < ideal_depth; ++pos) ideal += 1.0 / std::log2(pos + 2.0);

  m.recall = static_cast<double>(hits) / static_cast<double>(test_items.size());
  m.ndcg = ideal > 0.0 ? dcg / ideal : 0.0;
  return m;
}

}  // namespace vgcl::oracle
