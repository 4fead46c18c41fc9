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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "vgcl/core.hpp"
#include "vgcl/rng.hpp"

namespace vgcl {

// Observed user-item pairs with densely packed indices: users in [0, user_count),
// items in [0, item_count). No duplicate pairs.
struct InteractionTable {
  std::vector<std::pair<int, int>> pairs;
  int user_count = 0;
  int item_count = 0;

  // Per-user item lists (the interacted set of each user).
  std::vector<std::vector<int>> items_by_user() const;
  std::vector<int> user_degrees() const;
};

struct SplitDataset {
  InteractionTable train;
  InteractionTable test;
  int user_count = 0;
  int item_count = 0;
};

// Symmetric-normalized bipartite adjacency in compressed sparse rows.
// Users occupy node indices [0, user_count), items [user_count, node_count).
// Column indices are sorted within each row; per-row accumulation in spmm
// walks them left to right, so results are reproducible bit for bit.
struct NormalizedAdjacency {
  Index node_count = 0;
  int user_count = 0;
  int item_count = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<int> col_index;
  std::vector<double> value;
  std::vector<int> degree;
};

struct TrainingTriple {
  int user;
  int pos_item;
  int neg_item;
};

// Reads "user item [rating]" lines; '#' starts a comment line. Tokens are
// re-indexed densely in first-appearance order and duplicate pairs collapse.
// When rating_threshold is set, only rows with rating >= threshold are kept
// (rows must then carry a rating column).
InteractionTable load_interactions(std::istream& in,
                                   std::optional<double> rating_threshold = std::nullopt);
InteractionTable load_interactions_file(const std::string& path,
                                        std::optional<double> rating_threshold = std::nullopt);

// Reads a prepared split file: integer indices taken literally, no
// re-indexing, so companion files keep a shared index space.
InteractionTable load_indexed_interactions(const std::string& path);

// Loads prepared train/test files into one index space (counts are unified
// to the maximum index seen across both).
SplitDataset load_split(const std::string& train_path, const std::string& test_path);

// Drops users with fewer than min_count pairs, then items left with none.
// Surviving users/items are re-densified in ascending old-index order.
InteractionTable filter_min_interactions(const InteractionTable& table, int min_count);

// Uniform global holdout split. |test| = round(test_ratio * |pairs|),
// deterministic for a fixed seed. Users may end up train-cold.
SplitDataset split_holdout(const InteractionTable& table, double test_ratio,
                           std::uint64_t seed);

NormalizedAdjacency build_graph(const InteractionTable& train);

// Pairwise triple sampler: positives uniform over train pairs, negatives
// uniform over the user's non-interacted items by rejection against a
// per-user hash set. Immutable after construction; callers supply streams.
class TripleSampler {
 public:
  explicit TripleSampler(const InteractionTable& train);

  std::vector<TrainingTriple> sample(int batch_size, RngStream& rng) const;

  const InteractionTable& train() const { return *train_; }

 private:
  const InteractionTable* train_;
  std::vector<std::unordered_set<int>> positives_;
};

void save_interactions(const std::string& path, const InteractionTable& table);

void save_split_manifest(const std::string& path, const SplitDataset& split,
                         std::uint64_t seed, double test_ratio);

}  // namespace vgcl
