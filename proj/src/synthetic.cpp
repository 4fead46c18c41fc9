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
#include "vgcl/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "vgcl/rng.hpp"

namespace vgcl {

InteractionTable make_two_block_dataset(std::uint64_t seed, int users_per_block,
                                        int items_per_block, double within_density,
                                        double cross_density) {
  RngStream rng(RngStream::derive_seed(seed, "two_block"));
  InteractionTable table;
  table.user_count = 2 * users_per_block;
  table.item_count = 2 * items_per_block;

  std::set<std::pair<int, int>> pairs;
  for (int u = 0; u < table.user_count; ++u) {
    const int user_block = u / users_per_block;
    for (int i = 0; i < table.item_count; ++i) {
      const int item_block = i / items_per_block;
      const double p = (user_block == item_block) ? within_density : cross_density;
      if (rng.uniform() < p) pairs.emplace(u, i);
    }
  }
  for (int u = 0; u < table.user_count; ++u) {  // no empty users
    const int fallback = (u / users_per_block) * items_per_block + (u % items_per_block);
    pairs.emplace(u, fallback);
  }
  table.pairs.assign(pairs.begin(), pairs.end());
  return table;
}

InteractionTable make_skewed_dataset(const SkewedSpec& spec, std::uint64_t seed) {
  RngStream rng(RngStream::derive_seed(seed, "skewed"));
  InteractionTable table;
  table.user_count = spec.users;
  table.item_count = spec.items;

  // Assign each node a latent group; shuffle activity ranks so degree does
  // not correlate with the raw index.
  std::vector<int> user_rank(spec.users);
  for (int u = 0; u < spec.users; ++u) user_rank[u] = u;
  for (int u = spec.users - 1; u > 0; --u) {
    std::swap(user_rank[u], user_rank[rng.next(u + 1)]);
  }

  std::vector<std::vector<int>> group_items(spec.latent_groups);
  for (int i = 0; i < spec.items; ++i) group_items[i % spec.latent_groups].push_back(i);

  // In-group sampling weights: popularity skew over position.
  std::vector<std::vector<double>> group_weights(spec.latent_groups);
  for (int g = 0; g < spec.latent_groups; ++g) {
    double acc = 0.0;
    group_weights[g].reserve(group_items[g].size());
    for (std::size_t j = 0; j < group_items[g].size(); ++j) {
      acc += std::pow(static_cast<double>(j + 1), -spec.popularity_exponent);
      group_weights[g].push_back(acc);
    }
  }

  auto draw_from_group = [&](int g) {
    const auto& cdf = group_weights[g];
    const double target = rng.uniform() * cdf.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    return group_items[g][static_cast<std::size_t>(it - cdf.begin())];
  };

  std::set<std::pair<int, int>> pairs;
  for (int u = 0; u < spec.users; ++u) {
    const int group = u % spec.latent_groups;
    const double raw = spec.max_degree *
                       std::pow(static_cast<double>(user_rank[u] + 1),
                                -spec.degree_exponent);
    const int degree = std::clamp(static_cast<int>(std::lround(raw)), spec.min_degree,
                                  std::min(spec.max_degree, spec.items - 1));
    int added = 0;
    int attempts = 0;
    const int max_attempts = degree * 50;
    while (added < degree && attempts < max_attempts) {
      ++attempts;
      int item;
      if (rng.uniform() < spec.within_group_prob) {
        item = draw_from_group(group);
      } else {
        item = static_cast<int>(rng.next(spec.items));
      }
      if (pairs.emplace(u, item).second) ++added;
    }
    if (added == 0) pairs.emplace(u, group_items[group].front());
  }
  table.pairs.assign(pairs.begin(), pairs.end());
  return table;
}

}  // namespace vgcl
