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

#include "vgcl/dataset.hpp"

namespace vgcl {

// Two 10x10 user-item blocks: dense within a block, near-empty across.
// Every user keeps at least one interaction.
InteractionTable make_two_block_dataset(std::uint64_t seed, int users_per_block = 10,
                                        int items_per_block = 10,
                                        double within_density = 0.6,
                                        double cross_density = 0.02);

struct SkewedSpec {
  int users = 500;
  int items = 300;
  int latent_groups = 5;
  double within_group_prob = 0.8;   // item drawn from the user's own group
  double degree_exponent = 0.75;    // user activity follows rank^-exponent
  int min_degree = 3;
  int max_degree = 80;
  double popularity_exponent = 0.5; // in-group item popularity skew
};

// Long-tail bipartite interactions with latent block structure: user degrees
// follow a power law over a shuffled rank, items are drawn mostly from the
// user's latent group with popularity-skewed weights.
InteractionTable make_skewed_dataset(const SkewedSpec& spec, std::uint64_t seed);

}  // namespace vgcl
