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

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

#include "vgcl/core.hpp"

namespace vgcl {

// All randomness flows from a single root seed. Each consumer (splitting,
// initialization, triple sampling, reparameterization, clustering) draws from
// its own named substream, so turning one consumer on or off never shifts the
// draws seen by another. The generator is xoshiro256++ seeded through
// splitmix64: training samples three full noise matrices per batch, so draw
// cost matters.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  static std::uint64_t derive_seed(std::uint64_t root, std::string_view name) {
    // FNV-1a over the name, then a splitmix64 finishing mix with the root.
    std::uint64_t h = 1469598103934665603ull;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    std::uint64_t x = root + 0x9e3779b97f4a7c15ull + h;
    return splitmix64(x);
  }

  static RngStream substream(std::uint64_t root, std::string_view name) {
    return RngStream(derive_seed(root, name));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal; polar method, second variate cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

  // Uniform integer in [0, bound). Rejection on the top range keeps it unbiased.
  std::uint64_t next(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  // Fills a matrix with standard normals. Marsaglia's polar method with the
  // transcendental step batched over accepted pairs, so the per-sample cost
  // stays near the raw engine cost.
  void fill_normal(Matrix& out) {
    double* p = out.data();
    const Index n = out.size();
    constexpr Index kChunk = 512;  // accepted pairs per vectorized block
    Eigen::ArrayXd us(kChunk), vs(kChunk), ss(kChunk);

    Index produced = 0;
    while (produced < n) {
      const Index pairs = std::min<Index>(kChunk, (n - produced + 1) / 2);
      for (Index k = 0; k < pairs;) {
        const double u = 2.0 * uniform() - 1.0;
        const double v = 2.0 * uniform() - 1.0;
        const double s = u * u + v * v;
        if (s >= 1.0 || s == 0.0) continue;
        us(k) = u;
        vs(k) = v;
        ss(k) = s;
        ++k;
      }
      ss.head(pairs) = (-2.0 * ss.head(pairs).log() / ss.head(pairs)).sqrt();
      for (Index k = 0; k < pairs; ++k) {
        p[produced++] = us(k) * ss(k);
        if (produced < n) p[produced++] = vs(k) * ss(k);
      }
    }
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace vgcl
