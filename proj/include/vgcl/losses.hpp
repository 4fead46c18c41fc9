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
#include <utility>

#include "vgcl/core.hpp"
#include "vgcl/dataset.hpp"
#include "vgcl/encoder.hpp"

namespace vgcl {

struct LossConfig {
  double alpha = 0.2;      // contrastive task weight
  double gamma = 0.4;      // cluster-level weight inside the contrastive task
  double lambda = 1e-4;    // L2 regularization on the embeddings
  double tau1 = 0.2;       // node-level temperature
  double tau2 = 0.15;      // cluster-level temperature
  double kl_weight = 1.0;  // weight on the KL term
  bool mean_reduction = false;  // sums by default; means behind this flag
};

struct BprLoss {
  double value = 0.0;
  Matrix d_z;  // same shape as z, nonzero only on rows touched by triples
};

// Pairwise ranking reconstruction: sum of -log sigmoid(<z_a, z_i> - <z_a, z_j>)
// over triples, computed in softplus form. Item rows sit at user_count + item.
BprLoss bpr_reconstruction(const Matrix& z, std::span<const TrainingTriple> triples,
                           int user_count, bool mean_reduction = false);

struct KlLoss {
  double value = 0.0;
  Matrix d_mu;
  Matrix d_sigma;
};

// KL(N(mu, sigma^2) || N(0, I)) summed over nodes and dimensions:
// 0.5 (sigma^2 + mu^2 - 1 - 2 ln sigma) per entry.
KlLoss kl_regularizer(const Matrix& mu, const Matrix& sigma,
                      bool mean_reduction = false);

struct ContrastiveLoss {
  double value = 0.0;
  Matrix d_view1;  // gradients w.r.t. the raw (pre-normalization) views
  Matrix d_view2;
  long skipped = 0;  // anchors dropped for lack of in-batch same-cluster mass
};

// In-batch InfoNCE over row-aligned views. Rows are L2-normalized internally
// and gradients flow back through the normalization. The positive pair is a
// member of the denominator, so the value is never negative.
ContrastiveLoss node_infonce(const Matrix& view1, const Matrix& view2, double tau,
                             bool mean_reduction = false);

// Prototype-weighted contrast: each anchor pulls toward in-batch rows sharing
// its cluster, normalized by SP(a) = sum of same-cluster probabilities.
// Anchors with SP(a) < 1e-12 contribute zero and are counted in `skipped`.
ContrastiveLoss cluster_contrastive(const Matrix& view1, const Matrix& view2,
                                    const Matrix& p_same, double tau,
                                    bool mean_reduction = false);

struct Objective {
  double value = 0.0;
  ParamGrads grads;
};

// value = |E0|^2 with gradient 2 E0; the caller applies the lambda weight.
Objective l2_regularizer(const ModelParams& params);

// Weighted sum of component objectives; gradients accumulate additively.
Objective total_objective(std::span<const std::pair<double, const Objective*>> parts,
                          const ModelParams& shapes);

}  // namespace vgcl
