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

#include <utility>
#include <vector>

#include "vgcl/core.hpp"
#include "vgcl/dataset.hpp"
#include "vgcl/rng.hpp"

namespace vgcl {

// Trainable state: node embeddings plus the one-layer variance head.
struct ModelParams {
  Matrix embeddings;       // (M+N) x d
  Matrix variance_weight;  // d x d
  RowVector variance_bias; // 1 x d
};

// Gradient container matching ModelParams shapes. Accumulated additively.
struct ParamGrads {
  Matrix d_embeddings;
  Matrix d_variance_weight;
  RowVector d_variance_bias;

  static ParamGrads zeros_like(const ModelParams& p);
  void accumulate(double weight, const ParamGrads& other);
  bool all_finite() const;
};

ModelParams init_params(Index node_count, int dim, double init_std, RngStream& rng);

struct EncoderConfig {
  int layers = 2;
  bool include_layer0 = false;  // readout averages layers 1..L unless set
  double exp_clamp = 30.0;      // variance head pre-activation clamp
};

// Per-node Gaussian posterior parameters plus everything the backward pass
// needs: the layer stack of propagated means and the pre-clamp activation.
struct GaussianParams {
  Matrix mu;     // fused mean readout
  Matrix sigma;  // exp(clamp(mu W + b)), strictly positive
  std::vector<Matrix> layer_means;  // mu^0 .. mu^L
  Matrix pre_activation;            // mu W + b, before clamping
  std::int64_t clamp_events = 0;
};

// Mean propagation through L symmetric-normalized convolutions, readout over
// layers 1..L, then the one-layer variance head. Deterministic variants skip
// the variance head by passing with_variance=false; sigma stays empty then.
GaussianParams infer(const NormalizedAdjacency& adj, const ModelParams& params,
                     const EncoderConfig& cfg, bool with_variance = true);

// Pulls a readout-level gradient back through the propagation chain to the
// layer-0 embeddings.
Matrix propagate_backward(const NormalizedAdjacency& adj, const Matrix& d_readout,
                          const EncoderConfig& cfg);

// Full encoder backward: gradients w.r.t. mu and sigma in, parameter
// gradients out. An empty d_sigma selects the pure mean chain.
ParamGrads infer_backward(const NormalizedAdjacency& adj, const ModelParams& params,
                          const GaussianParams& g, const Matrix& d_mu,
                          const Matrix& d_sigma, const EncoderConfig& cfg);

struct GaussianSample {
  Matrix z;      // mu + sigma .* noise
  Matrix noise;  // retained for the backward pass
};

GaussianSample reparameterize(const GaussianParams& g, RngStream& rng);

// Two independent reparameterized draws sharing (mu, sigma).
std::pair<GaussianSample, GaussianSample> sample_views(const GaussianParams& g,
                                                       RngStream& rng);

// All-pairs propensity logits <z_a, z_i>. Ranking is monotone in the logit;
// the sigmoid only matters inside losses.
Matrix score_matrix(const Matrix& z_users, const Matrix& z_items);

// One augmentation step: each row is shifted by a uniform random direction of
// L2 length eps_amplitude, sign-aligned with the row. Every per-entry
// perturbation is bounded by eps_amplitude.
Matrix perturb_rows(const Matrix& rows, double eps_amplitude, RngStream& rng);

// Contrastive views from noise-perturbed propagation: every layer embedding,
// input included, goes through perturb_rows. Two independent passes.
std::pair<Matrix, Matrix> feature_augment_views(const NormalizedAdjacency& adj,
                                                const ModelParams& params,
                                                const EncoderConfig& cfg,
                                                double eps_amplitude, RngStream& rng);

// Backward of one augmented pass; the injected noise is constant w.r.t. the
// embeddings, so the chain matches the mean path.
inline Matrix feature_augment_backward(const NormalizedAdjacency& adj,
                                       const Matrix& d_view, const EncoderConfig& cfg) {
  return propagate_backward(adj, d_view, cfg);
}

}  // namespace vgcl
