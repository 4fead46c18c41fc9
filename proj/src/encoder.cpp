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
#include "vgcl/encoder.hpp"

#include <cmath>
#include <string>

#include "vgcl/linalg.hpp"

namespace vgcl {

ParamGrads ParamGrads::zeros_like(const ModelParams& p) {
  ParamGrads g;
  g.d_embeddings = Matrix::Zero(p.embeddings.rows(), p.embeddings.cols());
  g.d_variance_weight = Matrix::Zero(p.variance_weight.rows(), p.variance_weight.cols());
  g.d_variance_bias = RowVector::Zero(p.variance_bias.cols());
  return g;
}

void ParamGrads::accumulate(double weight, const ParamGrads& other) {
  if (other.d_embeddings.size() > 0) d_embeddings += weight * other.d_embeddings;
  if (other.d_variance_weight.size() > 0) d_variance_weight += weight * other.d_variance_weight;
  if (other.d_variance_bias.size() > 0) d_variance_bias += weight * other.d_variance_bias;
}

bool ParamGrads::all_finite() const {
  return d_embeddings.allFinite() && d_variance_weight.allFinite() &&
         d_variance_bias.allFinite();
}

ModelParams init_params(Index node_count, int dim, double init_std, RngStream& rng) {
  ModelParams p;
  p.embeddings.resize(node_count, dim);
  rng.fill_normal(p.embeddings);
  p.embeddings *= init_std;
  p.variance_weight.resize(dim, dim);
  rng.fill_normal(p.variance_weight);
  p.variance_weight *= init_std;
  Matrix b(1, dim);
  rng.fill_normal(b);
  p.variance_bias = b.row(0) * init_std;
  return p;
}

GaussianParams infer(const NormalizedAdjacency& adj, const ModelParams& params,
                     const EncoderConfig& cfg, bool with_variance) {
  if (cfg.layers < 1) throw ConfigError("infer: layers must be >= 1");
  if (params.embeddings.rows() != adj.node_count) {
    throw ShapeError("infer: embeddings rows do not match graph nodes");
  }

  GaussianParams g;
  g.layer_means.reserve(cfg.layers + 1);
  g.layer_means.push_back(params.embeddings);
  for (int l = 1; l <= cfg.layers; ++l) {
    g.layer_means.push_back(spmm(adj, g.layer_means.back()));
    if (!g.layer_means.back().allFinite()) {
      throw FiniteError("infer: non-finite means at layer " + std::to_string(l));
    }
  }

  const int first = cfg.include_layer0 ? 0 : 1;
  const double coeff = 1.0 / static_cast<double>(cfg.layers + 1 - first);
  g.mu = Matrix::Zero(params.embeddings.rows(), params.embeddings.cols());
  for (int l = first; l <= cfg.layers; ++l) g.mu += g.layer_means[l];
  g.mu *= coeff;

  if (with_variance) {
    g.pre_activation = g.mu * params.variance_weight;
    g.pre_activation.rowwise() += params.variance_bias;
    g.clamp_events = (g.pre_activation.array().abs() > cfg.exp_clamp).count();
    g.sigma = g.pre_activation.array()
                  .min(cfg.exp_clamp)
                  .max(-cfg.exp_clamp)
                  .exp()
                  .matrix();
  }
  return g;
}

Matrix propagate_backward(const NormalizedAdjacency& adj, const Matrix& d_readout,
                          const EncoderConfig& cfg) {
  const int first = cfg.include_layer0 ? 0 : 1;
  const double coeff = 1.0 / static_cast<double>(cfg.layers + 1 - first);
  Matrix g = Matrix::Zero(d_readout.rows(), d_readout.cols());
  for (int l = cfg.layers; l >= 1; --l) {
    g += coeff * d_readout;
    g = spmm(adj, g);  // adjacency is symmetric, so transpose equals itself
  }
  if (cfg.include_layer0) g += coeff * d_readout;
  return g;
}

ParamGrads infer_backward(const NormalizedAdjacency& adj, const ModelParams& params,
                          const GaussianParams& g, const Matrix& d_mu,
                          const Matrix& d_sigma, const EncoderConfig& cfg) {
  ParamGrads grads;
  if (d_sigma.size() == 0) {  // pure mean chain
    grads.d_variance_weight = Matrix::Zero(params.variance_weight.rows(),
                                           params.variance_weight.cols());
    grads.d_variance_bias = RowVector::Zero(params.variance_bias.cols());
    grads.d_embeddings = propagate_backward(adj, d_mu, cfg);
    return grads;
  }

  // sigma = exp(clamp(pre)): clamped entries carry zero gradient.
  Matrix d_pre = d_sigma.cwiseProduct(g.sigma);
  d_pre = (g.pre_activation.array().abs() <= cfg.exp_clamp)
              .select(d_pre.array(), 0.0)
              .matrix();

  grads.d_variance_weight = g.mu.transpose() * d_pre;
  grads.d_variance_bias = d_pre.colwise().sum();
  const Matrix d_mu_total = d_mu + d_pre * params.variance_weight.transpose();
  grads.d_embeddings = propagate_backward(adj, d_mu_total, cfg);
  return grads;
}

GaussianSample reparameterize(const GaussianParams& g, RngStream& rng) {
  if (g.sigma.rows() != g.mu.rows() || g.sigma.cols() != g.mu.cols()) {
    throw ShapeError("reparameterize: sigma missing or mismatched");
  }
  GaussianSample s;
  s.noise.resize(g.mu.rows(), g.mu.cols());
  rng.fill_normal(s.noise);
  s.z = g.mu + g.sigma.cwiseProduct(s.noise);
  return s;
}

std::pair<GaussianSample, GaussianSample> sample_views(const GaussianParams& g,
                                                       RngStream& rng) {
  GaussianSample first = reparameterize(g, rng);
  GaussianSample second = reparameterize(g, rng);
  return {std::move(first), std::move(second)};
}

Matrix score_matrix(const Matrix& z_users, const Matrix& z_items) {
  if (z_users.cols() != z_items.cols()) {
    throw ShapeError("score_matrix: embedding widths differ");
  }
  return z_users * z_items.transpose();
}

Matrix perturb_rows(const Matrix& rows, double eps_amplitude, RngStream& rng) {
  if (eps_amplitude < 0.0) throw ConfigError("eps_amplitude must be >= 0");
  Matrix out = rows;
  if (eps_amplitude == 0.0) return out;
  const Index d = rows.cols();
  RowVector r(d);
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index j = 0; j < d; ++j) r(j) = rng.uniform();
    const double norm = r.norm();
    if (norm <= 0.0) continue;
    for (Index j = 0; j < d; ++j) {
      const double s = rows(i, j) > 0.0 ? 1.0 : (rows(i, j) < 0.0 ? -1.0 : 0.0);
      out(i, j) += eps_amplitude * (r(j) / norm) * s;
    }
  }
  return out;
}

namespace {

Matrix augmented_pass(const NormalizedAdjacency& adj, const ModelParams& params,
                      const EncoderConfig& cfg, double eps, RngStream& rng) {
  Matrix e = perturb_rows(params.embeddings, eps, rng);

  const int first = cfg.include_layer0 ? 0 : 1;
  const double coeff = 1.0 / static_cast<double>(cfg.layers + 1 - first);
  Matrix acc = cfg.include_layer0 ? Matrix(e) : Matrix(Matrix::Zero(e.rows(), e.cols()));
  for (int l = 1; l <= cfg.layers; ++l) {
    e = perturb_rows(spmm(adj, e), eps, rng);
    acc += e;
  }
  return acc * coeff;
}

}  // namespace

std::pair<Matrix, Matrix> feature_augment_views(const NormalizedAdjacency& adj,
                                                const ModelParams& params,
                                                const EncoderConfig& cfg,
                                                double eps_amplitude, RngStream& rng) {
  if (eps_amplitude < 0.0) throw ConfigError("eps_amplitude must be >= 0");
  Matrix v1 = augmented_pass(adj, params, cfg, eps_amplitude, rng);
  Matrix v2 = augmented_pass(adj, params, cfg, eps_amplitude, rng);
  return {std::move(v1), std::move(v2)};
}

}  // namespace vgcl
