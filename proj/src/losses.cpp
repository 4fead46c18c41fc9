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
#include "vgcl/losses.hpp"

#include <cmath>

#include "vgcl/linalg.hpp"

namespace vgcl {

namespace {

double softplus_neg(double x) {  // log(1 + exp(-x)), stable both ways
  return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid_neg(double x) {  // 1 / (1 + exp(x))
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

constexpr double kSameClusterFloor = 1e-12;

}  // namespace

BprLoss bpr_reconstruction(const Matrix& z, std::span<const TrainingTriple> triples,
                           int user_count, bool mean_reduction) {
  if (triples.empty()) throw ConfigError("bpr_reconstruction: empty triple batch");

  BprLoss loss;
  loss.d_z = Matrix::Zero(z.rows(), z.cols());
  for (const auto& t : triples) {
    const Index a = t.user;
    const Index i = user_count + t.pos_item;
    const Index j = user_count + t.neg_item;
    const double x = z.row(a).dot(z.row(i) - z.row(j));
    loss.value += softplus_neg(x);
    const double dx = -sigmoid_neg(x);  // d softplus(-x) / dx
    loss.d_z.row(a) += dx * (z.row(i) - z.row(j));
    loss.d_z.row(i) += dx * z.row(a);
    loss.d_z.row(j) -= dx * z.row(a);
  }
  if (mean_reduction) {
    const double inv = 1.0 / static_cast<double>(triples.size());
    loss.value *= inv;
    loss.d_z *= inv;
  }
  return loss;
}

KlLoss kl_regularizer(const Matrix& mu, const Matrix& sigma, bool mean_reduction) {
  if (mu.rows() != sigma.rows() || mu.cols() != sigma.cols()) {
    throw ShapeError("kl_regularizer: mu/sigma shape mismatch");
  }
  if (sigma.minCoeff() <= 0.0) {
    throw FiniteError("kl_regularizer: sigma must be strictly positive");
  }

  KlLoss loss;
  loss.value = 0.5 * (sigma.array().square() + mu.array().square() - 1.0 -
                      2.0 * sigma.array().log())
                         .sum();
  loss.d_mu = mu;
  loss.d_sigma = (sigma.array() - sigma.array().inverse()).matrix();
  if (mean_reduction) {
    const double inv = 1.0 / static_cast<double>(mu.rows());
    loss.value *= inv;
    loss.d_mu *= inv;
    loss.d_sigma *= inv;
  }
  return loss;
}

ContrastiveLoss node_infonce(const Matrix& view1, const Matrix& view2, double tau,
                             bool mean_reduction) {
  if (view1.rows() != view2.rows() || view1.cols() != view2.cols()) {
    throw ShapeError("node_infonce: view shape mismatch");
  }
  if (!(tau > 0.0)) throw ConfigError("node_infonce: tau must be > 0");

  const Index b = view1.rows();
  const RowNormalizeResult n1 = row_l2_normalize(view1);
  const RowNormalizeResult n2 = row_l2_normalize(view2);
  const Matrix sims = (n1.rows * n2.rows.transpose()) / tau;

  ContrastiveLoss loss;
  Matrix d_sims(b, b);
  for (Index a = 0; a < b; ++a) {
    const double m = sims.row(a).maxCoeff();
    const RowVector shifted = (sims.row(a).array() - m).exp();
    const double total = shifted.sum();
    loss.value += m + std::log(total) - sims(a, a);
    d_sims.row(a) = shifted / total;  // softmax
    d_sims(a, a) -= 1.0;
  }

  Matrix d_n1 = (d_sims * n2.rows) / tau;
  Matrix d_n2 = (d_sims.transpose() * n1.rows) / tau;
  loss.d_view1 = row_l2_normalize_backward(view1, d_n1);
  loss.d_view2 = row_l2_normalize_backward(view2, d_n2);
  if (mean_reduction) {
    const double inv = 1.0 / static_cast<double>(b);
    loss.value *= inv;
    loss.d_view1 *= inv;
    loss.d_view2 *= inv;
  }
  return loss;
}

ContrastiveLoss cluster_contrastive(const Matrix& view1, const Matrix& view2,
                                    const Matrix& p_same, double tau,
                                    bool mean_reduction) {
  if (view1.rows() != view2.rows() || view1.cols() != view2.cols()) {
    throw ShapeError("cluster_contrastive: view shape mismatch");
  }
  const Index b = view1.rows();
  if (p_same.rows() != b || p_same.cols() != b) {
    throw ShapeError("cluster_contrastive: p_same must be batch x batch");
  }
  if (!(tau > 0.0)) throw ConfigError("cluster_contrastive: tau must be > 0");
  if (p_same.minCoeff() < -1e-9 || p_same.maxCoeff() > 1.0 + 1e-9) {
    throw ConfigError("cluster_contrastive: p_same entries must lie in [0, 1]");
  }
  if ((p_same - Matrix(p_same.transpose())).cwiseAbs().maxCoeff() > 1e-9) {
    throw ConfigError("cluster_contrastive: p_same must be symmetric");
  }

  const RowNormalizeResult n1 = row_l2_normalize(view1);
  const RowNormalizeResult n2 = row_l2_normalize(view2);
  const Matrix sims = (n1.rows * n2.rows.transpose()) / tau;

  ContrastiveLoss loss;
  loss.d_view1 = Matrix::Zero(b, view1.cols());
  loss.d_view2 = Matrix::Zero(b, view1.cols());
  Matrix d_sims = Matrix::Zero(b, b);

  for (Index a = 0; a < b; ++a) {
    double sp = 0.0;
    double m = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < b; ++j) {
      if (j == a) continue;
      sp += p_same(a, j);
      m = std::max(m, sims(a, j));
    }
    if (b < 2 || sp < kSameClusterFloor) {
      ++loss.skipped;
      continue;
    }

    double plain = 0.0, weighted = 0.0;
    for (Index j = 0; j < b; ++j) {
      if (j == a) continue;
      const double e = std::exp(sims(a, j) - m);
      plain += e;
      weighted += p_same(a, j) * e;
    }
    if (weighted <= 0.0) {  // same-cluster mass underflowed
      ++loss.skipped;
      continue;
    }

    loss.value += (std::log(plain) - std::log(weighted)) / sp;
    for (Index j = 0; j < b; ++j) {
      if (j == a) continue;
      const double e = std::exp(sims(a, j) - m);
      d_sims(a, j) = -(p_same(a, j) * e / weighted - e / plain) / sp;
    }
  }

  Matrix d_n1 = (d_sims * n2.rows) / tau;
  Matrix d_n2 = (d_sims.transpose() * n1.rows) / tau;
  loss.d_view1 = row_l2_normalize_backward(view1, d_n1);
  loss.d_view2 = row_l2_normalize_backward(view2, d_n2);
  if (mean_reduction && b > 0) {
    const double inv = 1.0 / static_cast<double>(b);
    loss.value *= inv;
    loss.d_view1 *= inv;
    loss.d_view2 *= inv;
  }
  return loss;
}

Objective l2_regularizer(const ModelParams& params) {
  Objective obj;
  obj.value = params.embeddings.squaredNorm();
  obj.grads = ParamGrads::zeros_like(params);
  obj.grads.d_embeddings = 2.0 * params.embeddings;
  return obj;
}

Objective total_objective(std::span<const std::pair<double, const Objective*>> parts,
                          const ModelParams& shapes) {
  Objective total;
  total.grads = ParamGrads::zeros_like(shapes);
  for (const auto& [weight, part] : parts) {
    total.value += weight * part->value;
    total.grads.accumulate(weight, part->grads);
  }
  return total;
}

}  // namespace vgcl
