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
#include "vgcl/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "vgcl/linalg.hpp"

namespace vgcl {

Variant parse_variant(const std::string& name) {
  if (name == "vgcl") return Variant::kVgcl;
  if (name == "vgcl_wo_c") return Variant::kVgclWoC;
  if (name == "vgcl_wo_v") return Variant::kVgclWoV;
  if (name == "lightgcn") return Variant::kLightGcn;
  throw ConfigError("unknown variant '" + name +
                    "' (expected vgcl|vgcl_wo_c|vgcl_wo_v|lightgcn)");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::kVgcl: return "vgcl";
    case Variant::kVgclWoC: return "vgcl_wo_c";
    case Variant::kVgclWoV: return "vgcl_wo_v";
    case Variant::kLightGcn: return "lightgcn";
  }
  return "?";
}

void TrainConfig::validate() const {
  std::vector<std::string> problems;
  auto require = [&problems](bool ok, const char* message) {
    if (!ok) problems.emplace_back(message);
  };

  require(dim >= 1, "d must be >= 1");
  require(layers >= 1, "layers must be >= 1");
  require(learning_rate > 0.0, "lr must be > 0");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(init_std > 0.0, "init_std must be > 0");
  require(eval_every >= 0, "eval_every must be >= 0");
  require(early_stop_patience >= 1, "early_stop_patience must be >= 1");
  require(loss.alpha >= 0.0, "alpha must be >= 0");
  require(loss.gamma >= 0.0, "gamma must be >= 0");
  require(loss.lambda >= 0.0, "lambda must be >= 0");
  require(loss.kl_weight >= 0.0, "kl_weight must be >= 0");
  require(loss.tau1 > 0.0, "tau1 must be > 0");
  require(loss.tau2 > 0.0, "tau2 must be > 0");
  require(eps_amplitude >= 0.0, "eps_amplitude must be >= 0");
  require(kmeans_max_iters >= 1, "kmeans_max_iters must be >= 1");
  require(kmeans_tol > 0.0, "kmeans_tol must be > 0");
  require(!eval_cutoffs.empty(), "eval_cutoffs must not be empty");
  for (int c : eval_cutoffs) require(c >= 1, "eval_cutoffs entries must be >= 1");

  if (variant == Variant::kLightGcn) {
    require(loss.alpha == 0.0, "variant=lightgcn conflicts with alpha > 0");
    require(loss.kl_weight == 0.0, "variant=lightgcn conflicts with kl_weight > 0");
  }
  if (variant == Variant::kVgclWoC) {
    require(loss.gamma == 0.0, "variant=vgcl_wo_c conflicts with gamma > 0");
  }
  if (variant == Variant::kVgclWoV) {
    require(loss.kl_weight == 0.0, "variant=vgcl_wo_v conflicts with kl_weight > 0");
  }
  if (cluster_contrast_active()) {
    require(cluster_count_users >= 1, "k_users must be >= 1 when cluster loss is active");
    require(cluster_count_items >= 1, "k_items must be >= 1 when cluster loss is active");
  }
  if (freeze_sigma_zero) {
    require(loss.kl_weight == 0.0, "freeze_sigma_zero requires kl_weight=0");
  }
  if (cluster_mode == AssignMode::kSoft) {
    require(soft_temperature > 0.0, "soft_temperature must be > 0");
  }
  if (eval_every > 0) {
    require(std::find(eval_cutoffs.begin(), eval_cutoffs.end(), 20) != eval_cutoffs.end(),
            "eval_cutoffs must include 20 when periodic evaluation is on");
  }

  if (!problems.empty()) {
    std::string joined = "invalid config: ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      if (i) joined += "; ";
      joined += problems[i];
    }
    throw ConfigError(joined);
  }
}

AdamState AdamState::zeros_like(const ModelParams& p) {
  AdamState s;
  s.m_embeddings = Matrix::Zero(p.embeddings.rows(), p.embeddings.cols());
  s.v_embeddings = s.m_embeddings;
  s.m_weight = Matrix::Zero(p.variance_weight.rows(), p.variance_weight.cols());
  s.v_weight = s.m_weight;
  s.m_bias = RowVector::Zero(p.variance_bias.cols());
  s.v_bias = s.m_bias;
  return s;
}

void adam_step(ModelParams& params, const ParamGrads& grads, AdamState& state,
               double learning_rate) {
  if (!grads.all_finite()) {
    throw FiniteError("adam_step: non-finite gradient at step " +
                      std::to_string(state.step + 1));
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  auto update = [&](auto& value, const auto& grad, auto& m, auto& v) {
    m = state.beta1 * m + (1.0 - state.beta1) * grad;
    v.array() = state.beta2 * v.array() + (1.0 - state.beta2) * grad.array().square();
    value.array() -=
        learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.epsilon);
  };
  update(params.embeddings, grads.d_embeddings, state.m_embeddings, state.v_embeddings);
  update(params.variance_weight, grads.d_variance_weight, state.m_weight, state.v_weight);
  update(params.variance_bias, grads.d_variance_bias, state.m_bias, state.v_bias);
}

namespace {

struct ComponentWeights {
  double bpr = 0.0;
  double kl = 0.0;
  double node = 0.0;
  double cluster = 0.0;
  double reg = 0.0;
};

struct BatchObjective {
  double value = 0.0;
  double bpr = 0.0, kl = 0.0, node = 0.0, cluster = 0.0, reg = 0.0;  // unweighted
  ParamGrads grads;
  long clamp_events = 0;
  long cluster_skips = 0;
  int propagation_passes = 0;
};

std::vector<int> unique_sorted_users(std::span<const TrainingTriple> triples) {
  std::set<int> ids;
  for (const auto& t : triples) ids.insert(t.user);
  return {ids.begin(), ids.end()};
}

std::vector<int> unique_sorted_pos_items(std::span<const TrainingTriple> triples) {
  std::set<int> ids;
  for (const auto& t : triples) ids.insert(t.pos_item);
  return {ids.begin(), ids.end()};
}

Matrix gather_rows(const Matrix& source, const std::vector<int>& ids, int offset) {
  Matrix out(static_cast<Index>(ids.size()), source.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) out.row(r) = source.row(ids[r] + offset);
  return out;
}

// Shared by training and the gradient checker: one forward pass of the
// variational pipeline (or its deterministic reductions) plus the combined
// backward chain for the requested component weights. All stochastic inputs
// arrive frozen; null noise pointers select the deterministic mean path.
BatchObjective variational_objective(
    const NormalizedAdjacency& adj, const ModelParams& params, const EncoderConfig& enc,
    std::span<const TrainingTriple> triples, const std::vector<int>& batch_users,
    const std::vector<int>& batch_items, const Matrix* p_same_users,
    const Matrix* p_same_items, const Matrix* eps, const Matrix* eps1,
    const Matrix* eps2, const ComponentWeights& w, const LossConfig& lc,
    bool freeze_sigma_zero, bool compute_grads) {
  BatchObjective out;
  const bool want_sigma =
      !freeze_sigma_zero && (w.kl != 0.0 || eps != nullptr || eps1 != nullptr);
  GaussianParams g = infer(adj, params, enc, want_sigma);
  out.propagation_passes = 1;
  out.clamp_events = g.clamp_events;

  const Index rows = g.mu.rows(), cols = g.mu.cols();
  Matrix d_mu, d_sigma;
  if (compute_grads) {
    d_mu = Matrix::Zero(rows, cols);
    if (want_sigma) d_sigma = Matrix::Zero(rows, cols);
  }
  const bool use_noise = (eps != nullptr) && !freeze_sigma_zero;

  if (w.bpr != 0.0) {
    const Matrix z = use_noise ? Matrix(g.mu + g.sigma.cwiseProduct(*eps)) : g.mu;
    BprLoss b = bpr_reconstruction(z, triples, adj.user_count, lc.mean_reduction);
    out.bpr = b.value;
    if (compute_grads) {
      d_mu += w.bpr * b.d_z;
      if (use_noise) d_sigma += w.bpr * b.d_z.cwiseProduct(*eps);
    }
  }

  if (w.kl != 0.0) {
    KlLoss k = kl_regularizer(g.mu, g.sigma, lc.mean_reduction);
    out.kl = k.value;
    if (compute_grads) {
      d_mu += w.kl * k.d_mu;
      d_sigma += w.kl * k.d_sigma;
    }
  }

  if (w.node != 0.0 || w.cluster != 0.0) {
    const bool view_noise = (eps1 != nullptr) && !freeze_sigma_zero;
    const Matrix z1 = view_noise ? Matrix(g.mu + g.sigma.cwiseProduct(*eps1)) : g.mu;
    const Matrix z2 = view_noise ? Matrix(g.mu + g.sigma.cwiseProduct(*eps2)) : g.mu;
    const int item_offset = adj.user_count;

    struct Side {
      const std::vector<int>* ids;
      int offset;
      const Matrix* p_same;
    };
    const Side sides[2] = {{&batch_users, 0, p_same_users},
                           {&batch_items, item_offset, p_same_items}};
    for (const Side& side : sides) {
      const Matrix v1 = gather_rows(z1, *side.ids, side.offset);
      const Matrix v2 = gather_rows(z2, *side.ids, side.offset);

      auto scatter = [&](double weight, const Matrix& dv1, const Matrix& dv2) {
        if (!compute_grads) return;
        for (std::size_t r = 0; r < side.ids->size(); ++r) {
          const Index row = (*side.ids)[r] + side.offset;
          d_mu.row(row) += weight * (dv1.row(r) + dv2.row(r));
          if (view_noise) {
            d_sigma.row(row) += weight * (dv1.row(r).cwiseProduct(eps1->row(row)) +
                                          dv2.row(r).cwiseProduct(eps2->row(row)));
          }
        }
      };

      if (w.node != 0.0) {
        ContrastiveLoss n = node_infonce(v1, v2, lc.tau1, lc.mean_reduction);
        out.node += n.value;
        scatter(w.node, n.d_view1, n.d_view2);
      }
      if (w.cluster != 0.0) {
        ContrastiveLoss c =
            cluster_contrastive(v1, v2, *side.p_same, lc.tau2, lc.mean_reduction);
        out.cluster += c.value;
        out.cluster_skips += c.skipped;
        scatter(w.cluster, c.d_view1, c.d_view2);
      }
    }
  }

  if (w.reg != 0.0) out.reg = params.embeddings.squaredNorm();

  out.value = w.bpr * out.bpr + w.kl * out.kl + w.node * out.node +
              w.cluster * out.cluster + w.reg * out.reg;

  if (compute_grads) {
    out.grads = infer_backward(adj, params, g, d_mu, d_sigma, enc);
    if (w.reg != 0.0) out.grads.d_embeddings += w.reg * 2.0 * params.embeddings;
  }
  return out;
}

// The feature-augmentation ablation: deterministic embeddings carry the
// ranking loss while two noise-perturbed propagations carry the contrast.
// Three propagation chains forward, three back.
BatchObjective augmented_objective(const NormalizedAdjacency& adj,
                                   const ModelParams& params, const EncoderConfig& enc,
                                   std::span<const TrainingTriple> triples,
                                   const std::vector<int>& batch_users,
                                   const std::vector<int>& batch_items,
                                   const Matrix* p_same_users, const Matrix* p_same_items,
                                   const Matrix& view1, const Matrix& view2,
                                   const ComponentWeights& w, const LossConfig& lc,
                                   bool compute_grads) {
  BatchObjective out;
  GaussianParams g = infer(adj, params, enc, /*with_variance=*/false);
  out.propagation_passes = 1;  // the two view passes are counted by the caller

  Matrix d_main, d_view1, d_view2;
  if (compute_grads) {
    d_main = Matrix::Zero(g.mu.rows(), g.mu.cols());
    d_view1 = Matrix::Zero(g.mu.rows(), g.mu.cols());
    d_view2 = Matrix::Zero(g.mu.rows(), g.mu.cols());
  }

  if (w.bpr != 0.0) {
    BprLoss b = bpr_reconstruction(g.mu, triples, adj.user_count, lc.mean_reduction);
    out.bpr = b.value;
    if (compute_grads) d_main += w.bpr * b.d_z;
  }

  const int item_offset = adj.user_count;
  struct Side {
    const std::vector<int>* ids;
    int offset;
    const Matrix* p_same;
  };
  const Side sides[2] = {{&batch_users, 0, p_same_users},
                         {&batch_items, item_offset, p_same_items}};
  for (const Side& side : sides) {
    const Matrix v1 = gather_rows(view1, *side.ids, side.offset);
    const Matrix v2 = gather_rows(view2, *side.ids, side.offset);

    auto scatter = [&](double weight, const Matrix& dv1, const Matrix& dv2) {
      if (!compute_grads) return;
      for (std::size_t r = 0; r < side.ids->size(); ++r) {
        const Index row = (*side.ids)[r] + side.offset;
        d_view1.row(row) += weight * dv1.row(r);
        d_view2.row(row) += weight * dv2.row(r);
      }
    };

    if (w.node != 0.0) {
      ContrastiveLoss n = node_infonce(v1, v2, lc.tau1, lc.mean_reduction);
      out.node += n.value;
      scatter(w.node, n.d_view1, n.d_view2);
    }
    if (w.cluster != 0.0) {
      ContrastiveLoss c =
          cluster_contrastive(v1, v2, *side.p_same, lc.tau2, lc.mean_reduction);
      out.cluster += c.value;
      out.cluster_skips += c.skipped;
      scatter(w.cluster, c.d_view1, c.d_view2);
    }
  }

  if (w.reg != 0.0) out.reg = params.embeddings.squaredNorm();

  out.value = w.bpr * out.bpr + w.node * out.node + w.cluster * out.cluster +
              w.reg * out.reg;

  if (compute_grads) {
    out.grads = ParamGrads::zeros_like(params);
    out.grads.d_embeddings = propagate_backward(adj, d_main, enc) +
                             propagate_backward(adj, d_view1, enc) +
                             propagate_backward(adj, d_view2, enc);
    if (w.reg != 0.0) out.grads.d_embeddings += w.reg * 2.0 * params.embeddings;
  }
  return out;
}

ComponentWeights training_weights(const TrainConfig& cfg) {
  ComponentWeights w;
  w.bpr = 1.0;
  w.kl = cfg.variational() ? cfg.loss.kl_weight : 0.0;
  w.node = cfg.node_contrast_active() ? cfg.loss.alpha : 0.0;
  w.cluster = cfg.cluster_contrast_active() ? cfg.loss.alpha * cfg.loss.gamma : 0.0;
  w.reg = cfg.loss.lambda;
  return w;
}

}  // namespace

TrainResult train(const SplitDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.train.pairs.empty()) throw EmptyDatasetError("train split is empty");

  const NormalizedAdjacency adj = build_graph(data.train);
  const EncoderConfig enc = cfg.encoder_config();
  const int n_users = data.train.user_count;
  const int n_items = data.train.item_count;

  RngStream init_rng = RngStream::substream(cfg.seed, "init");
  RngStream triple_rng = RngStream::substream(cfg.seed, "triples");
  RngStream reparam_rng = RngStream::substream(cfg.seed, "reparam");
  RngStream kmeans_rng = RngStream::substream(cfg.seed, "kmeans");

  ModelParams params =
      init_params(adj.node_count, cfg.dim, cfg.effective_init_std(), init_rng);
  AdamState adam = AdamState::zeros_like(params);
  TripleSampler sampler(data.train);
  const ComponentWeights w = training_weights(cfg);

  const int batches_per_epoch =
      static_cast<int>((data.train.pairs.size() + cfg.batch_size - 1) / cfg.batch_size);
  const bool test_available = !data.test.pairs.empty();
  const bool draw_z = cfg.variational();
  const bool draw_views =
      cfg.variational() && (w.node != 0.0 || w.cluster != 0.0);
  const bool augmented_views = (cfg.variant == Variant::kVgclWoV);

  std::vector<std::vector<int>> degree_quartiles;
  if (n_users >= 4) degree_quartiles = degree_quantile_groups(data.train.user_degrees(), 4);

  int ndcg20_slot = -1;
  for (std::size_t c = 0; c < cfg.eval_cutoffs.size(); ++c) {
    if (cfg.eval_cutoffs[c] == 20) ndcg20_slot = static_cast<int>(c);
  }

  TrainResult result;
  ModelParams last_good = params;
  ModelParams best_params;
  bool have_best = false;
  double best_ndcg = -1.0;
  int evals_since_best = 0;
  bool stop = false;

  ClusterModel cluster;
  auto refresh_cluster = [&](bool inside_batch_loop) {
    GaussianParams gi = infer(adj, params, enc, /*with_variance=*/false);
    if (inside_batch_loop) {
      ++result.stats.batch_propagation_passes;
    } else {
      ++result.stats.epoch_overhead_passes;
    }
    cluster = fit_cluster_model(gi.mu.topRows(n_users), gi.mu.bottomRows(n_items),
                                cfg.cluster_count_users, cfg.cluster_count_items,
                                cfg.cluster_mode, cfg.soft_temperature, kmeans_rng,
                                cfg.kmeans_max_iters, cfg.kmeans_tol);
  };

  for (int epoch = 1; epoch <= cfg.epochs && !stop; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    if (w.cluster != 0.0 && !cfg.cluster_refresh_per_batch) refresh_cluster(false);

    EpochRecord rec;
    rec.epoch = epoch;
    bool epoch_diverged = false;

    for (int b = 0; b < batches_per_epoch; ++b) {
      try {
        if (w.cluster != 0.0 && cfg.cluster_refresh_per_batch) refresh_cluster(true);
        const std::vector<TrainingTriple> triples =
            sampler.sample(cfg.batch_size, triple_rng);
        const std::vector<int> batch_users = unique_sorted_users(triples);
        const std::vector<int> batch_items = unique_sorted_pos_items(triples);

        Matrix p_u, p_i;
        const Matrix* p_same_users = nullptr;
        const Matrix* p_same_items = nullptr;
        if (w.cluster != 0.0) {
          p_u = same_cluster_prob(cluster.assign_users, batch_users, batch_users);
          p_i = same_cluster_prob(cluster.assign_items, batch_items, batch_items);
          p_same_users = &p_u;
          p_same_items = &p_i;
        }

        BatchObjective bo;
        if (augmented_views) {
          auto [v1, v2] =
              feature_augment_views(adj, params, enc, cfg.eps_amplitude, reparam_rng);
          result.stats.batch_propagation_passes += 2;
          bo = augmented_objective(adj, params, enc, triples, batch_users, batch_items,
                                   p_same_users, p_same_items, v1, v2, w, cfg.loss,
                                   /*compute_grads=*/true);
        } else {
          Matrix eps, eps1, eps2;
          const Matrix *pe = nullptr, *pe1 = nullptr, *pe2 = nullptr;
          if (draw_z) {
            eps.resize(adj.node_count, cfg.dim);
            reparam_rng.fill_normal(eps);
            pe = &eps;
          }
          if (draw_views) {
            eps1.resize(adj.node_count, cfg.dim);
            eps2.resize(adj.node_count, cfg.dim);
            reparam_rng.fill_normal(eps1);
            reparam_rng.fill_normal(eps2);
            pe1 = &eps1;
            pe2 = &eps2;
          }
          bo = variational_objective(adj, params, enc, triples, batch_users,
                                     batch_items, p_same_users, p_same_items, pe, pe1,
                                     pe2, w, cfg.loss, cfg.freeze_sigma_zero,
                                     /*compute_grads=*/true);
        }

        ++result.stats.batches;
        result.stats.batch_propagation_passes += bo.propagation_passes;

        if (!std::isfinite(bo.value) || !bo.grads.all_finite()) {
          epoch_diverged = true;
          break;
        }

        rec.loss_total += bo.value;
        rec.loss_bpr += bo.bpr;
        rec.loss_kl += bo.kl;
        rec.loss_node += bo.node;
        rec.loss_cluster += bo.cluster;
        rec.loss_reg += bo.reg;
        rec.clamp_events += bo.clamp_events;
        rec.cluster_skips += bo.cluster_skips;

        adam_step(params, bo.grads, adam, cfg.learning_rate);
      } catch (const FiniteError&) {
        epoch_diverged = true;
        break;
      }
    }

    if (epoch_diverged) {
      result.diverged = true;
      params = last_good;  // keep the last epoch-end state
      result.log.push_back(rec);
      break;
    }

    rec.loss_total /= batches_per_epoch;
    rec.loss_bpr /= batches_per_epoch;
    rec.loss_kl /= batches_per_epoch;
    rec.loss_node /= batches_per_epoch;
    rec.loss_cluster /= batches_per_epoch;
    rec.loss_reg /= batches_per_epoch;

    const bool eval_now =
        test_available && cfg.eval_every > 0 && (epoch % cfg.eval_every == 0);
    const bool sigma_now = cfg.variational();
    if (eval_now || sigma_now) {
      GaussianParams gi = infer(adj, params, enc, sigma_now);
      ++result.stats.epoch_overhead_passes;
      if (sigma_now && !degree_quartiles.empty()) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
        for (int q = 0; q < 4; ++q) {
          double sum = 0.0;
          for (int user : degree_quartiles[q]) sum += gi.sigma.row(user).norm() * scale;
          rec.sigma_by_degree_quartile[q] =
              degree_quartiles[q].empty() ? 0.0 : sum / degree_quartiles[q].size();
        }
      }
      if (eval_now) {
        rec.eval = evaluate(gi.mu.topRows(n_users), gi.mu.bottomRows(n_items),
                            data.train, data.test, cfg.eval_cutoffs);
        rec.evaluated = true;
        const double ndcg20 = rec.eval.ndcg[ndcg20_slot];
        if (ndcg20 > best_ndcg) {
          best_ndcg = ndcg20;
          best_params = params;
          have_best = true;
          result.best_epoch = epoch;
          evals_since_best = 0;
        } else if (++evals_since_best >= cfg.early_stop_patience) {
          stop = true;
        }
      }
    }

    last_good = params;
    const auto t1 = std::chrono::steady_clock::now();
    result.stats.epoch_wall_ms.push_back(
        std::chrono::duration<double, std::milli>(t1 - t0).count());
    result.log.push_back(rec);
  }

  result.params = have_best ? best_params : params;
  result.best_ndcg = best_ndcg > 0.0 ? best_ndcg : 0.0;
  return result;
}

InferenceSnapshot snapshot_inference(const InteractionTable& train,
                                     const ModelParams& params,
                                     const EncoderConfig& enc, bool with_sigma) {
  const NormalizedAdjacency adj = build_graph(train);
  const GaussianParams g = infer(adj, params, enc, with_sigma);
  InferenceSnapshot snap;
  snap.mu_users = g.mu.topRows(train.user_count);
  snap.mu_items = g.mu.bottomRows(train.item_count);
  if (with_sigma) snap.sigma_users = g.sigma.topRows(train.user_count);
  return snap;
}

GradCheckReport grad_check(std::uint64_t seed, const std::string& corrupt_component) {
  RngStream rng(RngStream::derive_seed(seed, "gradcheck"));

  const int n_users = 4 + static_cast<int>(rng.next(5));  // 4..8
  const int n_items = 5 + static_cast<int>(rng.next(4));  // 5..8
  const int dim = 3 + static_cast<int>(rng.next(4));      // 3..6
  const int layers = 1 + static_cast<int>(rng.next(3));   // 1..3

  InteractionTable table;
  table.user_count = n_users;
  table.item_count = n_items;
  std::set<std::pair<int, int>> pair_set;
  for (int u = 0; u < n_users; ++u) {
    for (int i = 0; i < n_items; ++i) {
      if (rng.uniform() < 0.35) pair_set.emplace(u, i);
    }
  }
  for (int u = 0; u < n_users; ++u) {  // every user owns at least one item
    pair_set.emplace(u, u % n_items);
  }
  for (int u = 0; u < n_users; ++u) {  // ... and misses at least one
    bool full = true;
    for (int i = 0; i < n_items && full; ++i) full = pair_set.count({u, i}) != 0;
    if (full) pair_set.erase({u, n_items - 1});
  }
  table.pairs.assign(pair_set.begin(), pair_set.end());
  const NormalizedAdjacency adj = build_graph(table);
  const EncoderConfig enc{layers, false, 30.0};

  ModelParams params;
  params.embeddings.resize(adj.node_count, dim);
  rng.fill_normal(params.embeddings);
  params.embeddings *= 0.5;
  params.variance_weight.resize(dim, dim);
  rng.fill_normal(params.variance_weight);
  params.variance_weight *= 0.5;
  Matrix bias(1, dim);
  rng.fill_normal(bias);
  params.variance_bias = bias.row(0) * 0.5;

  TripleSampler sampler(table);
  const std::vector<TrainingTriple> triples = sampler.sample(6, rng);
  std::vector<int> batch_users(n_users), batch_items(n_items);
  for (int u = 0; u < n_users; ++u) batch_users[u] = u;
  for (int i = 0; i < n_items; ++i) batch_items[i] = i;

  Matrix eps(adj.node_count, dim), eps1(adj.node_count, dim), eps2(adj.node_count, dim);
  rng.fill_normal(eps);
  rng.fill_normal(eps1);
  rng.fill_normal(eps2);

  // Frozen soft cluster assignments: random logits through a softmax.
  auto random_assignments = [&rng](int rows, int k) {
    Matrix logits(rows, k);
    rng.fill_normal(logits);
    Matrix probs(rows, k);
    for (Index r = 0; r < rows; ++r) {
      RowVector e = (logits.row(r).array() - logits.row(r).maxCoeff()).exp();
      probs.row(r) = e / e.sum();
    }
    return probs;
  };
  const Matrix assign_u = random_assignments(n_users, 3);
  const Matrix assign_i = random_assignments(n_items, 3);
  const Matrix p_same_u = same_cluster_prob(assign_u, batch_users, batch_users);
  const Matrix p_same_i = same_cluster_prob(assign_i, batch_items, batch_items);

  LossConfig lc;
  lc.alpha = 0.7;
  lc.gamma = 0.8;
  lc.lambda = 0.01;
  lc.tau1 = 0.2;
  lc.tau2 = 0.15;
  lc.kl_weight = 0.5;

  auto objective = [&](const ModelParams& p, const ComponentWeights& w,
                       bool compute_grads) {
    return variational_objective(adj, p, enc, triples, batch_users, batch_items,
                                 &p_same_u, &p_same_i, &eps, &eps1, &eps2, w, lc,
                                 /*freeze_sigma_zero=*/false, compute_grads);
  };

  const std::pair<std::string, ComponentWeights> components[] = {
      {"bpr", {1.0, 0.0, 0.0, 0.0, 0.0}},
      {"kl", {0.0, 1.0, 0.0, 0.0, 0.0}},
      {"node_infonce", {0.0, 0.0, 1.0, 0.0, 0.0}},
      {"cluster_contrastive", {0.0, 0.0, 0.0, 1.0, 0.0}},
      {"total", {1.0, lc.kl_weight, lc.alpha, lc.alpha * lc.gamma, lc.lambda}},
  };

  const double h = 1e-4;
  GradCheckReport report;
  report.pass = true;

  for (const auto& [name, w] : components) {
    BatchObjective analytic = objective(params, w, /*compute_grads=*/true);
    if (name == corrupt_component) analytic.grads.d_embeddings *= 1.01;

    ModelParams probe = params;
    Matrix* blocks_a[] = {&analytic.grads.d_embeddings, &analytic.grads.d_variance_weight};
    Matrix* blocks_p[] = {&probe.embeddings, &probe.variance_weight};

    double max_abs_grad = analytic.grads.d_variance_bias.cwiseAbs().maxCoeff();
    for (const Matrix* m : blocks_a) {
      max_abs_grad = std::max(max_abs_grad, m->cwiseAbs().maxCoeff());
    }

    double max_abs_err = 0.0;
    auto probe_entry = [&](double* slot, double analytic_grad) {
      const double original = *slot;
      *slot = original + h;
      const double up = objective(probe, w, false).value;
      *slot = original - h;
      const double down = objective(probe, w, false).value;
      *slot = original;
      const double fd = (up - down) / (2.0 * h);
      max_abs_grad = std::max(max_abs_grad, std::abs(fd));
      max_abs_err = std::max(max_abs_err, std::abs(analytic_grad - fd));
    };

    for (int blk = 0; blk < 2; ++blk) {
      double* data = blocks_p[blk]->data();
      const double* grad = blocks_a[blk]->data();
      for (Index e = 0; e < blocks_p[blk]->size(); ++e) probe_entry(data + e, grad[e]);
    }
    for (Index e = 0; e < probe.variance_bias.size(); ++e) {
      probe_entry(probe.variance_bias.data() + e, analytic.grads.d_variance_bias(e));
    }

    GradCheckEntry entry;
    entry.component = name;
    entry.max_rel_err = max_abs_err / std::max(max_abs_grad, 1e-8);
    entry.pass = entry.max_rel_err < 1e-5;
    report.pass = report.pass && entry.pass;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace vgcl
