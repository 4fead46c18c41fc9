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
#include <string>
#include <vector>

#include "vgcl/clustering.hpp"
#include "vgcl/core.hpp"
#include "vgcl/dataset.hpp"
#include "vgcl/encoder.hpp"
#include "vgcl/evaluator.hpp"
#include "vgcl/losses.hpp"

namespace vgcl {

enum class Variant { kVgcl, kVgclWoC, kVgclWoV, kLightGcn };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);

struct TrainConfig {
  int dim = 64;
  int layers = 2;
  double learning_rate = 1e-3;
  int batch_size = 2048;
  int epochs = 100;
  std::uint64_t seed = 0;
  Variant variant = Variant::kVgcl;
  int cluster_count_users = 100;
  int cluster_count_items = 100;
  double eps_amplitude = 0.1;   // feature-augmentation noise scale (w/o-V path)
  double init_std = 0.01;
  bool init_std_is_variance = false;  // read 0.01 as a variance instead
  int eval_every = 10;                // 0 disables periodic evaluation
  int early_stop_patience = 50;       // evaluations without NDCG@20 improvement
  LossConfig loss;
  AssignMode cluster_mode = AssignMode::kHard;
  double soft_temperature = 1.0;
  bool include_layer0 = false;
  bool cluster_refresh_per_batch = false;
  int kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;
  std::vector<int> eval_cutoffs = {10, 20};
  bool freeze_sigma_zero = false;  // test hook: sigma pinned to zero everywhere

  void validate() const;  // throws ConfigError naming every offending field

  bool variational() const {
    return (variant == Variant::kVgcl || variant == Variant::kVgclWoC) &&
           !freeze_sigma_zero;
  }
  bool node_contrast_active() const {
    return variant != Variant::kLightGcn && loss.alpha > 0.0;
  }
  bool cluster_contrast_active() const {
    return (variant == Variant::kVgcl || variant == Variant::kVgclWoV) &&
           loss.alpha > 0.0 && loss.gamma > 0.0;
  }
  EncoderConfig encoder_config() const {
    return EncoderConfig{layers, include_layer0, 30.0};
  }
  double effective_init_std() const {
    return init_std_is_variance ? std::sqrt(init_std) : init_std;
  }
};

struct AdamState {
  Matrix m_embeddings, v_embeddings;
  Matrix m_weight, v_weight;
  RowVector m_bias, v_bias;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState zeros_like(const ModelParams& p);
};

// Bias-corrected Adam update over all three parameter blocks.
void adam_step(ModelParams& params, const ParamGrads& grads, AdamState& state,
               double learning_rate);

struct EpochRecord {
  int epoch = 0;
  double loss_total = 0.0;  // per-batch means of the weighted objective
  double loss_bpr = 0.0;    // unweighted component values, per-batch means
  double loss_kl = 0.0;
  double loss_node = 0.0;
  double loss_cluster = 0.0;
  double loss_reg = 0.0;
  long clamp_events = 0;
  long cluster_skips = 0;
  std::array<double, 4> sigma_by_degree_quartile{};
  bool evaluated = false;
  MetricsReport eval;
};

struct TrainStats {
  long batches = 0;
  long batch_propagation_passes = 0;  // inside the batch loop only
  long epoch_overhead_passes = 0;     // clustering refresh + logging inference
  std::vector<double> epoch_wall_ms;  // diagnostic; excluded from the log file
};

struct TrainResult {
  ModelParams params;  // best-evaluation snapshot when evaluation ran, else final
  std::vector<EpochRecord> log;
  TrainStats stats;
  bool diverged = false;
  int best_epoch = -1;
  double best_ndcg = 0.0;
};

TrainResult train(const SplitDataset& data, const TrainConfig& cfg);

// Deterministic inference snapshot for evaluation and analysis outside the
// training loop.
struct InferenceSnapshot {
  Matrix mu_users;
  Matrix mu_items;
  Matrix sigma_users;  // empty unless requested
};

InferenceSnapshot snapshot_inference(const InteractionTable& train,
                                     const ModelParams& params,
                                     const EncoderConfig& enc, bool with_sigma);

struct GradCheckEntry {
  std::string component;
  double max_rel_err = 0.0;
  bool pass = false;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  bool pass = false;
};

// Validates every analytic gradient against central finite differences
// (step 1e-4) on a randomly built small instance: the noise draws, triples,
// and cluster probabilities are frozen, so each loss is a deterministic
// function of the parameters. Per-entry errors are measured relative to the
// infinity norm of the gradient. `corrupt_component` scales that component's
// embedding gradient by 1.01, which must surface as a FAIL naming it.
GradCheckReport grad_check(std::uint64_t seed, const std::string& corrupt_component = "");

}  // namespace vgcl
