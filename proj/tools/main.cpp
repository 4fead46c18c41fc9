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
#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "vgcl/checkpoint.hpp"
#include "vgcl/config.hpp"
#include "vgcl/evaluator.hpp"
#include "vgcl/trainer.hpp"

namespace fs = std::filesystem;
using namespace vgcl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::uint64_t repeat_seed(std::uint64_t root, int repeat) {
  if (repeat == 0) return root;
  return RngStream::derive_seed(root, "repeat" + std::to_string(repeat));
}

void write_train_log(const std::string& path, const TrainResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write training log: " + path);
  for (const auto& rec : result.log) {
    out << "epoch=" << rec.epoch;
    out << " total=" << fmt(rec.loss_total);
    out << " bpr=" << fmt(rec.loss_bpr);
    out << " kl=" << fmt(rec.loss_kl);
    out << " node=" << fmt(rec.loss_node);
    out << " cluster=" << fmt(rec.loss_cluster);
    out << " reg=" << fmt(rec.loss_reg);
    out << " clamp_events=" << rec.clamp_events;
    out << " cluster_skips=" << rec.cluster_skips;
    for (int q = 0; q < 4; ++q) {
      out << " sigma_q" << (q + 1) << '=' << fmt(rec.sigma_by_degree_quartile[q]);
    }
    if (rec.evaluated) {
      for (std::size_t c = 0; c < rec.eval.cutoffs.size(); ++c) {
        out << " recall@" << rec.eval.cutoffs[c] << '=' << fmt(rec.eval.recall[c]);
        out << " ndcg@" << rec.eval.cutoffs[c] << '=' << fmt(rec.eval.ndcg[c]);
      }
    }
    out << '\n';
  }
  out << "diverged=" << (result.diverged ? "true" : "false") << '\n';
  out << "best_epoch=" << result.best_epoch << '\n';
  out << "best_ndcg20=" << fmt(result.best_ndcg) << '\n';
  out << "batches=" << result.stats.batches << '\n';
  out << "batch_propagation_passes=" << result.stats.batch_propagation_passes << '\n';
}

void write_timing(const std::string& path, const TrainStats& stats) {
  std::ofstream out(path);
  for (std::size_t e = 0; e < stats.epoch_wall_ms.size(); ++e) {
    out << "epoch=" << (e + 1) << " wall_ms=" << fmt(stats.epoch_wall_ms[e]) << '\n';
  }
}

void append_metrics_records(std::ostream& out, int run, const std::string& variant,
                            const MetricsReport& report) {
  for (std::size_t c = 0; c < report.cutoffs.size(); ++c) {
    out << "run=" << run << " variant=" << variant << " cutoff=" << report.cutoffs[c]
        << " metric=recall value=" << fmt(report.recall[c]) << '\n';
    out << "run=" << run << " variant=" << variant << " cutoff=" << report.cutoffs[c]
        << " metric=ndcg value=" << fmt(report.ndcg[c]) << '\n';
  }
}

struct RunOutput {
  TrainResult result;
  MetricsReport final_metrics;
  bool has_metrics = false;
};

RunOutput run_once(const SplitDataset& data, TrainConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  RunOutput out;
  out.result = train(data, cfg);
  if (!data.test.pairs.empty() && !out.result.diverged) {
    const InferenceSnapshot snap =
        snapshot_inference(data.train, out.result.params, cfg.encoder_config(), false);
    out.final_metrics = evaluate(snap.mu_users, snap.mu_items, data.train, data.test,
                                 cfg.eval_cutoffs);
    out.has_metrics = true;
  }
  return out;
}

void persist_run(const fs::path& run_dir, const std::string& variant,
                 const SplitDataset& data, const TrainConfig& cfg, int run,
                 const RunOutput& out, bool dump_clusters) {
  fs::create_directories(run_dir);
  CheckpointMeta meta;
  meta.dim = cfg.dim;
  meta.users = data.user_count;
  meta.items = data.item_count;
  meta.layers = cfg.layers;
  save_checkpoint((run_dir / "checkpoint.bin").string(), out.result.params, meta);
  write_train_log((run_dir / "train_log.txt").string(), out.result);
  write_timing((run_dir / "timing.txt").string(), out.result.stats);
  if (out.has_metrics) {
    std::ofstream records(run_dir / "metrics.txt");
    append_metrics_records(records, run, variant, out.final_metrics);
  }
  if (dump_clusters) {
    const InferenceSnapshot snap =
        snapshot_inference(data.train, out.result.params, cfg.encoder_config(), false);
    RngStream kmeans_rng = RngStream::substream(cfg.seed, "kmeans_dump");
    const KMeansResult users = kmeans_fit(snap.mu_users, cfg.cluster_count_users,
                                          kmeans_rng, cfg.kmeans_max_iters,
                                          cfg.kmeans_tol);
    const KMeansResult items = kmeans_fit(snap.mu_items, cfg.cluster_count_items,
                                          kmeans_rng, cfg.kmeans_max_iters,
                                          cfg.kmeans_tol);
    write_cluster_summary((run_dir / "clusters_users.txt").string(), users.centroids,
                          users.labels);
    write_cluster_summary((run_dir / "clusters_items.txt").string(), items.centroids,
                          items.labels);
  }
}

SplitDataset load_configured_split(const RunConfig& cfg) {
  const std::string train_path = cfg.get("train_file");
  const std::string test_path = cfg.get("test_file");
  if (train_path.empty() || test_path.empty()) {
    throw ConfigError("train_file and test_file are required (run prepare first)");
  }
  return load_split(train_path, test_path);
}

SplitDataset prepare_split(const RunConfig& cfg, std::uint64_t seed) {
  const std::string input = cfg.get("input_file");
  if (input.empty()) throw ConfigError("input_file is required");
  std::optional<double> threshold;
  if (!cfg.is_empty("rating_threshold")) threshold = cfg.get_double("rating_threshold");
  const InteractionTable raw = load_interactions_file(input, threshold);
  const InteractionTable filtered =
      filter_min_interactions(raw, cfg.get_int("min_interactions"));
  return split_holdout(filtered, cfg.get_double("test_ratio"),
                       RngStream::derive_seed(seed, "split"));
}

int cmd_prepare(const RunConfig& cfg) {
  const fs::path out_dir = cfg.get("out_dir");
  fs::create_directories(out_dir);
  const std::uint64_t seed = cfg.get_u64("seed");
  const SplitDataset split = prepare_split(cfg, seed);

  save_interactions((out_dir / "train.txt").string(), split.train);
  save_interactions((out_dir / "test.txt").string(), split.test);
  save_split_manifest((out_dir / "manifest.txt").string(), split, seed,
                      cfg.get_double("test_ratio"));
  cfg.write_file((out_dir / "effective_config.txt").string());

  std::cout << "prepared users=" << split.user_count << " items=" << split.item_count
            << " train_pairs=" << split.train.pairs.size()
            << " test_pairs=" << split.test.pairs.size() << '\n';
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const fs::path out_dir = cfg.get("out_dir");
  fs::create_directories(out_dir);
  cfg.write_file((out_dir / "effective_config.txt").string());

  const TrainConfig base = cfg.to_train_config();
  const int repeats = cfg.get_int("repeats");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  const bool resplit = cfg.get_bool("resplit_per_repeat");

  SplitDataset fixed_split;
  if (!resplit) fixed_split = load_configured_split(cfg);

  std::ofstream all_records(out_dir / "metrics.txt");
  std::map<int, std::pair<double, double>> sums;  // cutoff -> (recall, ndcg)
  int metric_runs = 0;
  bool any_diverged = false;

  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t seed = repeat_seed(base.seed, r);
    const SplitDataset data = resplit ? prepare_split(cfg, seed) : fixed_split;
    const RunOutput out = run_once(data, base, seed);
    persist_run(out_dir / ("run_" + std::to_string(r)), variant_name(base.variant),
                data, base, r, out, cfg.get_bool("dump_clusters"));
    any_diverged = any_diverged || out.result.diverged;
    if (out.has_metrics) {
      append_metrics_records(all_records, r, variant_name(base.variant),
                             out.final_metrics);
      ++metric_runs;
      for (std::size_t c = 0; c < out.final_metrics.cutoffs.size(); ++c) {
        sums[out.final_metrics.cutoffs[c]].first += out.final_metrics.recall[c];
        sums[out.final_metrics.cutoffs[c]].second += out.final_metrics.ndcg[c];
      }
      std::cout << "run=" << r;
      for (std::size_t c = 0; c < out.final_metrics.cutoffs.size(); ++c) {
        std::cout << " recall@" << out.final_metrics.cutoffs[c] << '='
                  << fmt(out.final_metrics.recall[c]) << " ndcg@"
                  << out.final_metrics.cutoffs[c] << '='
                  << fmt(out.final_metrics.ndcg[c]);
      }
      std::cout << '\n';
    }
    if (out.result.diverged) {
      std::cerr << "run " << r << " diverged; last-good checkpoint kept\n";
    }
  }

  if (metric_runs > 0) {
    std::ofstream aggregate(out_dir / "aggregate.txt");
    aggregate << "runs=" << metric_runs << '\n';
    for (const auto& [cutoff, pair] : sums) {
      aggregate << "mean_recall@" << cutoff << '=' << fmt(pair.first / metric_runs)
                << '\n';
      aggregate << "mean_ndcg@" << cutoff << '=' << fmt(pair.second / metric_runs)
                << '\n';
    }
  }
  return any_diverged ? kExitDivergence : kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& checkpoint_path, int groups) {
  const SplitDataset data = load_configured_split(cfg);
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  if (ckpt.meta.users + ckpt.meta.items !=
      static_cast<int>(ckpt.params.embeddings.rows())) {
    throw ConfigError("checkpoint shape does not match its header");
  }
  if (ckpt.meta.users != data.user_count || ckpt.meta.items != data.item_count) {
    throw ConfigError("checkpoint was trained on a different index space");
  }

  EncoderConfig enc{ckpt.meta.layers, cfg.get_bool("include_layer0"), 30.0};
  const InferenceSnapshot snap =
      snapshot_inference(data.train, ckpt.params, enc, groups > 0);
  const std::vector<int> cutoffs = cfg.get_int_list("eval_cutoffs");
  const MetricsReport report =
      evaluate(snap.mu_users, snap.mu_items, data.train, data.test, cutoffs);

  const fs::path out_dir = cfg.get("out_dir");
  fs::create_directories(out_dir);
  std::ofstream records(out_dir / "metrics.txt");
  append_metrics_records(records, 0, "checkpoint", report);

  std::cout << "evaluated_users=" << report.evaluated_users << '\n';
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    std::cout << "recall@" << cutoffs[c] << '=' << fmt(report.recall[c]) << " ndcg@"
              << cutoffs[c] << '=' << fmt(report.ndcg[c]) << '\n';
  }

  if (groups > 0) {
    const auto rows = group_analysis(snap.mu_users, snap.mu_items, snap.sigma_users,
                                     data.train, data.test, groups);
    std::ofstream group_file(out_dir / "groups.txt");
    for (const auto& row : rows) {
      const std::string line = "group=" + std::to_string(row.group) +
                               " users=" + std::to_string(row.user_count) +
                               " mean_degree=" + fmt(row.mean_degree) +
                               " ndcg20=" + fmt(row.ndcg) +
                               " mean_sigma=" + fmt(row.mean_sigma);
      group_file << line << '\n';
      std::cout << line << '\n';
    }
  }
  return kExitOk;
}

int cmd_ablate(const RunConfig& cfg) {
  const fs::path out_dir = cfg.get("out_dir");
  fs::create_directories(out_dir);
  cfg.write_file((out_dir / "effective_config.txt").string());

  const SplitDataset data = load_configured_split(cfg);
  const int repeats = cfg.get_int("repeats");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");

  const std::vector<std::string> variants = {"lightgcn", "vgcl_wo_v", "vgcl_wo_c",
                                             "vgcl"};
  std::ofstream records(out_dir / "metrics.txt");
  std::ofstream table(out_dir / "ablation.txt");
  bool any_diverged = false;

  for (const std::string& name : variants) {
    RunConfig variant_cfg = cfg;
    variant_cfg.set("variant", name);
    // Drop the loss terms each variant removes so the shared base config
    // never trips the conflict validation.
    if (name == "lightgcn") {
      variant_cfg.set("alpha", "0");
      variant_cfg.set("kl_weight", "0");
    } else if (name == "vgcl_wo_c") {
      variant_cfg.set("gamma", "0");
    } else if (name == "vgcl_wo_v") {
      variant_cfg.set("kl_weight", "0");
    }
    const TrainConfig tc = variant_cfg.to_train_config();

    std::vector<double> recalls, ndcgs;
    for (int r = 0; r < repeats; ++r) {
      const RunOutput out = run_once(data, tc, repeat_seed(tc.seed, r));
      any_diverged = any_diverged || out.result.diverged;
      if (!out.has_metrics) continue;
      append_metrics_records(records, r, name, out.final_metrics);
      for (std::size_t c = 0; c < out.final_metrics.cutoffs.size(); ++c) {
        if (out.final_metrics.cutoffs[c] == 20) {
          recalls.push_back(out.final_metrics.recall[c]);
          ndcgs.push_back(out.final_metrics.ndcg[c]);
        }
      }
    }

    auto median = [](std::vector<double> v) {
      if (v.empty()) return 0.0;
      std::sort(v.begin(), v.end());
      const std::size_t mid = v.size() / 2;
      return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
    };
    std::string line = "variant=" + name + " runs=" + std::to_string(recalls.size()) +
                       " median_recall@20=" + fmt(median(recalls)) +
                       " median_ndcg@20=" + fmt(median(ndcgs));
    for (std::size_t r = 0; r < ndcgs.size(); ++r) {
      line += " ndcg20_run" + std::to_string(r) + "=" + fmt(ndcgs[r]);
    }
    table << line << '\n';
    std::cout << line << '\n';
  }
  return any_diverged ? kExitDivergence : kExitOk;
}

int cmd_gradcheck(std::uint64_t seed, const std::string& corrupt) {
  const GradCheckReport report = grad_check(seed, corrupt);
  for (const auto& entry : report.entries) {
    std::cout << "component=" << entry.component
              << " max_rel_err=" << fmt(entry.max_rel_err)
              << " status=" << (entry.pass ? "PASS" : "FAIL") << '\n';
  }
  std::cout << "gradcheck " << (report.pass ? "PASS" : "FAIL") << '\n';
  return report.pass ? kExitOk : kExitCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational graph generative-contrastive collaborative filtering"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::map<std::string, std::string> sugar;  // config key -> value from flags

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    cmd->add_option("--set", overrides, "override a config key (key=value)")
        ->take_all();
  };
  auto add_key_flag = [&](CLI::App* cmd, const std::string& flag,
                          const std::string& key, const std::string& doc) {
    cmd->add_option_function<std::string>(
        flag, [&sugar, key](const std::string& value) { sugar[key] = value; }, doc);
  };

  CLI::App* prepare = app.add_subcommand("prepare", "filter, split, and index a dataset");
  add_common(prepare);
  add_key_flag(prepare, "--input", "input_file", "raw interaction file");
  add_key_flag(prepare, "--out", "out_dir", "output directory");
  add_key_flag(prepare, "--min-interactions", "min_interactions", "per-user minimum");
  add_key_flag(prepare, "--test-ratio", "test_ratio", "holdout fraction");
  add_key_flag(prepare, "--seed", "seed", "root seed");
  add_key_flag(prepare, "--rating-threshold", "rating_threshold",
               "keep rows with rating >= value");

  CLI::App* train_cmd = app.add_subcommand("train", "train a model on prepared splits");
  add_common(train_cmd);
  add_key_flag(train_cmd, "--train", "train_file", "prepared train split");
  add_key_flag(train_cmd, "--test", "test_file", "prepared test split");
  add_key_flag(train_cmd, "--out", "out_dir", "output directory");
  add_key_flag(train_cmd, "--seed", "seed", "root seed");
  add_key_flag(train_cmd, "--variant", "variant", "model variant");
  add_key_flag(train_cmd, "--epochs", "epochs", "training epochs");
  add_key_flag(train_cmd, "--repeats", "repeats", "seed-varied repeats");

  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "rank with a checkpoint and report metrics");
  add_common(evaluate_cmd);
  std::string checkpoint_path;
  int groups = 0;
  evaluate_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")
      ->required();
  evaluate_cmd->add_option("--groups", groups, "degree-quantile group count");
  add_key_flag(evaluate_cmd, "--train", "train_file", "prepared train split");
  add_key_flag(evaluate_cmd, "--test", "test_file", "prepared test split");
  add_key_flag(evaluate_cmd, "--out", "out_dir", "output directory");
  add_key_flag(evaluate_cmd, "--cutoffs", "eval_cutoffs", "ranking cutoffs");

  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "run all variants with shared seeds");
  add_common(ablate_cmd);
  add_key_flag(ablate_cmd, "--train", "train_file", "prepared train split");
  add_key_flag(ablate_cmd, "--test", "test_file", "prepared test split");
  add_key_flag(ablate_cmd, "--out", "out_dir", "output directory");
  add_key_flag(ablate_cmd, "--seed", "seed", "root seed");
  add_key_flag(ablate_cmd, "--repeats", "repeats", "seed-varied repeats");

  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "verify analytic gradients by finite differences");
  std::uint64_t gradcheck_seed = 0;
  std::string corrupt;
  gradcheck_cmd->add_option("--seed", gradcheck_seed, "instance seed");
  gradcheck_cmd->add_option("--corrupt", corrupt,
                            "test hook: corrupt a component's gradient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(gradcheck_seed, corrupt);

    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const std::string& pair : overrides) cfg.set_pair(pair);
    for (const auto& [key, value] : sugar) cfg.set(key, value);

    if (prepare->parsed()) return cmd_prepare(cfg);
    if (train_cmd->parsed()) return cmd_train(cfg);
    if (evaluate_cmd->parsed()) return cmd_evaluate(cfg, checkpoint_path, groups);
    if (ablate_cmd->parsed()) return cmd_ablate(cfg);
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
