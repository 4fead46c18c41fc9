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
#include "vgcl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vgcl {

const std::map<std::string, RunConfig::KeySpec>& RunConfig::registry() {
  static const std::map<std::string, KeySpec> keys = {
      {"variant", {"vgcl", "model variant: vgcl|vgcl_wo_c|vgcl_wo_v|lightgcn"}},
      {"d", {"64", "embedding size"}},
      {"layers", {"2", "graph propagation layers"}},
      {"lr", {"0.001", "Adam learning rate"}},
      {"batch_size", {"2048", "training triples per batch"}},
      {"epochs", {"100", "training epochs"}},
      {"seed", {"0", "root seed; all substreams derive from it"}},
      {"k_users", {"100", "user prototype count"}},
      {"k_items", {"100", "item prototype count"}},
      {"eps_amplitude", {"0.1", "feature-augmentation noise scale (vgcl_wo_v)"}},
      {"init_std", {"0.01", "parameter init scale"}},
      {"init_std_is_variance", {"false", "read init_std as a variance"}},
      {"eval_every", {"10", "epochs between evaluations; 0 disables"}},
      {"early_stop_patience", {"50", "evaluations without NDCG@20 improvement"}},
      {"alpha", {"0.2", "contrastive task weight"}},
      {"gamma", {"0.4", "cluster-level weight inside the contrastive task"}},
      {"lambda", {"0.0001", "L2 regularization on embeddings"}},
      {"tau1", {"0.2", "node-level contrastive temperature"}},
      {"tau2", {"0.15", "cluster-level contrastive temperature"}},
      {"kl_weight", {"1.0", "weight on the KL term"}},
      {"mean_reduction", {"false", "mean losses over the batch instead of sums"}},
      {"include_layer0", {"false", "include layer 0 in the mean readout"}},
      {"cluster_mode", {"hard", "prototype assignment: hard|soft"}},
      {"soft_temperature", {"1.0", "softmax temperature for soft assignments"}},
      {"cluster_refresh_per_batch", {"false", "refresh prototypes every batch"}},
      {"dump_clusters", {"false", "write centroids + size histograms after training"}},
      {"kmeans_max_iters", {"100", "Lloyd iteration cap"}},
      {"kmeans_tol", {"1e-06", "centroid shift stopping tolerance"}},
      {"eval_cutoffs", {"10,20", "ranking cutoffs, comma separated"}},
      {"repeats", {"1", "repeated runs with varied seeds"}},
      {"resplit_per_repeat", {"false", "re-split from input_file on every repeat"}},
      {"min_interactions", {"10", "minimum interactions per user (prepare)"}},
      {"test_ratio", {"0.2", "holdout fraction (prepare)"}},
      {"rating_threshold", {"", "keep rows with rating >= value; empty disables"}},
      {"input_file", {"", "raw interaction file (prepare / resplit)"}},
      {"train_file", {"", "prepared train split"}},
      {"test_file", {"", "prepared test split"}},
      {"out_dir", {"out", "output directory"}},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& [key, spec] : registry()) values_[key] = spec.default_value;
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=', start);
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    }
    std::string key = line.substr(start, eq - start);
    std::string value = line.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    while (!value.empty() && (value.back() == '\r' || value.back() == ' ')) value.pop_back();
    set(key, value);
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (registry().find(key) == registry().end()) {
    throw ConfigError("unknown config key: " + key);
  }
  values_[key] = value;
}

void RunConfig::set_pair(const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("expected key=value, got '" + key_equals_value + "'");
  }
  set(key_equals_value.substr(0, eq), key_equals_value.substr(eq + 1));
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

int RunConfig::get_int(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const long value = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "': expected integer, got '" + v + "'");
  }
  return static_cast<int>(value);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const unsigned long long value = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "': expected unsigned integer, got '" + v + "'");
  }
  return value;
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  const double value = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError("key '" + key + "': expected number, got '" + v + "'");
  }
  return value;
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<int> RunConfig::get_int_list(const std::string& key) const {
  const std::string& v = get(key);
  std::vector<int> out;
  std::istringstream in(v);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    char* end = nullptr;
    const long value = std::strtol(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
      throw ConfigError("key '" + key + "': expected integer list, got '" + v + "'");
    }
    out.push_back(static_cast<int>(value));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

void RunConfig::write(std::ostream& out) const {
  for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
}

void RunConfig::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config echo: " + path);
  write(out);
}

TrainConfig RunConfig::to_train_config() const {
  TrainConfig cfg;
  cfg.dim = get_int("d");
  cfg.layers = get_int("layers");
  cfg.learning_rate = get_double("lr");
  cfg.batch_size = get_int("batch_size");
  cfg.epochs = get_int("epochs");
  cfg.seed = get_u64("seed");
  cfg.variant = parse_variant(get("variant"));
  cfg.cluster_count_users = get_int("k_users");
  cfg.cluster_count_items = get_int("k_items");
  cfg.eps_amplitude = get_double("eps_amplitude");
  cfg.init_std = get_double("init_std");
  cfg.init_std_is_variance = get_bool("init_std_is_variance");
  cfg.eval_every = get_int("eval_every");
  cfg.early_stop_patience = get_int("early_stop_patience");
  cfg.loss.alpha = get_double("alpha");
  cfg.loss.gamma = get_double("gamma");
  cfg.loss.lambda = get_double("lambda");
  cfg.loss.tau1 = get_double("tau1");
  cfg.loss.tau2 = get_double("tau2");
  cfg.loss.kl_weight = get_double("kl_weight");
  cfg.loss.mean_reduction = get_bool("mean_reduction");
  cfg.include_layer0 = get_bool("include_layer0");
  const std::string mode = get("cluster_mode");
  if (mode == "hard") {
    cfg.cluster_mode = AssignMode::kHard;
  } else if (mode == "soft") {
    cfg.cluster_mode = AssignMode::kSoft;
  } else {
    throw ConfigError("cluster_mode must be hard or soft, got '" + mode + "'");
  }
  cfg.soft_temperature = get_double("soft_temperature");
  cfg.cluster_refresh_per_batch = get_bool("cluster_refresh_per_batch");
  cfg.kmeans_max_iters = get_int("kmeans_max_iters");
  cfg.kmeans_tol = get_double("kmeans_tol");
  cfg.eval_cutoffs = get_int_list("eval_cutoffs");
  cfg.validate();
  return cfg;
}

}  // namespace vgcl
