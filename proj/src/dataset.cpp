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
#include "vgcl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace vgcl {

namespace {

std::uint64_t pair_key(int user, int item) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(user)) << 32) |
         static_cast<std::uint32_t>(item);
}

}  // namespace

std::vector<std::vector<int>> InteractionTable::items_by_user() const {
  std::vector<std::vector<int>> out(user_count);
  for (const auto& [u, i] : pairs) out[u].push_back(i);
  return out;
}

std::vector<int> InteractionTable::user_degrees() const {
  std::vector<int> deg(user_count, 0);
  for (const auto& [u, i] : pairs) ++deg[u];
  return deg;
}

InteractionTable load_interactions(std::istream& in,
                                   std::optional<double> rating_threshold) {
  InteractionTable table;
  std::unordered_map<std::string, int> user_ids;
  std::unordered_map<std::string, int> item_ids;
  std::unordered_set<std::uint64_t> seen;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;

    std::istringstream tokens(line);
    std::string user_token, item_token, rating_token;
    if (!(tokens >> user_token >> item_token)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'user item [rating]', got '" + line + "'");
    }
    if (rating_threshold.has_value()) {
      if (!(tokens >> rating_token)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": rating threshold set but line has no rating column");
      }
      char* end = nullptr;
      const double rating = std::strtod(rating_token.c_str(), &end);
      if (end == rating_token.c_str() || *end != '\0') {
        throw ParseError("line " + std::to_string(line_no) +
                         ": malformed rating '" + rating_token + "'");
      }
      if (rating < *rating_threshold) continue;
    }

    auto [uit, user_is_new] = user_ids.try_emplace(user_token, table.user_count);
    if (user_is_new) ++table.user_count;
    auto [iit, item_is_new] = item_ids.try_emplace(item_token, table.item_count);
    if (item_is_new) ++table.item_count;

    if (seen.insert(pair_key(uit->second, iit->second)).second) {
      table.pairs.emplace_back(uit->second, iit->second);
    }
  }

  if (table.pairs.empty()) throw EmptyDatasetError("no interactions in input");
  return table;
}

InteractionTable load_interactions_file(const std::string& path,
                                        std::optional<double> rating_threshold) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open interaction file: " + path);
  return load_interactions(in, rating_threshold);
}

InteractionTable load_indexed_interactions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open interaction file: " + path);

  InteractionTable table;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream tokens(line);
    long user = -1, item = -1;
    if (!(tokens >> user >> item) || user < 0 || item < 0) {
      throw ParseError(path + " line " + std::to_string(line_no) +
                       ": expected two nonnegative integer indices");
    }
    table.user_count = std::max(table.user_count, static_cast<int>(user) + 1);
    table.item_count = std::max(table.item_count, static_cast<int>(item) + 1);
    if (seen.insert(pair_key(static_cast<int>(user), static_cast<int>(item))).second) {
      table.pairs.emplace_back(static_cast<int>(user), static_cast<int>(item));
    }
  }
  if (table.pairs.empty()) throw EmptyDatasetError("no interactions in " + path);
  return table;
}

SplitDataset load_split(const std::string& train_path, const std::string& test_path) {
  SplitDataset split;
  split.train = load_indexed_interactions(train_path);
  split.test = load_indexed_interactions(test_path);
  split.user_count = std::max(split.train.user_count, split.test.user_count);
  split.item_count = std::max(split.train.item_count, split.test.item_count);
  split.train.user_count = split.test.user_count = split.user_count;
  split.train.item_count = split.test.item_count = split.item_count;
  return split;
}

InteractionTable filter_min_interactions(const InteractionTable& table, int min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");

  std::vector<int> degree(table.user_count, 0);
  for (const auto& [u, i] : table.pairs) ++degree[u];

  std::vector<int> new_user(table.user_count, -1);
  int users = 0;
  for (int u = 0; u < table.user_count; ++u) {
    if (degree[u] >= min_count) new_user[u] = users++;
  }
  if (users == 0) throw EmptyDatasetError("all users below min interaction count");

  std::vector<char> item_alive(table.item_count, 0);
  for (const auto& [u, i] : table.pairs) {
    if (new_user[u] >= 0) item_alive[i] = 1;
  }
  std::vector<int> new_item(table.item_count, -1);
  int items = 0;
  for (int i = 0; i < table.item_count; ++i) {
    if (item_alive[i]) new_item[i] = items++;
  }

  InteractionTable out;
  out.user_count = users;
  out.item_count = items;
  out.pairs.reserve(table.pairs.size());
  for (const auto& [u, i] : table.pairs) {
    if (new_user[u] >= 0) out.pairs.emplace_back(new_user[u], new_item[i]);
  }
  return out;
}

SplitDataset split_holdout(const InteractionTable& table, double test_ratio,
                           std::uint64_t seed) {
  if (table.pairs.empty()) throw EmptyDatasetError("cannot split an empty table");
  if (!(test_ratio > 0.0 && test_ratio < 1.0)) {
    throw ConfigError("test_ratio must lie in (0, 1)");
  }

  const std::size_t n = table.pairs.size();
  const std::size_t n_test =
      static_cast<std::size_t>(std::llround(test_ratio * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RngStream rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {  // Fisher-Yates
    const std::size_t j = rng.next(i + 1);
    std::swap(order[i], order[j]);
  }

  SplitDataset split;
  split.user_count = table.user_count;
  split.item_count = table.item_count;
  split.train.user_count = split.test.user_count = table.user_count;
  split.train.item_count = split.test.item_count = table.item_count;
  for (std::size_t i = 0; i < n; ++i) {
    auto& dst = (i < n_test) ? split.test : split.train;
    dst.pairs.push_back(table.pairs[order[i]]);
  }
  auto by_user_item = [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
    return a < b;
  };
  std::sort(split.train.pairs.begin(), split.train.pairs.end(), by_user_item);
  std::sort(split.test.pairs.begin(), split.test.pairs.end(), by_user_item);
  return split;
}

NormalizedAdjacency build_graph(const InteractionTable& train) {
  if (train.pairs.empty()) throw EmptyDatasetError("cannot build graph from empty table");

  NormalizedAdjacency adj;
  adj.user_count = train.user_count;
  adj.item_count = train.item_count;
  adj.node_count = static_cast<Index>(train.user_count) + train.item_count;

  adj.degree.assign(adj.node_count, 0);
  for (const auto& [u, i] : train.pairs) {
    ++adj.degree[u];
    ++adj.degree[train.user_count + i];
  }

  adj.row_ptr.assign(adj.node_count + 1, 0);
  for (Index v = 0; v < adj.node_count; ++v) {
    adj.row_ptr[v + 1] = adj.row_ptr[v] + adj.degree[v];
  }
  const std::int64_t nnz = adj.row_ptr[adj.node_count];
  adj.col_index.resize(nnz);
  adj.value.resize(nnz);

  std::vector<std::int64_t> cursor(adj.row_ptr.begin(), adj.row_ptr.end() - 1);
  for (const auto& [u, i] : train.pairs) {
    const int item_node = train.user_count + i;
    // One value per undirected edge, written to both mirrored slots.
    const double v = 1.0 / std::sqrt(static_cast<double>(adj.degree[u]) *
                                     static_cast<double>(adj.degree[item_node]));
    adj.col_index[cursor[u]] = item_node;
    adj.value[cursor[u]++] = v;
    adj.col_index[cursor[item_node]] = u;
    adj.value[cursor[item_node]++] = v;
  }

  // Sort each row by column so traversal order is canonical.
  for (Index v = 0; v < adj.node_count; ++v) {
    const std::int64_t lo = adj.row_ptr[v], hi = adj.row_ptr[v + 1];
    std::vector<std::pair<int, double>> row;
    row.reserve(hi - lo);
    for (std::int64_t k = lo; k < hi; ++k) row.emplace_back(adj.col_index[k], adj.value[k]);
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::int64_t k = lo; k < hi; ++k) {
      adj.col_index[k] = row[k - lo].first;
      adj.value[k] = row[k - lo].second;
    }
  }
  return adj;
}

TripleSampler::TripleSampler(const InteractionTable& train) : train_(&train) {
  positives_.resize(train.user_count);
  for (const auto& [u, i] : train.pairs) positives_[u].insert(i);
}

std::vector<TrainingTriple> TripleSampler::sample(int batch_size, RngStream& rng) const {
  const auto& pairs = train_->pairs;
  const int n_items = train_->item_count;
  std::vector<TrainingTriple> out;
  out.reserve(batch_size);
  for (int b = 0; b < batch_size; ++b) {
    const auto& [user, pos] = pairs[rng.next(pairs.size())];
    const auto& owned = positives_[user];
    if (static_cast<int>(owned.size()) >= n_items) {
      throw NoNegativeAvailableError("user " + std::to_string(user) +
                                     " has interacted with every item");
    }
    int neg;
    do {
      neg = static_cast<int>(rng.next(n_items));
    } while (owned.count(neg) != 0);
    out.push_back({user, pos, neg});
  }
  return out;
}

void save_interactions(const std::string& path, const InteractionTable& table) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write interaction file: " + path);
  for (const auto& [u, i] : table.pairs) out << u << ' ' << i << '\n';
}

void save_split_manifest(const std::string& path, const SplitDataset& split,
                         std::uint64_t seed, double test_ratio) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write manifest file: " + path);
  out << "seed=" << seed << '\n';
  out << "test_ratio=" << test_ratio << '\n';
  out << "users=" << split.user_count << '\n';
  out << "items=" << split.item_count << '\n';
  out << "train_pairs=" << split.train.pairs.size() << '\n';
  out << "test_pairs=" << split.test.pairs.size() << '\n';
}

}  // namespace vgcl
