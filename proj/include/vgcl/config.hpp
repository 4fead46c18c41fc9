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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vgcl/trainer.hpp"

namespace vgcl {

// Flat key=value run configuration. Every key has a documented default;
// unknown keys are rejected; the effective config echoes byte-identically to
// what a re-run would parse.
class RunConfig {
 public:
  struct KeySpec {
    std::string default_value;
    std::string doc;
  };

  RunConfig();  // all defaults

  static const std::map<std::string, KeySpec>& registry();

  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  void set_pair(const std::string& key_equals_value);

  const std::string& get(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<int> get_int_list(const std::string& key) const;
  bool is_empty(const std::string& key) const { return get(key).empty(); }

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Builds and validates the training configuration from the current keys.
  TrainConfig to_train_config() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace vgcl
