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
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vgcl/config.hpp"

using namespace vgcl;

TEST_SUITE("config") {

TEST_CASE("every key carries a default and a doc line") {
  const RunConfig cfg;
  for (const auto& [key, spec] : RunConfig::registry()) {
    CHECK(cfg.get(key) == spec.default_value);
    CHECK_FALSE(spec.doc.empty());
  }
}

TEST_CASE("unknown keys are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.set_pair("alsonot=1"), ConfigError);
  CHECK_THROWS_AS(cfg.set_pair("missing-equals"), ConfigError);
}

TEST_CASE("the effective-config echo round-trips byte for byte") {
  RunConfig cfg;
  cfg.set("alpha", "0.35");
  cfg.set("variant", "vgcl_wo_c");
  cfg.set("gamma", "0");
  cfg.set("eval_cutoffs", "5,10,20");

  std::ostringstream first;
  cfg.write(first);

  const std::string path = "test_config_echo.txt";
  cfg.write_file(path);
  RunConfig reparsed;
  reparsed.load_file(path);
  std::remove(path.c_str());

  std::ostringstream second;
  reparsed.write(second);
  CHECK(first.str() == second.str());
  CHECK(reparsed.values() == cfg.values());
}

TEST_CASE("config files support comments and reject junk") {
  const std::string path = "test_config_parse.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "alpha=0.5\n";
    out << "\n";
    out << "epochs=25\n";
  }
  RunConfig cfg;
  cfg.load_file(path);
  std::remove(path.c_str());
  CHECK(cfg.get_double("alpha") == 0.5);
  CHECK(cfg.get_int("epochs") == 25);

  const std::string bad_path = "test_config_bad.txt";
  {
    std::ofstream out(bad_path);
    out << "alpha 0.5\n";
  }
  RunConfig bad;
  CHECK_THROWS_AS(bad.load_file(bad_path), ConfigError);
  std::remove(bad_path.c_str());
}

TEST_CASE("typed getters validate their input") {
  RunConfig cfg;
  cfg.set("epochs", "abc");
  CHECK_THROWS_AS(cfg.get_int("epochs"), ConfigError);
  cfg.set("mean_reduction", "yes");
  CHECK_THROWS_AS(cfg.get_bool("mean_reduction"), ConfigError);
  cfg.set("eval_cutoffs", "10,x");
  CHECK_THROWS_AS(cfg.get_int_list("eval_cutoffs"), ConfigError);
}

TEST_CASE("train config construction enforces variant conflicts") {
  RunConfig cfg;
  cfg.set("variant", "lightgcn");
  cfg.set("alpha", "0.2");
  CHECK_THROWS_AS(cfg.to_train_config(), ConfigError);

  cfg.set("alpha", "0");
  cfg.set("kl_weight", "0");
  const TrainConfig ok = cfg.to_train_config();
  CHECK(ok.variant == Variant::kLightGcn);
  CHECK(ok.dim == 64);

  RunConfig soft;
  soft.set("cluster_mode", "soft");
  soft.set("soft_temperature", "0.5");
  CHECK(soft.to_train_config().cluster_mode == AssignMode::kSoft);
  soft.set("cluster_mode", "fuzzy");
  CHECK_THROWS_AS(soft.to_train_config(), ConfigError);
}

}  // TEST_SUITE
