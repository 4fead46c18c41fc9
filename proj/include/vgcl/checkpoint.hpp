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

#include <string>

#include "vgcl/encoder.hpp"

namespace vgcl {

struct CheckpointMeta {
  int version = 1;
  int dim = 0;
  int users = 0;
  int items = 0;
  int layers = 0;
};

struct Checkpoint {
  CheckpointMeta meta;
  ModelParams params;
};

// Versioned container: text header (magic, version, shape metadata, matrix
// directory) followed by raw little-endian doubles. Byte-stable for identical
// inputs.
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const CheckpointMeta& meta);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace vgcl
