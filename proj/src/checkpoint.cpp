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
#include "vgcl/checkpoint.hpp"

#include <fstream>
#include <sstream>

namespace vgcl {

namespace {

constexpr const char* kMagic = "VGCLCKPT";

void write_block(std::ofstream& out, const double* data, std::streamsize count) {
  out.write(reinterpret_cast<const char*>(data), count * static_cast<std::streamsize>(sizeof(double)));
}

void read_block(std::ifstream& in, double* data, std::streamsize count) {
  in.read(reinterpret_cast<char*>(data), count * static_cast<std::streamsize>(sizeof(double)));
  if (!in) throw ParseError("checkpoint: truncated matrix data");
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params,
                     const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write checkpoint: " + path);
  out << kMagic << ' ' << meta.version << '\n';
  out << "dim=" << meta.dim << '\n';
  out << "users=" << meta.users << '\n';
  out << "items=" << meta.items << '\n';
  out << "layers=" << meta.layers << '\n';
  out << "matrix embeddings " << params.embeddings.rows() << ' '
      << params.embeddings.cols() << '\n';
  out << "matrix variance_weight " << params.variance_weight.rows() << ' '
      << params.variance_weight.cols() << '\n';
  out << "matrix variance_bias 1 " << params.variance_bias.cols() << '\n';
  out << "data\n";
  write_block(out, params.embeddings.data(), params.embeddings.size());
  write_block(out, params.variance_weight.data(), params.variance_weight.size());
  write_block(out, params.variance_bias.data(), params.variance_bias.size());
  if (!out) throw ParseError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint: " + path);

  Checkpoint ckpt;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("checkpoint: empty file");
  {
    std::istringstream head(line);
    std::string magic;
    head >> magic >> ckpt.meta.version;
    if (magic != kMagic) throw ParseError("checkpoint: bad magic in " + path);
    if (ckpt.meta.version != 1) {
      throw ParseError("checkpoint: unsupported version " +
                       std::to_string(ckpt.meta.version));
    }
  }

  struct Shape {
    std::string name;
    Index rows = 0, cols = 0;
  };
  std::vector<Shape> shapes;
  while (std::getline(in, line)) {
    if (line == "data") break;
    if (line.rfind("matrix ", 0) == 0) {
      std::istringstream row(line);
      std::string tag;
      Shape s;
      row >> tag >> s.name >> s.rows >> s.cols;
      if (!row) throw ParseError("checkpoint: malformed matrix line '" + line + "'");
      shapes.push_back(s);
    } else {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError("checkpoint: malformed header line");
      const std::string key = line.substr(0, eq);
      const int value = std::stoi(line.substr(eq + 1));
      if (key == "dim") ckpt.meta.dim = value;
      else if (key == "users") ckpt.meta.users = value;
      else if (key == "items") ckpt.meta.items = value;
      else if (key == "layers") ckpt.meta.layers = value;
      else throw ParseError("checkpoint: unknown header key '" + key + "'");
    }
  }

  for (const auto& s : shapes) {
    if (s.name == "embeddings") {
      ckpt.params.embeddings.resize(s.rows, s.cols);
      read_block(in, ckpt.params.embeddings.data(), ckpt.params.embeddings.size());
    } else if (s.name == "variance_weight") {
      ckpt.params.variance_weight.resize(s.rows, s.cols);
      read_block(in, ckpt.params.variance_weight.data(), ckpt.params.variance_weight.size());
    } else if (s.name == "variance_bias") {
      ckpt.params.variance_bias.resize(s.cols);
      read_block(in, ckpt.params.variance_bias.data(), ckpt.params.variance_bias.size());
    } else {
      throw ParseError("checkpoint: unknown matrix '" + s.name + "'");
    }
  }
  return ckpt;
}

}  // namespace vgcl
