// Copyright 2026 The spgan-prior Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPGAN_CHECKPOINT_HPP
#define SPGAN_CHECKPOINT_HPP

#include "spgan/cloud_io.hpp"
#include "spgan/nets.hpp"

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace spgan {

// On disk a checkpoint is a directory holding
//   manifest.txt   "spgan-checkpoint 1", then `meta <key> <value>` and
//                  `tensor <name> <rows> <cols> <byte offset>` lines
//   tensors.bin    row-major little-endian float32 data for every tensor
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<NamedTensor<float>> tensors;

  const std::string& meta_value(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) throw ParseError("checkpoint: missing meta key '" + key + "'");
    return it->second;
  }

  const NamedTensor<float>* find(const std::string& name) const {
    for (const auto& t : tensors) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }
};

inline constexpr const char* kManifestName = "manifest.txt";
inline constexpr const char* kBlobName = "tensors.bin";

inline void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream manifest;
  manifest << "spgan-checkpoint 1\n";
  for (const auto& [k, v] : ckpt.meta) {
    if (k.find_first_of(" \t\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw InvalidArgument("checkpoint meta entries must be single tokens: " + k);
    }
    manifest << "meta " << k << ' ' << v << '\n';
  }
  std::size_t total = 0;
  for (const auto& t : ckpt.tensors) total += static_cast<std::size_t>(t.value.size());
  std::vector<unsigned char> blob(total * 4);
  std::size_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    manifest << "tensor " << t.name << ' ' << t.value.rows() << ' ' << t.value.cols() << ' '
             << offset << '\n';
    const float* data = t.value.data();
    for (Eigen::Index i = 0; i < t.value.size(); ++i, offset += 4) {
      detail::store_f32le(data[i], blob.data() + offset);
    }
  }
  detail::write_bytes(dir / kBlobName, blob);
  std::ofstream out(dir / kManifestName, std::ios::trunc);
  if (!out) throw ParseError("cannot write checkpoint manifest in " + dir.string());
  out << manifest.str();
}

inline Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open " + manifest_path.string());
  const std::vector<unsigned char> blob = detail::read_bytes(dir / kBlobName);
  Checkpoint ckpt;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError(manifest_path.string() + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    fields >> kind;
    if (line_no == 1) {
      int version = 0;
      fields >> version;
      if (kind != "spgan-checkpoint" || version != 1) fail("not a version 1 checkpoint");
      continue;
    }
    if (kind == "meta") {
      std::string key, value;
      if (!(fields >> key >> value)) fail("malformed meta line");
      ckpt.meta[key] = value;
    } else if (kind == "tensor") {
      std::string name;
      long long rows = -1, cols = -1;
      std::size_t offset = 0;
      if (!(fields >> name >> rows >> cols >> offset) || rows < 0 || cols < 0) {
        fail("malformed tensor line");
      }
      const auto count = static_cast<std::size_t>(rows * cols);
      if (offset % 4 != 0 || offset + count * 4 > blob.size()) {
        fail("tensor '" + name + "' exceeds blob bounds");
      }
      Matrix<float> value(rows, cols);
      float* data = value.data();
      for (std::size_t i = 0; i < count; ++i) {
        data[i] = detail::load_f32le(blob.data() + offset + 4 * i);
      }
      ckpt.tensors.push_back({name, std::move(value)});
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  if (line_no == 0) throw ParseError(manifest_path.string() + ": empty manifest");
  return ckpt;
}

inline void append_tensors(Checkpoint& ckpt, const ParamSet<float>& set,
                           const std::string& prefix = "") {
  for (const auto& t : set.tensors()) ckpt.tensors.push_back({prefix + t.name, t.value});
}

/// Copies tensors named `prefix + name` into `set`, checking shapes.
inline void restore_tensors(const Checkpoint& ckpt, ParamSet<float>& set,
                            const std::string& prefix = "") {
  for (auto& t : set.tensors()) {
    const auto* src = ckpt.find(prefix + t.name);
    if (src == nullptr) throw ParseError("checkpoint: missing tensor " + prefix + t.name);
    if (src->value.rows() != t.value.rows() || src->value.cols() != t.value.cols()) {
      throw InvalidArgument("checkpoint: tensor " + prefix + t.name + " has shape " +
                            std::to_string(src->value.rows()) + "x" +
                            std::to_string(src->value.cols()) + ", expected " +
                            std::to_string(t.value.rows()) + "x" +
                            std::to_string(t.value.cols()));
    }
    t.value = src->value;
  }
}

inline void write_model_meta(Checkpoint& ckpt, const NetShape& shape) {
  ckpt.meta["latent_dim"] = std::to_string(shape.latent_dim);
  ckpt.meta["hidden"] = std::to_string(shape.hidden);
  ckpt.meta["vanilla"] = shape.vanilla ? "1" : "0";
  ckpt.meta["generator_input_width"] = std::to_string(shape.generator_input_width());
}

inline NetShape read_model_meta(const Checkpoint& ckpt) {
  NetShape shape;
  try {
    shape.latent_dim = std::stoul(ckpt.meta_value("latent_dim"));
    shape.hidden = std::stoul(ckpt.meta_value("hidden"));
    shape.vanilla = ckpt.meta_value("vanilla") == "1";
  } catch (const std::logic_error&) {
    throw ParseError("checkpoint: malformed model meta");
  }
  return shape;
}

inline Checkpoint params_checkpoint(const ModelParams<float>& params) {
  Checkpoint ckpt;
  write_model_meta(ckpt, params.shape);
  append_tensors(ckpt, params.generator);
  append_tensors(ckpt, params.discriminator);
  return ckpt;
}

inline ModelParams<float> params_from_checkpoint(const Checkpoint& ckpt) {
  auto params = allocate_params<float>(read_model_meta(ckpt));
  restore_tensors(ckpt, params.generator);
  restore_tensors(ckpt, params.discriminator);
  return params;
}

}  // namespace spgan

#endif  // SPGAN_CHECKPOINT_HPP
