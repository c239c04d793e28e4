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

#ifndef SPGAN_CONFIG_HPP
#define SPGAN_CONFIG_HPP

#include "spgan/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace spgan {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Flat `key = value` file; '#' starts a comment line. Keys are kept in file
/// order so callers can report the first offending line.
struct KeyValueFile {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };
  std::vector<Entry> entries;
  std::string origin;
};

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline KeyValueFile parse_key_values(std::string_view text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin = origin;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    for (const auto& e : kv.entries) {
      if (e.key == key) {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                          std::string(key) + "'");
      }
    }
    kv.entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
  }
  return kv;
}

inline KeyValueFile read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str(), path.string());
}

/// Every knob of a run.
struct RunConfig {
  std::size_t n_points = 2048;
  std::size_t latent_dim = 128;
  std::size_t k_centroids = 64;
  double beta = 1.0;
  TargetMode target_mode = TargetMode::Standard;
  double learning_rate = 1e-4;
  std::size_t epochs = 100;
  std::uint64_t steps = 0;  // nonzero overrides epochs
  std::uint64_t seed = 0;
  std::size_t grid_resolution = 28;
  std::size_t hidden_width = 64;
  bool vanilla = false;
  std::string dataset_dir;
  std::string output_dir;
  CentroidLayout centroid_layout = CentroidLayout::Replicate;
  std::size_t eval_samples = 1000;
  std::uint64_t checkpoint_every = 0;
  std::size_t kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;
  std::string feature_weights;  // optional checkpoint dir with f.layer* tensors

  /// Sets one field from its textual value. Unknown keys are errors.
  void set(const std::string& key, const std::string& value);

  void validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
      throw ConfigError("config field '" + field + "': " + why);
    };
    if (n_points == 0) bad("n_points", "must be >= 1");
    if (latent_dim == 0) bad("latent_dim", "must be >= 1");
    if (hidden_width == 0) bad("hidden_width", "must be >= 1");
    if (!vanilla && (k_centroids == 0 || n_points % k_centroids != 0)) {
      bad("k_centroids", std::to_string(k_centroids) + " does not divide n_points=" +
                             std::to_string(n_points));
    }
    if (!(beta > 0.0)) bad("beta", "must be > 0");
    if (!(learning_rate >= 0.0)) bad("learning_rate", "must be >= 0");
    if (grid_resolution < 2) bad("grid_resolution", "must be >= 2");
    if (eval_samples < 2) bad("eval_samples", "must be >= 2");
    if (kmeans_max_iters == 0) bad("kmeans_max_iters", "must be >= 1");
    if (!(kmeans_tol >= 0.0)) bad("kmeans_tol", "must be >= 0");
  }

  /// Canonical `key = value` text of every field, in a fixed order.
  std::string serialize() const {
    std::ostringstream os;
    char num[64];
    auto real = [&num](double v) {
      std::snprintf(num, sizeof num, "%.17g", v);
      return std::string(num);
    };
    os << "n_points = " << n_points << '\n'
       << "latent_dim = " << latent_dim << '\n'
       << "k_centroids = " << k_centroids << '\n'
       << "beta = " << real(beta) << '\n'
       << "target_mode = " << to_string(target_mode) << '\n'
       << "learning_rate = " << real(learning_rate) << '\n'
       << "epochs = " << epochs << '\n'
       << "steps = " << steps << '\n'
       << "seed = " << seed << '\n'
       << "grid_resolution = " << grid_resolution << '\n'
       << "hidden_width = " << hidden_width << '\n'
       << "vanilla = " << (vanilla ? "true" : "false") << '\n'
       << "centroid_layout = "
       << (centroid_layout == CentroidLayout::Replicate ? "replicate" : "tile") << '\n'
       << "eval_samples = " << eval_samples << '\n'
       << "checkpoint_every = " << checkpoint_every << '\n'
       << "kmeans_max_iters = " << kmeans_max_iters << '\n'
       << "kmeans_tol = " << real(kmeans_tol) << '\n'
       << "feature_weights = " << feature_weights << '\n'
       << "dataset_dir = " << dataset_dir << '\n'
       << "output_dir = " << output_dir << '\n';
    return os.str();
  }

  /// FNV-1a over the serialized fields, excluding the two directory paths.
  std::string hash() const {
    RunConfig c = *this;
    c.dataset_dir.clear();
    c.output_dir.clear();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : c.serialize()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  TrainOptions train_options() const {
    TrainOptions o;
    o.shape = {latent_dim, hidden_width, vanilla};
    o.n_points = n_points;
    o.k = k_centroids;
    o.layout = centroid_layout;
    o.loss = {beta, target_mode};
    o.adam.learning_rate = learning_rate;
    o.kmeans = {kmeans_max_iters, kmeans_tol};
    o.seed = seed;
    return o;
  }

  RunLength run_length() const { return {epochs, steps}; }
};

namespace detail {

template <typename Int>
Int parse_unsigned(const std::string& key, const std::string& value) {
  Int out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config field '" + key + "': expected a nonnegative integer, got '" +
                      value + "'");
  }
  return out;
}

inline double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!parse_double(value, out) || !std::isfinite(out)) {
    throw ConfigError("config field '" + key + "': expected a finite number, got '" + value + "'");
  }
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config field '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_real;
  using detail::parse_unsigned;
  if (key == "n_points") n_points = parse_unsigned<std::size_t>(key, value);
  else if (key == "latent_dim") latent_dim = parse_unsigned<std::size_t>(key, value);
  else if (key == "k_centroids") k_centroids = parse_unsigned<std::size_t>(key, value);
  else if (key == "beta") beta = parse_real(key, value);
  else if (key == "target_mode") {
    try {
      target_mode = parse_target_mode(value);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config field 'target_mode': ") + e.what());
    }
  } else if (key == "learning_rate") learning_rate = parse_real(key, value);
  else if (key == "epochs") epochs = parse_unsigned<std::size_t>(key, value);
  else if (key == "steps") steps = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "seed") seed = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "grid_resolution") grid_resolution = parse_unsigned<std::size_t>(key, value);
  else if (key == "hidden_width") hidden_width = parse_unsigned<std::size_t>(key, value);
  else if (key == "vanilla") vanilla = parse_bool(key, value);
  else if (key == "dataset_dir") dataset_dir = value;
  else if (key == "output_dir") output_dir = value;
  else if (key == "centroid_layout") {
    if (value == "replicate") centroid_layout = CentroidLayout::Replicate;
    else if (value == "tile") centroid_layout = CentroidLayout::Tile;
    else throw ConfigError("config field 'centroid_layout': expected replicate or tile");
  } else if (key == "eval_samples") eval_samples = parse_unsigned<std::size_t>(key, value);
  else if (key == "checkpoint_every") checkpoint_every = parse_unsigned<std::uint64_t>(key, value);
  else if (key == "kmeans_max_iters") kmeans_max_iters = parse_unsigned<std::size_t>(key, value);
  else if (key == "kmeans_tol") kmeans_tol = parse_real(key, value);
  else if (key == "feature_weights") feature_weights = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

/// Builds a RunConfig from a parsed file, attributing errors to their line.
/// Keys listed in `extra_keys` are skipped so callers can layer their own.
inline RunConfig run_config_from(const KeyValueFile& kv,
                                 const std::vector<std::string>& extra_keys = {}) {
  RunConfig cfg;
  for (const auto& e : kv.entries) {
    if (std::find(extra_keys.begin(), extra_keys.end(), e.key) != extra_keys.end()) continue;
    try {
      cfg.set(e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(kv.origin + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from(read_key_values(path));
}

}  // namespace spgan

#endif  // SPGAN_CONFIG_HPP
