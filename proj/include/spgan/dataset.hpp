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

#ifndef SPGAN_DATASET_HPP
#define SPGAN_DATASET_HPP

#include "spgan/cloud_io.hpp"
#include "spgan/pointcloud.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace spgan {

inline constexpr const char* kDatasetManifest = "manifest.txt";

inline bool is_cloud_file(const std::filesystem::path& p) {
  const auto ext = p.extension();
  return ext == ".xyz" || ext == ".txt" || ext == ".pcf";
}

/// Cloud files directly inside `dir`, sorted by file name.
inline std::vector<std::filesystem::path> list_cloud_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InvalidArgument("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_cloud_file(entry.path()) &&
        entry.path().filename() != kDatasetManifest) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Loads every cloud in `dir` in file-name order.
inline std::vector<PointCloud> load_dataset(const std::filesystem::path& dir) {
  std::vector<PointCloud> clouds;
  for (const auto& f : list_cloud_files(dir)) clouds.push_back(read_cloud(f));
  if (clouds.empty()) throw InvalidArgument("no point clouds found in " + dir.string());
  return clouds;
}

inline std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Uniform sample of `n` rows without replacement; the kept rows stay in
/// their original order.
inline PointCloud subsample(const PointCloud& pc, std::size_t n, std::uint64_t seed) {
  if (pc.size() < n) {
    throw InvalidArgument("cloud has " + std::to_string(pc.size()) + " points, need " +
                          std::to_string(n));
  }
  std::vector<std::size_t> idx(pc.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  return select_rows(pc, idx);
}

struct PrepareReport {
  std::vector<std::string> written;  // output file names
  std::vector<std::string> errors;   // "<file>: <reason>"
};

/// Subsamples every readable cloud in `in_dir` to `n_points`, normalizes it
/// into the unit sphere, and writes `<stem>.pcf` files plus a manifest to
/// `out_dir`. Per-file failures are collected, not thrown.
inline PrepareReport prepare_dataset(const std::filesystem::path& in_dir,
                                     const std::filesystem::path& out_dir, std::size_t n_points,
                                     std::uint64_t seed) {
  PrepareReport report;
  const auto files = list_cloud_files(in_dir);
  std::filesystem::create_directories(out_dir);
  std::string manifest = "# file points source\n";
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    try {
      const PointCloud raw = read_cloud(f);
      const auto s = derive_seed(seed, streams::kSubsample, name_hash(name));
      const PointCloud cloud = normalize_to_unit_sphere(subsample(raw, n_points, s));
      const std::string out_name = f.stem().string() + ".pcf";
      write_cloud(cloud, out_dir / out_name, CloudFormat::F32Binary);
      report.written.push_back(out_name);
      manifest += out_name + " " + std::to_string(n_points) + " " + name + "\n";
    } catch (const std::exception& e) {
      report.errors.push_back(f.string() + ": " + e.what());
    }
  }
  std::ofstream(out_dir / kDatasetManifest, std::ios::trunc) << manifest;
  return report;
}

}  // namespace spgan

#endif  // SPGAN_DATASET_HPP
