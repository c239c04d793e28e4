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

#ifndef SPGAN_PRIOR_HPP
#define SPGAN_PRIOR_HPP

#include "spgan/kmeans.hpp"
#include "spgan/pointcloud.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace spgan {

// Replicate: [c0 x N/K, c1 x N/K, ...]. Tile: [c0..cK-1] repeated N/K times.
enum class CentroidLayout { Replicate, Tile };

/// The topological prior: K centroids expanded to N rows.
struct CentroidBlock {
  MatrixXd rows;  // N x 3
  std::size_t k = 0;
  std::size_t replication = 0;
};

/// Generator input. Columns: [sphere(3) | latent(d) | block(3)], or
/// [sphere | latent] when `has_block` is false (vanilla layout).
struct PriorLatentMatrix {
  MatrixXd data;
  std::size_t n = 0;
  std::size_t latent_dim = 0;
  bool has_block = true;

  std::size_t width() const { return static_cast<std::size_t>(data.cols()); }
  auto sphere() const { return data.leftCols(3); }
  auto latent() const { return data.middleCols(3, static_cast<Eigen::Index>(latent_dim)); }
  auto block() const { return data.rightCols(3); }
};

inline std::size_t prior_width(std::size_t latent_dim, bool has_block) {
  return 3 + latent_dim + (has_block ? 3 : 0);
}

/// Expands K centroids into an N x 3 block. `source_transform` is the
/// normalization that was applied to the cloud the centroids came from; it is
/// reapplied to the centroids as-is rather than refit.
inline CentroidBlock build_centroid_block(const MatrixXd& centroids, std::size_t n,
                                          const SimilarityTransform& source_transform = {},
                                          CentroidLayout layout = CentroidLayout::Replicate) {
  const auto k = static_cast<std::size_t>(centroids.rows());
  if (centroids.cols() != 3) throw InvalidArgument("centroids must be K x 3");
  if (k == 0 || n == 0 || n % k != 0) {
    throw InvalidArgument("centroid count K=" + std::to_string(k) +
                          " does not divide N=" + std::to_string(n));
  }
  const MatrixXd c = source_transform.apply(centroids);
  CentroidBlock block;
  block.k = k;
  block.replication = n / k;
  block.rows.resize(static_cast<Eigen::Index>(n), 3);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = layout == CentroidLayout::Replicate ? i / block.replication : i % k;
    block.rows.row(static_cast<Eigen::Index>(i)) = c.row(static_cast<Eigen::Index>(src));
  }
  return block;
}

/// Centroid block for a (normalized) reference cloud. K == N uses the
/// reference points themselves, in their stored order: each point is its own
/// cluster.
inline CentroidBlock reference_centroid_block(const PointCloud& reference, std::size_t k,
                                              std::uint64_t seed,
                                              const KMeansOptions& opts = {},
                                              CentroidLayout layout = CentroidLayout::Replicate) {
  const std::size_t n = reference.size();
  if (k == 0 || n % k != 0) {
    throw InvalidArgument("centroid count K=" + std::to_string(k) +
                          " does not divide N=" + std::to_string(n));
  }
  if (k == n) return build_centroid_block(reference.points(), n, {}, layout);
  return build_centroid_block(kmeans(reference, k, seed, opts).centroids, n, {}, layout);
}

namespace detail {

inline MatrixXd standard_normal_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd z(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = normal(rng);
  }
  return z;
}

inline PriorLatentMatrix assemble(const SpherePrior& sphere, std::size_t latent_dim,
                                  const MatrixXd* block, std::uint64_t seed) {
  if (latent_dim == 0) throw InvalidArgument("latent_dim must be >= 1");
  const std::size_t n = sphere.size();
  if (block != nullptr && static_cast<std::size_t>(block->rows()) != n) {
    throw InvalidArgument("prior size mismatch: sphere has " + std::to_string(n) +
                          " rows, block has " + std::to_string(block->rows()));
  }
  PriorLatentMatrix prior;
  prior.n = n;
  prior.latent_dim = latent_dim;
  prior.has_block = block != nullptr;
  prior.data.resize(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(prior_width(latent_dim, prior.has_block)));
  prior.data.leftCols(3) = sphere.points;
  prior.data.middleCols(3, static_cast<Eigen::Index>(latent_dim)) =
      standard_normal_matrix(n, latent_dim, seed);
  if (block != nullptr) prior.data.rightCols(3) = *block;
  return prior;
}

}  // namespace detail

/// [S | Z | C] with Z ~ N(0, 1) drawn from `seed`.
inline PriorLatentMatrix assemble_training_prior(const SpherePrior& sphere, std::size_t latent_dim,
                                                 const CentroidBlock& block, std::uint64_t seed) {
  return detail::assemble(sphere, latent_dim, &block.rows, seed);
}

/// [S | Z]: the prior without a topological block.
inline PriorLatentMatrix assemble_vanilla_prior(const SpherePrior& sphere, std::size_t latent_dim,
                                                std::uint64_t seed) {
  return detail::assemble(sphere, latent_dim, nullptr, seed);
}

/// [S | Z | S]: at generation time the sphere stands in for the block.
inline PriorLatentMatrix assemble_eval_prior(const SpherePrior& sphere, std::size_t latent_dim,
                                             std::uint64_t seed) {
  return detail::assemble(sphere, latent_dim, &sphere.points, seed);
}

}  // namespace spgan

#endif  // SPGAN_PRIOR_HPP
