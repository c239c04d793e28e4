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

#ifndef SPGAN_SYNTHETIC_HPP
#define SPGAN_SYNTHETIC_HPP

#include "spgan/pointcloud.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace spgan {

/// Two isotropic Gaussian clusters with random centers and spreads.
inline PointCloud two_cluster_blob(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> spread(0.08, 0.25);
  Eigen::RowVector3d centers[2];
  double sigma[2];
  for (int c = 0; c < 2; ++c) {
    const double x = u(rng), y = u(rng), z = u(rng);
    centers[c] << x, y, z;
    sigma[c] = spread(rng);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd pts(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const int c = static_cast<int>(i % 2);
    const double x = normal(rng), y = normal(rng), z = normal(rng);
    pts(i, 0) = centers[c][0] + sigma[c] * x;
    pts(i, 1) = centers[c][1] + sigma[c] * y;
    pts(i, 2) = centers[c][2] + sigma[c] * z;
  }
  return normalize_to_unit_sphere(PointCloud(std::move(pts)));
}

/// Points spread uniformly over the surface of a random axis-aligned box.
inline PointCloud box_surface(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> side(0.3, 1.0);
  const double ex = side(rng), ey = side(rng), ez = side(rng);
  const double extent[3] = {ex, ey, ez};
  // Face pairs perpendicular to x, y, z, weighted by area.
  const double areas[3] = {ey * ez, ex * ez, ex * ey};
  std::discrete_distribution<int> face({areas[0], areas[1], areas[2]});
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  MatrixXd pts(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const int axis = face(rng);
    for (int a = 0; a < 3; ++a) pts(i, a) = extent[a] * unit(rng);
    pts(i, axis) = sign(rng) ? extent[axis] : -extent[axis];
  }
  return normalize_to_unit_sphere(PointCloud(std::move(pts)));
}

/// Half blobs, half boxes, alternating.
inline std::vector<PointCloud> procedural_dataset(std::size_t count, std::size_t n,
                                                  std::uint64_t seed) {
  std::vector<PointCloud> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto s = derive_seed(seed, 0x5359, i);
    out.push_back(i % 2 == 0 ? two_cluster_blob(n, s) : box_surface(n, s));
  }
  return out;
}

}  // namespace spgan

#endif  // SPGAN_SYNTHETIC_HPP
