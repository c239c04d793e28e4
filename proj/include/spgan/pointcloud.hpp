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

#ifndef SPGAN_POINTCLOUD_HPP
#define SPGAN_POINTCLOUD_HPP

#include "spgan/common.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace spgan {

/// An N x 3 set of finite points in model coordinates.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(MatrixXd points) : points_(std::move(points)) {
    if (points_.cols() != 3) {
      throw InvalidArgument("point cloud must have 3 columns, got " +
                            std::to_string(points_.cols()));
    }
    if (!points_.allFinite()) {
      throw InvalidArgument("point cloud contains non-finite coordinates");
    }
  }

  const MatrixXd& points() const { return points_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  bool empty() const { return points_.rows() == 0; }
  Eigen::RowVector3d point(std::size_t i) const {
    return points_.row(static_cast<Eigen::Index>(i));
  }

  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.points_.rows() == b.points_.rows() && a.points_ == b.points_;
  }

 private:
  MatrixXd points_ = MatrixXd(0, 3);
};

/// Points on the unit sphere; the generator's initial global state.
struct SpherePrior {
  MatrixXd points;
  double radius = 1.0;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

// Normalizing i.i.d. standard-normal 3-vectors is exactly uniform on S^2.
inline SpherePrior sample_unit_sphere(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("sample_unit_sphere: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpherePrior sphere;
  sphere.points.resize(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < sphere.points.rows(); ++i) {
    Eigen::RowVector3d v;
    double norm = 0.0;
    do {
      const double x = normal(rng);
      const double y = normal(rng);
      const double z = normal(rng);
      v << x, y, z;
      norm = v.norm();
    } while (norm < 1e-12);
    sphere.points.row(i) = v / norm;
  }
  return sphere;
}

/// x -> (x - center) * scale
struct SimilarityTransform {
  Eigen::RowVector3d center = Eigen::RowVector3d::Zero();
  double scale = 1.0;

  MatrixXd apply(const MatrixXd& rows) const {
    return (rows.rowwise() - center) * scale;
  }
  Eigen::RowVector3d apply(const Eigen::RowVector3d& p) const {
    return (p - center) * scale;
  }
};

inline SimilarityTransform fit_unit_sphere_transform(const PointCloud& pc) {
  if (pc.empty()) throw InvalidArgument("normalize: empty point cloud");
  SimilarityTransform t;
  t.center = pc.points().colwise().mean();
  const double max_norm =
      (pc.points().rowwise() - t.center).rowwise().norm().maxCoeff();
  if (!(max_norm > 0.0)) {
    throw DegenerateInput("normalize: all points identical, scale undefined");
  }
  t.scale = 1.0 / max_norm;
  return t;
}

/// Centers the cloud on its centroid and scales it so the farthest point
/// lies on the unit sphere.
inline PointCloud normalize_to_unit_sphere(const PointCloud& pc) {
  return PointCloud(fit_unit_sphere_transform(pc).apply(pc.points()));
}

/// Rows `idx[0], idx[1], ...` of `pc`, in that order.
inline PointCloud select_rows(const PointCloud& pc, const std::vector<std::size_t>& idx) {
  MatrixXd out(static_cast<Eigen::Index>(idx.size()), 3);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= pc.size()) throw InvalidArgument("select_rows: row index out of range");
    out.row(static_cast<Eigen::Index>(i)) = pc.points().row(static_cast<Eigen::Index>(idx[i]));
  }
  return PointCloud(std::move(out));
}

inline PointCloud permute_rows(const PointCloud& pc,
                               const std::vector<std::size_t>& order) {
  if (order.size() != pc.size()) {
    throw InvalidArgument("permute_rows: order has " + std::to_string(order.size()) +
                          " entries for " + std::to_string(pc.size()) + " points");
  }
  return select_rows(pc, order);
}

}  // namespace spgan

#endif  // SPGAN_POINTCLOUD_HPP
