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

#ifndef SPGAN_KMEANS_HPP
#define SPGAN_KMEANS_HPP

#include "spgan/pointcloud.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace spgan {

struct KMeansOptions {
  std::size_t max_iters = 100;
  double tol = 1e-6;
  // Independent k-means++ seedings; the lowest-inertia run is kept.
  std::size_t restarts = 20;
  // Finish each run with single-point transfers between clusters, which
  // escapes Lloyd fixed points that a move of one point would improve.
  bool refine = true;
};

struct KMeansResult {
  MatrixXd centroids;                    // K x 3
  std::vector<std::size_t> assignments;  // one cluster index per point
  double inertia = 0.0;
  // Inertia after every Lloyd update, in iteration order.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

inline std::size_t count_distinct_points(const PointCloud& pc) {
  std::vector<std::array<double, 3>> rows(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto p = pc.point(i);
    rows[i] = {p[0], p[1], p[2]};
  }
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

namespace detail {

inline MatrixXd kmeans_plus_plus(const MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const auto m = x.rows();
  MatrixXd centroids(static_cast<Eigen::Index>(k), 3);
  std::uniform_int_distribution<Eigen::Index> pick(0, m - 1);
  centroids.row(0) = x.row(pick(rng));
  std::vector<double> d2(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    d2[static_cast<std::size_t>(i)] = (x.row(i) - centroids.row(0)).squaredNorm();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index chosen = m - 1;
    const double target = unit(rng) * total;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      acc += d2[static_cast<std::size_t>(i)];
      if (acc > target && d2[static_cast<std::size_t>(i)] > 0.0) {
        chosen = i;
        break;
      }
    }
    // Rounding can leave acc <= target; fall back to the last point not
    // already coincident with a centroid.
    if (d2[static_cast<std::size_t>(chosen)] == 0.0) {
      for (Eigen::Index i = m - 1; i >= 0; --i) {
        if (d2[static_cast<std::size_t>(i)] > 0.0) {
          chosen = i;
          break;
        }
      }
    }
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(chosen);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d = (x.row(i) - x.row(chosen)).squaredNorm();
      auto& slot = d2[static_cast<std::size_t>(i)];
      slot = std::min(slot, d);
    }
  }
  return centroids;
}

}  // namespace detail

namespace detail {

// Moves single points between clusters while a move lowers the inertia:
// moving x from A (size a) to B (size b) changes the inertia by
//   b / (b + 1) |x - c_B|^2 - a / (a - 1) |x - c_A|^2.
// Appends the resulting inertia to the trace when anything moved.
inline void refine_by_transfers(const MatrixXd& x, KMeansResult& r) {
  const auto k = static_cast<std::size_t>(r.centroids.rows());
  const auto m = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t a : r.assignments) ++counts[a];
  bool any = false;
  for (std::size_t pass = 0; pass < 100 * m; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t from = r.assignments[i];
      if (counts[from] < 2) continue;
      const auto xi = x.row(static_cast<Eigen::Index>(i));
      const double na = static_cast<double>(counts[from]);
      const double remove_gain =
          na / (na - 1.0) * (xi - r.centroids.row(static_cast<Eigen::Index>(from))).squaredNorm();
      std::size_t best_to = from;
      double best_delta = 0.0;
      for (std::size_t to = 0; to < k; ++to) {
        if (to == from) continue;
        const double nb = static_cast<double>(counts[to]);
        const double delta =
            nb / (nb + 1.0) * (xi - r.centroids.row(static_cast<Eigen::Index>(to))).squaredNorm() -
            remove_gain;
        if (delta < best_delta - 1e-12 * remove_gain) {
          best_delta = delta;
          best_to = to;
        }
      }
      if (best_to == from) continue;
      const double na_new = na - 1.0;
      const double nb = static_cast<double>(counts[best_to]);
      auto ca = r.centroids.row(static_cast<Eigen::Index>(from));
      auto cb = r.centroids.row(static_cast<Eigen::Index>(best_to));
      ca = (ca * na - xi) / na_new;
      cb = (cb * nb + xi) / (nb + 1.0);
      --counts[from];
      ++counts[best_to];
      r.assignments[i] = best_to;
      moved = any = true;
    }
    if (!moved) break;
  }
  if (!any) return;
  // Recompute means and inertia exactly from the final assignments.
  MatrixXd sums = MatrixXd::Zero(static_cast<Eigen::Index>(k), 3);
  for (std::size_t i = 0; i < m; ++i) {
    sums.row(static_cast<Eigen::Index>(r.assignments[i])) += x.row(static_cast<Eigen::Index>(i));
  }
  for (std::size_t c = 0; c < k; ++c) {
    r.centroids.row(static_cast<Eigen::Index>(c)) =
        sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
  }
  double inertia = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    inertia += (x.row(static_cast<Eigen::Index>(i)) -
                r.centroids.row(static_cast<Eigen::Index>(r.assignments[i])))
                   .squaredNorm();
  }
  r.inertia = inertia;
  r.inertia_trace.push_back(inertia);
}

}  // namespace detail

/// One Lloyd run from a k-means++ seeding. Stops when the inertia
/// improvement drops below `opts.tol`, assignments stop changing, or
/// `opts.max_iters` updates have run. Empty clusters are reseeded with the
/// point farthest from its current centroid. Requires k <= distinct points.
inline KMeansResult lloyd(const PointCloud& pc, std::size_t k, std::uint64_t seed,
                          const KMeansOptions& opts) {
  const MatrixXd& x = pc.points();
  const auto m = static_cast<std::size_t>(x.rows());
  std::mt19937_64 rng(seed);

  KMeansResult r;
  r.centroids = detail::kmeans_plus_plus(x, k, rng);
  r.assignments.assign(m, 0);
  std::vector<std::size_t> previous;
  std::vector<std::size_t> counts(k);
  std::vector<double> dist(m);

  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_c = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (x.row(static_cast<Eigen::Index>(i)) -
                          r.centroids.row(static_cast<Eigen::Index>(c)))
                             .squaredNorm();
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      r.assignments[i] = best_c;
      dist[i] = best;
      ++counts[best_c];
    }

    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (counts[r.assignments[i]] < 2) continue;
        if (far == m || dist[i] > dist[far]) far = i;
      }
      if (far == m) break;  // unreachable while k <= distinct points
      --counts[r.assignments[far]];
      r.assignments[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
      r.centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
    }

    MatrixXd sums = MatrixXd::Zero(static_cast<Eigen::Index>(k), 3);
    for (std::size_t i = 0; i < m; ++i) {
      sums.row(static_cast<Eigen::Index>(r.assignments[i])) += x.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t c = 0; c < k; ++c) {
      r.centroids.row(static_cast<Eigen::Index>(c)) =
          sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      inertia += (x.row(static_cast<Eigen::Index>(i)) -
                  r.centroids.row(static_cast<Eigen::Index>(r.assignments[i])))
                     .squaredNorm();
    }
    r.inertia_trace.push_back(inertia);
    r.inertia = inertia;
    r.iterations = iter + 1;

    const bool unchanged = previous == r.assignments;
    const bool small_gain =
        r.inertia_trace.size() > 1 &&
        r.inertia_trace[r.inertia_trace.size() - 2] - inertia < opts.tol;
    if (unchanged || small_gain) break;
    previous = r.assignments;
  }
  if (opts.refine) detail::refine_by_transfers(x, r);
  return r;
}

/// Best of `opts.restarts` Lloyd runs, each from its own k-means++ seeding.
inline KMeansResult kmeans(const PointCloud& pc, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& opts = {}) {
  if (k == 0) throw InvalidArgument("kmeans: k must be >= 1");
  if (opts.max_iters == 0) throw InvalidArgument("kmeans: max_iters must be >= 1");
  if (opts.restarts == 0) throw InvalidArgument("kmeans: restarts must be >= 1");
  if (opts.tol < 0.0) throw InvalidArgument("kmeans: tol must be nonnegative");
  const std::size_t distinct = count_distinct_points(pc);
  if (k > distinct) {
    throw InvalidArgument("kmeans: k=" + std::to_string(k) + " exceeds " +
                          std::to_string(distinct) + " distinct points");
  }
  KMeansResult best = lloyd(pc, k, seed, opts);
  for (std::size_t r = 1; r < opts.restarts && best.inertia > 0.0; ++r) {
    KMeansResult run = lloyd(pc, k, derive_seed(seed, streams::kKMeans, r), opts);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

}  // namespace spgan

#endif  // SPGAN_KMEANS_HPP
