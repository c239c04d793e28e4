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

#ifndef SPGAN_METRICS_HPP
#define SPGAN_METRICS_HPP

#include "spgan/checkpoint.hpp"
#include "spgan/nets.hpp"
#include "spgan/prior.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace spgan {

// ---------------------------------------------------------------------------
// Jensen-Shannon divergence over voxel occupancy.

/// Point counts over a G x G x G grid spanning [-1, 1]^3, x-major.
struct OccupancyHistogram {
  std::size_t resolution = 0;
  std::vector<double> counts;
  double total = 0.0;

  double count(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return counts[(ix * resolution + iy) * resolution + iz];
  }

  std::vector<double> normalized() const {
    std::vector<double> p(counts.size(), 0.0);
    if (total > 0.0) {
      for (std::size_t i = 0; i < counts.size(); ++i) p[i] = counts[i] / total;
    }
    return p;
  }
};

// Cell i covers (-1 + i*w, -1 + (i+1)*w]; a coordinate on a cell boundary
// belongs to the lower cell. Out-of-range coordinates clamp.
inline std::size_t voxel_index(double x, std::size_t resolution) {
  const double g = static_cast<double>(resolution);
  const double cell = std::ceil((x + 1.0) * g / 2.0) - 1.0;
  return static_cast<std::size_t>(std::clamp(cell, 0.0, g - 1.0));
}

inline void accumulate_occupancy(OccupancyHistogram& hist, const PointCloud& pc) {
  const std::size_t g = hist.resolution;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const auto p = pc.point(i);
    const std::size_t ix = voxel_index(p[0], g);
    const std::size_t iy = voxel_index(p[1], g);
    const std::size_t iz = voxel_index(p[2], g);
    hist.counts[(ix * g + iy) * g + iz] += 1.0;
  }
  hist.total += static_cast<double>(pc.size());
}

inline OccupancyHistogram occupancy_histogram(std::span<const PointCloud> clouds,
                                              std::size_t resolution) {
  if (clouds.empty()) throw InvalidArgument("occupancy_histogram: empty cloud list");
  if (resolution < 2) throw InvalidArgument("occupancy_histogram: resolution must be >= 2");
  OccupancyHistogram hist;
  hist.resolution = resolution;
  hist.counts.assign(resolution * resolution * resolution, 0.0);
  for (const auto& pc : clouds) accumulate_occupancy(hist, pc);
  return hist;
}

/// JSD in nats between two nonnegative weight vectors, each normalized to
/// sum 1 first. Terms with zero mass contribute 0.
inline double jsd(std::span<const double> p_weights, std::span<const double> q_weights) {
  if (p_weights.size() != q_weights.size()) {
    throw InvalidArgument("jsd: distributions have different support sizes");
  }
  double p_total = 0.0, q_total = 0.0;
  for (double v : p_weights) p_total += v;
  for (double v : q_weights) q_total += v;
  if (!(p_total > 0.0) || !(q_total > 0.0)) throw InvalidArgument("jsd: empty distribution");
  double kl_p = 0.0, kl_q = 0.0;
  for (std::size_t i = 0; i < p_weights.size(); ++i) {
    const double p = p_weights[i] / p_total;
    const double q = q_weights[i] / q_total;
    const double m = 0.5 * (p + q);
    if (p > 0.0) kl_p += p * std::log(p / m);
    if (q > 0.0) kl_q += q * std::log(q / m);
  }
  return std::clamp(0.5 * kl_p + 0.5 * kl_q, 0.0, std::log(2.0));
}

inline double jsd(const OccupancyHistogram& p, const OccupancyHistogram& q) {
  if (p.resolution != q.resolution) {
    throw InvalidArgument("jsd: histogram resolutions differ (" + std::to_string(p.resolution) +
                          " vs " + std::to_string(q.resolution) + ")");
  }
  return jsd(std::span<const double>(p.counts), std::span<const double>(q.counts));
}

// ---------------------------------------------------------------------------
// Frechet point cloud distance.

/// Permutation-invariant global descriptor: shared per-point MLP
/// 3 -> 64 -> 64 -> F with ReLU, max-pooled over points.
class FeatureExtractor {
 public:
  static constexpr std::size_t kDefaultWidth = 64;
  static constexpr std::uint64_t kDefaultSeed = 20240601;

  explicit FeatureExtractor(std::uint64_t seed = kDefaultSeed,
                            std::size_t feature_dim = kDefaultWidth) {
    const std::vector<std::size_t> widths = {3, kDefaultWidth, kDefaultWidth, feature_dim};
    std::mt19937_64 rng(derive_seed(seed, streams::kFeatures));
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      MatrixXd w(static_cast<Eigen::Index>(widths[l]), static_cast<Eigen::Index>(widths[l + 1]));
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = u(rng);
      }
      weights_.push_back(std::move(w));
      biases_.push_back(MatrixXd::Zero(1, static_cast<Eigen::Index>(widths[l + 1])));
    }
  }

  /// Replaces weights with tensors `f.layer{1,2,3}.{weight,bias}` from a
  /// checkpoint; shapes must chain 3 -> a -> b -> F.
  static FeatureExtractor from_checkpoint(const Checkpoint& ckpt) {
    FeatureExtractor fx;
    fx.weights_.clear();
    fx.biases_.clear();
    Eigen::Index in = 3;
    for (int l = 1; l <= 3; ++l) {
      const std::string stem = "f.layer" + std::to_string(l);
      const auto* w = ckpt.find(stem + ".weight");
      const auto* b = ckpt.find(stem + ".bias");
      if (w == nullptr || b == nullptr) throw ParseError("feature weights: missing " + stem);
      if (w->value.rows() != in || b->value.rows() != 1 || b->value.cols() != w->value.cols()) {
        throw InvalidArgument("feature weights: width mismatch at " + stem);
      }
      in = w->value.cols();
      fx.weights_.push_back(w->value.cast<double>());
      fx.biases_.push_back(b->value.cast<double>());
    }
    return fx;
  }

  std::size_t feature_dim() const { return static_cast<std::size_t>(weights_.back().cols()); }

  RowVector<double> extract(const PointCloud& pc) const {
    if (pc.empty()) throw InvalidArgument("extract_features: empty point cloud");
    MatrixXd x = pc.points();
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      x = detail::dense<double>(x, weights_[l], biases_[l]).cwiseMax(0.0);
    }
    return x.colwise().maxCoeff();
  }

 private:
  std::vector<MatrixXd> weights_;
  std::vector<MatrixXd> biases_;
};

inline RowVector<double> extract_features(const PointCloud& pc, const FeatureExtractor& fx) {
  return fx.extract(pc);
}

inline MatrixXd extract_features(std::span<const PointCloud> clouds, const FeatureExtractor& fx) {
  MatrixXd f(static_cast<Eigen::Index>(clouds.size()), static_cast<Eigen::Index>(fx.feature_dim()));
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    f.row(static_cast<Eigen::Index>(i)) = fx.extract(clouds[i]);
  }
  return f;
}

struct GaussianStats {
  Vector<double> mean;
  Eigen::MatrixXd covariance;
};

/// Sample mean and unbiased (1 / (M - 1)) covariance of the rows.
inline GaussianStats gaussian_stats(const MatrixXd& features) {
  if (features.rows() < 2) {
    throw InvalidArgument("gaussian_stats: need at least 2 rows, got " +
                          std::to_string(features.rows()));
  }
  GaussianStats s;
  s.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - s.mean.transpose();
  s.covariance = (centered.transpose() * centered) / static_cast<double>(features.rows() - 1);
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose()).eval();
  return s;
}

/// Principal square root of a symmetric positive semidefinite matrix.
/// Negative eigenvalues from rounding are clamped to zero.
inline Eigen::MatrixXd sqrtm_spd(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("sqrtm_spd: matrix must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidArgument("sqrtm_spd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  if (eig.info() != Eigen::Success) throw std::runtime_error("sqrtm_spd: eigensolver failed");
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

/// Squared 2-Wasserstein distance between two Gaussians.
inline double fpd(const GaussianStats& real, const GaussianStats& gen) {
  if (real.mean.size() != gen.mean.size() || real.covariance.rows() != gen.covariance.rows()) {
    throw InvalidArgument("fpd: feature dimensions differ");
  }
  const double mean_term = (real.mean - gen.mean).squaredNorm();
  const Eigen::MatrixXd gen_root = sqrtm_spd(gen.covariance);
  Eigen::MatrixXd product = gen_root * real.covariance * gen_root;
  product = 0.5 * (product + product.transpose()).eval();
  const double cross = sqrtm_spd(product).trace();
  const double d = mean_term + real.covariance.trace() + gen.covariance.trace() - 2.0 * cross;
  return std::max(d, 0.0);
}

// ---------------------------------------------------------------------------
// Evaluation of a generator against reference clouds.

/// FPD values are reported in units of 1e-3.
inline constexpr double kFpdUnit = 1e-3;

struct EvalOptions {
  std::size_t n_samples = 1000;
  std::size_t grid_resolution = 28;
  std::uint64_t seed = 0;
};

struct EvalResult {
  double fpd = 0.0;  // raw squared W2 distance
  double jsd = 0.0;  // nats
  double fpd_in_units() const { return fpd / kFpdUnit; }
};

inline EvalResult evaluate_sets(std::span<const PointCloud> generated,
                                std::span<const PointCloud> references,
                                const EvalOptions& opts, const FeatureExtractor& fx) {
  if (generated.size() < 2 || references.size() < 2) {
    throw InvalidArgument("evaluation needs at least 2 clouds per set");
  }
  EvalResult r;
  r.jsd = jsd(occupancy_histogram(generated, opts.grid_resolution),
              occupancy_histogram(references, opts.grid_resolution));
  r.fpd = fpd(gaussian_stats(extract_features(references, fx)),
              gaussian_stats(extract_features(generated, fx)));
  return r;
}

/// Generates clouds from [S | Z | S] priors ([S | Z] for vanilla models).
inline std::vector<PointCloud> generate_samples(const ModelParams<float>& params,
                                                const SpherePrior& sphere, std::size_t count,
                                                std::uint64_t seed) {
  std::vector<PointCloud> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const auto z_seed = derive_seed(seed, streams::kEval, j);
    const PriorLatentMatrix prior =
        params.shape.vanilla ? assemble_vanilla_prior(sphere, params.shape.latent_dim, z_seed)
                             : assemble_eval_prior(sphere, params.shape.latent_dim, z_seed);
    out.push_back(generator_forward(prior, params));
  }
  return out;
}

inline EvalResult evaluate_generator(const ModelParams<float>& params, const SpherePrior& sphere,
                                     std::span<const PointCloud> references,
                                     const EvalOptions& opts,
                                     const FeatureExtractor& fx = FeatureExtractor()) {
  if (opts.n_samples < 2) {
    throw InvalidArgument("evaluate_generator: n_samples must be >= 2");
  }
  const auto generated = generate_samples(params, sphere, opts.n_samples, opts.seed);
  return evaluate_sets(generated, references, opts, fx);
}

}  // namespace spgan

#endif  // SPGAN_METRICS_HPP
