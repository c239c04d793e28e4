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

#ifndef SPGAN_NETS_HPP
#define SPGAN_NETS_HPP

#include "spgan/pointcloud.hpp"
#include "spgan/prior.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace spgan {

/// Sizes that determine every tensor shape of the generator and
/// discriminator.
struct NetShape {
  std::size_t latent_dim = 128;
  std::size_t hidden = 64;
  bool vanilla = false;  // generator input [S | Z] instead of [S | Z | C]

  std::size_t generator_input_width() const { return prior_width(latent_dim, !vanilla); }

  friend bool operator==(const NetShape&, const NetShape&) = default;
};

template <typename T>
struct NamedTensor {
  std::string name;
  Matrix<T> value;
};

/// Ordered list of named tensors. Layer code addresses tensors by position;
/// names exist for checkpoints and diagnostics.
template <typename T>
class ParamSet {
 public:
  void add(std::string name, Eigen::Index rows, Eigen::Index cols) {
    tensors_.push_back({std::move(name), Matrix<T>::Zero(rows, cols)});
  }

  Matrix<T>& operator[](std::size_t i) { return tensors_[i].value; }
  const Matrix<T>& operator[](std::size_t i) const { return tensors_[i].value; }

  std::vector<NamedTensor<T>>& tensors() { return tensors_; }
  const std::vector<NamedTensor<T>>& tensors() const { return tensors_; }
  std::size_t size() const { return tensors_.size(); }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
    return n;
  }

  ParamSet zeros_like() const {
    ParamSet out = *this;
    for (auto& t : out.tensors_) t.value.setZero();
    return out;
  }

  bool all_finite() const {
    for (const auto& t : tensors_) {
      if (!t.value.allFinite()) return false;
    }
    return true;
  }

  template <typename U>
  ParamSet<U> cast() const {
    ParamSet<U> out;
    for (const auto& t : tensors_) {
      out.tensors().push_back({t.name, t.value.template cast<U>()});
    }
    return out;
  }

  friend bool operator==(const ParamSet& a, const ParamSet& b) {
    if (a.tensors_.size() != b.tensors_.size()) return false;
    for (std::size_t i = 0; i < a.tensors_.size(); ++i) {
      const auto& x = a.tensors_[i];
      const auto& y = b.tensors_[i];
      if (x.name != y.name || x.value.rows() != y.value.rows() ||
          x.value.cols() != y.value.cols() || x.value != y.value) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<NamedTensor<T>> tensors_;
};

// Tensor positions inside the generator ParamSet.
namespace gen {
enum : std::size_t { kEmbed1W, kEmbed1B, kEmbed2W, kEmbed2B, kEmbed3W, kEmbed3B,
                     kHead1W, kHead1B, kHead2W, kHead2B, kCount };
}
// Tensor positions inside the discriminator ParamSet.
namespace disc {
enum : std::size_t { kFeat1W, kFeat1B, kFeat2W, kFeat2B, kFeat3W, kFeat3B,
                     kPointW, kPointB, kShapeW, kShapeB, kCount };
}

template <typename T>
struct ModelParams {
  NetShape shape;
  ParamSet<T> generator;
  ParamSet<T> discriminator;

  std::size_t scalar_count() const {
    return generator.scalar_count() + discriminator.scalar_count();
  }
  bool all_finite() const { return generator.all_finite() && discriminator.all_finite(); }

  template <typename U>
  ModelParams<U> cast() const {
    return {shape, generator.template cast<U>(), discriminator.template cast<U>()};
  }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.shape == b.shape && a.generator == b.generator &&
           a.discriminator == b.discriminator;
  }
};

/// Zero-valued tensors laid out for `shape`.
template <typename T>
ModelParams<T> allocate_params(const NetShape& shape) {
  const auto h = static_cast<Eigen::Index>(shape.hidden);
  const auto in = static_cast<Eigen::Index>(shape.generator_input_width());
  ModelParams<T> p;
  p.shape = shape;
  p.generator.add("g.embed1.weight", in, h);
  p.generator.add("g.embed1.bias", 1, h);
  p.generator.add("g.embed2.weight", h, h);
  p.generator.add("g.embed2.bias", 1, h);
  p.generator.add("g.embed3.weight", h, h);
  p.generator.add("g.embed3.bias", 1, h);
  p.generator.add("g.head1.weight", 2 * h, h);
  p.generator.add("g.head1.bias", 1, h);
  p.generator.add("g.head2.weight", h, 3);
  p.generator.add("g.head2.bias", 1, 3);
  p.discriminator.add("d.feat1.weight", 3, h);
  p.discriminator.add("d.feat1.bias", 1, h);
  p.discriminator.add("d.feat2.weight", h, h);
  p.discriminator.add("d.feat2.bias", 1, h);
  p.discriminator.add("d.feat3.weight", h, h);
  p.discriminator.add("d.feat3.bias", 1, h);
  p.discriminator.add("d.point_head.weight", h, 1);
  p.discriminator.add("d.point_head.bias", 1, 1);
  p.discriminator.add("d.shape_head.weight", h, 1);
  p.discriminator.add("d.shape_head.bias", 1, 1);
  return p;
}

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero. Values are
/// drawn in double so every scalar type sees the same initialization.
template <typename T>
ModelParams<T> init_params(const NetShape& shape, std::uint64_t seed) {
  if (shape.latent_dim == 0 || shape.hidden == 0) {
    throw InvalidArgument("init_params: latent_dim and hidden must be >= 1");
  }
  ModelParams<T> p = allocate_params<T>(shape);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](ParamSet<T>& set) {
    for (std::size_t i = 0; i < set.size(); i += 2) {
      Matrix<T>& w = set[i];
      const double bound = 1.0 / std::sqrt(static_cast<double>(w.rows()));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<T>(u(rng));
      }
    }
  };
  fill(p.generator);
  fill(p.discriminator);
  return p;
}

namespace detail {

inline constexpr double kLeakySlope = 0.2;

// Row i of the result depends only on row i of x, so row permutations of
// the input permute the output exactly.
template <typename T>
Matrix<T> dense(const Matrix<T>& x, const Matrix<T>& w, const Matrix<T>& b) {
  Matrix<T> y(x.rows(), w.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y.row(i).noalias() = x.row(i) * w;
  }
  y.rowwise() += b.row(0);
  return y;
}

template <typename T>
Matrix<T> leaky_relu(const Matrix<T>& a) {
  const T slope = static_cast<T>(kLeakySlope);
  return a.unaryExpr([slope](T v) { return v > T(0) ? v : slope * v; });
}

template <typename T>
Matrix<T> leaky_relu_backward(const Matrix<T>& pre, const Matrix<T>& grad) {
  const T slope = static_cast<T>(kLeakySlope);
  return grad.binaryExpr(pre, [slope](T g, T v) { return v > T(0) ? g : slope * g; });
}

// Column-wise max over rows; ties resolve to the lowest row index.
template <typename T>
RowVector<T> max_pool(const Matrix<T>& f, std::vector<Eigen::Index>& argmax) {
  RowVector<T> g(f.cols());
  argmax.assign(static_cast<std::size_t>(f.cols()), 0);
  for (Eigen::Index j = 0; j < f.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < f.rows(); ++i) {
      if (f(i, j) > f(best, j)) best = i;
    }
    g(j) = f(best, j);
    argmax[static_cast<std::size_t>(j)] = best;
  }
  return g;
}

template <typename T>
void accumulate_dense_grads(const Matrix<T>& x, const Matrix<T>& d_pre, Matrix<T>& dw,
                            Matrix<T>& db) {
  dw.noalias() = x.transpose() * d_pre;
  db = d_pre.colwise().sum();
}

}  // namespace detail

template <typename T>
struct GeneratorTape {
  Matrix<T> input;
  Matrix<T> a1, h1, a2, h2, a3, features;
  std::vector<Eigen::Index> argmax;
  Matrix<T> combined, a4, h4;
};

/// Per-point shared MLP embedding, max-pooled global feature broadcast back
/// to every point, shared head to a 3-D displacement added to the sphere
/// columns of the prior.
template <typename T>
Matrix<T> generator_forward(const Matrix<T>& prior, const ModelParams<T>& params,
                            GeneratorTape<T>* tape = nullptr) {
  const auto& p = params.generator;
  const auto expected = static_cast<Eigen::Index>(params.shape.generator_input_width());
  if (prior.cols() != expected) {
    throw InvalidArgument("generator: prior width " + std::to_string(prior.cols()) +
                          " does not match parameter input width " + std::to_string(expected));
  }
  if (prior.rows() == 0) throw InvalidArgument("generator: empty prior");
  using detail::dense;
  using detail::leaky_relu;
  GeneratorTape<T> local;
  GeneratorTape<T>& t = tape != nullptr ? *tape : local;
  const auto h = static_cast<Eigen::Index>(params.shape.hidden);

  t.input = prior;
  t.a1 = dense(prior, p[gen::kEmbed1W], p[gen::kEmbed1B]);
  t.h1 = leaky_relu(t.a1);
  t.a2 = dense(t.h1, p[gen::kEmbed2W], p[gen::kEmbed2B]);
  t.h2 = leaky_relu(t.a2);
  t.a3 = dense(t.h2, p[gen::kEmbed3W], p[gen::kEmbed3B]);
  t.features = leaky_relu(t.a3);
  const RowVector<T> global = detail::max_pool(t.features, t.argmax);
  t.combined.resize(prior.rows(), 2 * h);
  t.combined.leftCols(h) = t.features;
  t.combined.rightCols(h) = global.replicate(prior.rows(), 1);
  t.a4 = dense(t.combined, p[gen::kHead1W], p[gen::kHead1B]);
  t.h4 = leaky_relu(t.a4);
  Matrix<T> out = dense(t.h4, p[gen::kHead2W], p[gen::kHead2B]);
  out += prior.leftCols(3);
  return out;
}

inline PointCloud generator_forward(const PriorLatentMatrix& prior,
                                    const ModelParams<double>& params) {
  return PointCloud(generator_forward<double>(prior.data, params));
}

inline PointCloud generator_forward(const PriorLatentMatrix& prior,
                                    const ModelParams<float>& params) {
  const MatrixXf out = generator_forward<float>(prior.data.cast<float>(), params);
  return PointCloud(out.cast<double>());
}

template <typename T>
struct GeneratorGrads {
  ParamSet<T> params;
  Matrix<T> input;  // d loss / d prior
};

template <typename T>
GeneratorGrads<T> generator_backward(const GeneratorTape<T>& t, const ModelParams<T>& params,
                                     const Matrix<T>& d_out) {
  using detail::accumulate_dense_grads;
  using detail::leaky_relu_backward;
  const auto& p = params.generator;
  const auto h = static_cast<Eigen::Index>(params.shape.hidden);
  GeneratorGrads<T> g{p.zeros_like(), {}};
  auto& dp = g.params;

  accumulate_dense_grads(t.h4, d_out, dp[gen::kHead2W], dp[gen::kHead2B]);
  Matrix<T> d = leaky_relu_backward(t.a4, Matrix<T>(d_out * p[gen::kHead2W].transpose()));
  accumulate_dense_grads(t.combined, d, dp[gen::kHead1W], dp[gen::kHead1B]);
  const Matrix<T> d_combined = d * p[gen::kHead1W].transpose();

  Matrix<T> d_features = d_combined.leftCols(h);
  const RowVector<T> d_global = d_combined.rightCols(h).colwise().sum();
  for (Eigen::Index j = 0; j < h; ++j) {
    d_features(t.argmax[static_cast<std::size_t>(j)], j) += d_global(j);
  }

  d = leaky_relu_backward(t.a3, d_features);
  accumulate_dense_grads(t.h2, d, dp[gen::kEmbed3W], dp[gen::kEmbed3B]);
  d = leaky_relu_backward(t.a2, Matrix<T>(d * p[gen::kEmbed3W].transpose()));
  accumulate_dense_grads(t.h1, d, dp[gen::kEmbed2W], dp[gen::kEmbed2B]);
  d = leaky_relu_backward(t.a1, Matrix<T>(d * p[gen::kEmbed2W].transpose()));
  accumulate_dense_grads(t.input, d, dp[gen::kEmbed1W], dp[gen::kEmbed1B]);
  g.input = d * p[gen::kEmbed1W].transpose();
  g.input.leftCols(3) += d_out;
  return g;
}

/// Discriminator output for one cloud: D(p_i) per point and D(P) per shape.
template <typename T>
struct ScorePair {
  Vector<T> per_point;
  T per_shape = T(0);
};

template <typename T>
struct DiscriminatorTape {
  Matrix<T> input;
  Matrix<T> a1, h1, a2, h2, a3, features;
  std::vector<Eigen::Index> argmax;
  RowVector<T> global;
};

template <typename T>
ScorePair<T> discriminator_forward(const Matrix<T>& cloud, const ModelParams<T>& params,
                                   DiscriminatorTape<T>* tape = nullptr) {
  if (cloud.rows() == 0) throw InvalidArgument("discriminator: empty point cloud");
  if (cloud.cols() != 3) throw InvalidArgument("discriminator: input must be N x 3");
  using detail::dense;
  using detail::leaky_relu;
  const auto& p = params.discriminator;
  DiscriminatorTape<T> local;
  DiscriminatorTape<T>& t = tape != nullptr ? *tape : local;

  t.input = cloud;
  t.a1 = dense(cloud, p[disc::kFeat1W], p[disc::kFeat1B]);
  t.h1 = leaky_relu(t.a1);
  t.a2 = dense(t.h1, p[disc::kFeat2W], p[disc::kFeat2B]);
  t.h2 = leaky_relu(t.a2);
  t.a3 = dense(t.h2, p[disc::kFeat3W], p[disc::kFeat3B]);
  t.features = leaky_relu(t.a3);
  t.global = detail::max_pool(t.features, t.argmax);

  ScorePair<T> s;
  s.per_point = dense(t.features, p[disc::kPointW], p[disc::kPointB]).col(0);
  s.per_shape = t.global.dot(p[disc::kShapeW].col(0)) + p[disc::kShapeB](0, 0);
  return s;
}

inline ScorePair<double> discriminator_forward(const PointCloud& pc,
                                               const ModelParams<double>& params) {
  return discriminator_forward<double>(pc.points(), params);
}

template <typename T>
struct DiscriminatorGrads {
  ParamSet<T> params;
  Matrix<T> input;  // d loss / d cloud
};

template <typename T>
DiscriminatorGrads<T> discriminator_backward(const DiscriminatorTape<T>& t,
                                             const ModelParams<T>& params,
                                             const Vector<T>& d_per_point, T d_per_shape) {
  using detail::accumulate_dense_grads;
  using detail::leaky_relu_backward;
  const auto& p = params.discriminator;
  const auto h = static_cast<Eigen::Index>(params.shape.hidden);
  DiscriminatorGrads<T> g{p.zeros_like(), {}};
  auto& dp = g.params;

  const Matrix<T> d_point = d_per_point;
  accumulate_dense_grads(t.features, d_point, dp[disc::kPointW], dp[disc::kPointB]);
  Matrix<T> d_features = d_point * p[disc::kPointW].transpose();

  dp[disc::kShapeW] = t.global.transpose() * d_per_shape;
  dp[disc::kShapeB](0, 0) = d_per_shape;
  for (Eigen::Index j = 0; j < h; ++j) {
    d_features(t.argmax[static_cast<std::size_t>(j)], j) += d_per_shape * p[disc::kShapeW](j, 0);
  }

  Matrix<T> d = leaky_relu_backward(t.a3, d_features);
  accumulate_dense_grads(t.h2, d, dp[disc::kFeat3W], dp[disc::kFeat3B]);
  d = leaky_relu_backward(t.a2, Matrix<T>(d * p[disc::kFeat3W].transpose()));
  accumulate_dense_grads(t.h1, d, dp[disc::kFeat2W], dp[disc::kFeat2B]);
  d = leaky_relu_backward(t.a1, Matrix<T>(d * p[disc::kFeat2W].transpose()));
  accumulate_dense_grads(t.input, d, dp[disc::kFeat1W], dp[disc::kFeat1B]);
  g.input = d * p[disc::kFeat1W].transpose();
  return g;
}

}  // namespace spgan

#endif  // SPGAN_NETS_HPP
