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

// Fixtures shared by the unit tests and the acceptance binary.

#ifndef SPGAN_TESTS_TEST_SUPPORT_HPP
#define SPGAN_TESTS_TEST_SUPPORT_HPP

#include "oracles.hpp"
#include "spgan/nets.hpp"
#include "spgan/prior.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

namespace support {

using spgan::MatrixXd;
using Params = spgan::ModelParams<double>;

inline std::vector<double> flatten(const spgan::ParamSet<double>& set) {
  std::vector<double> out;
  for (const auto& t : set.tensors()) {
    for (Eigen::Index i = 0; i < t.value.size(); ++i) out.push_back(t.value.data()[i]);
  }
  return out;
}

inline void unflatten(const std::vector<double>& flat, spgan::ParamSet<double>& set) {
  std::size_t k = 0;
  for (auto& t : set.tensors()) {
    for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = flat[k++];
  }
}

inline MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng,
                              double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

// Biases are randomized too so their gradients are checked away from zero.
inline Params random_params(const spgan::NetShape& shape, std::uint64_t seed) {
  Params p = spgan::init_params<double>(shape, seed);
  std::mt19937_64 rng(seed + 100);
  for (auto* set : {&p.generator, &p.discriminator}) {
    for (std::size_t i = 1; i < set->size(); i += 2) {
      (*set)[i] = random_matrix((*set)[i].rows(), (*set)[i].cols(), rng, 0.1);
    }
  }
  return p;
}

inline MatrixXd random_prior(std::size_t n, std::size_t d, bool block, std::uint64_t seed) {
  const auto sphere = spgan::sample_unit_sphere(n, seed);
  if (!block) return spgan::assemble_vanilla_prior(sphere, d, seed + 1).data;
  std::mt19937_64 rng(seed + 2);
  spgan::CentroidBlock b{random_matrix(static_cast<Eigen::Index>(n), 3, rng, 0.5), n, 1};
  return spgan::assemble_training_prior(sphere, d, b, seed + 1).data;
}

inline spgan::PointCloud cloud_from(const std::vector<oracle::Point>& pts) {
  MatrixXd m(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      m(static_cast<Eigen::Index>(i), a) = pts[i][static_cast<std::size_t>(a)];
    }
  }
  return spgan::PointCloud(m);
}

inline std::vector<oracle::Point> gaussian_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<oracle::Point> pts(n);
  for (auto& p : pts) p = {nd(rng), nd(rng), nd(rng)};
  return pts;
}

// Piecewise-linear nets have kinks at leaky-ReLU zero crossings and at
// max-pool argmax switches. A central difference whose stencil crosses one
// does not estimate the derivative, so gradient-check instances are redrawn
// until no stencil does. The decision uses the forward pass only.
using Pattern = std::vector<long>;

template <typename T>
void append_signs(const spgan::Matrix<T>& a, Pattern& out) {
  for (Eigen::Index i = 0; i < a.size(); ++i) out.push_back(a.data()[i] > T(0) ? 1 : 0);
}

inline Pattern activation_pattern(const spgan::GeneratorTape<double>& t) {
  Pattern p;
  for (const auto* a : {&t.a1, &t.a2, &t.a3, &t.a4}) append_signs(*a, p);
  p.insert(p.end(), t.argmax.begin(), t.argmax.end());
  return p;
}

inline Pattern activation_pattern(const spgan::DiscriminatorTape<double>& t) {
  Pattern p;
  for (const auto* a : {&t.a1, &t.a2, &t.a3}) append_signs(*a, p);
  p.insert(p.end(), t.argmax.begin(), t.argmax.end());
  return p;
}

inline bool stencils_smooth(const std::function<Pattern(const std::vector<double>&)>& pattern,
                            const std::vector<double>& x, double eps) {
  const Pattern base = pattern(x);
  std::vector<double> y = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (double s : {eps, -eps}) {
      y[i] = x[i] + s;
      if (pattern(y) != base) return false;
    }
    y[i] = x[i];
  }
  return true;
}

template <typename Derived>
std::vector<double> flat_of(const Eigen::PlainObjectBase<Derived>& m) {
  return std::vector<double>(m.data(), m.data() + m.size());
}

inline MatrixXd with_flat(MatrixXd m, const std::vector<double>& flat) {
  std::copy(flat.begin(), flat.end(), m.data());
  return m;
}

struct GeneratorInstance {
  Params params;
  MatrixXd prior;
  MatrixXd weights;  // objective is sum(G(prior) .* weights)
  int attempts = 0;
};

inline GeneratorInstance generator_instance(const spgan::NetShape& shape, std::size_t n,
                                            std::uint64_t seed, double eps) {
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t s = seed + 1000 * static_cast<std::uint64_t>(attempt);
    GeneratorInstance g{random_params(shape, s),
                        random_prior(n, shape.latent_dim, !shape.vanilla, s), {}, attempt + 1};
    std::mt19937_64 rng(s + 7);
    g.weights = random_matrix(static_cast<Eigen::Index>(n), 3, rng);
    auto pattern_at = [&g](const Params& q, const MatrixXd& x) {
      spgan::GeneratorTape<double> t;
      spgan::generator_forward<double>(x, q, &t);
      return activation_pattern(t);
    };
    const bool ok =
        stencils_smooth(
            [&](const std::vector<double>& f) {
              Params q = g.params;
              unflatten(f, q.generator);
              return pattern_at(q, g.prior);
            },
            flatten(g.params.generator), eps) &&
        stencils_smooth(
            [&](const std::vector<double>& f) { return pattern_at(g.params, with_flat(g.prior, f)); },
            flat_of(g.prior), eps);
    if (ok) return g;
  }
}

struct DiscriminatorInstance {
  Params params;
  MatrixXd fake;
  MatrixXd real;
  spgan::Vector<double> w_point;
  double w_shape = 0.0;
  int attempts = 0;
};

inline DiscriminatorInstance discriminator_instance(const spgan::NetShape& shape, std::size_t n,
                                                    std::uint64_t seed, double eps) {
  const auto rows = static_cast<Eigen::Index>(n);
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t s = seed + 1000 * static_cast<std::uint64_t>(attempt);
    DiscriminatorInstance d{random_params(shape, s), {}, {}, {}, 0.0, attempt + 1};
    std::mt19937_64 rng(s + 11);
    d.fake = random_matrix(rows, 3, rng);
    d.real = random_matrix(rows, 3, rng);
    d.w_point = random_matrix(rows, 1, rng).col(0);
    d.w_shape = std::normal_distribution<double>()(rng);
    auto pattern_at = [](const Params& q, const MatrixXd& x) {
      spgan::DiscriminatorTape<double> t;
      spgan::discriminator_forward<double>(x, q, &t);
      return activation_pattern(t);
    };
    auto both = [&](const Params& q, const MatrixXd& fake, const MatrixXd& real) {
      Pattern p = pattern_at(q, fake);
      const Pattern r = pattern_at(q, real);
      p.insert(p.end(), r.begin(), r.end());
      return p;
    };
    const bool ok =
        stencils_smooth(
            [&](const std::vector<double>& f) {
              Params q = d.params;
              unflatten(f, q.discriminator);
              return both(q, d.fake, d.real);
            },
            flatten(d.params.discriminator), eps) &&
        stencils_smooth(
            [&](const std::vector<double>& f) {
              return both(d.params, with_flat(d.fake, f), d.real);
            },
            flat_of(d.fake), eps);
    if (ok) return d;
  }
}

}  // namespace support

#endif  // SPGAN_TESTS_TEST_SUPPORT_HPP
