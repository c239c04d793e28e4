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

#ifndef SPGAN_LOSSES_HPP
#define SPGAN_LOSSES_HPP

#include "spgan/nets.hpp"

#include <string>

namespace spgan {

// Standard: least-squares GAN targets (real -> 1, generated -> 0).
// Literal: target 1 for both real and generated clouds in the discriminator
// objective.
enum class TargetMode { Standard, Literal };

inline const char* to_string(TargetMode m) {
  return m == TargetMode::Standard ? "standard" : "literal";
}

inline TargetMode parse_target_mode(const std::string& s) {
  if (s == "standard") return TargetMode::Standard;
  if (s == "literal") return TargetMode::Literal;
  throw InvalidArgument("target_mode must be 'standard' or 'literal', got '" + s + "'");
}

struct LossConfig {
  double beta = 1.0;  // weight of the per-point term in the generator loss
  TargetMode target_mode = TargetMode::Standard;

  void validate() const {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  }
};

template <typename T>
struct LossGrad {
  T value = T(0);
  Vector<T> d_per_point;
  T d_per_shape = T(0);
};

/// L_G = 1/2 (D(P) - 1)^2 + beta / (2N) * sum_i (D(p_i) - 1)^2
template <typename T>
LossGrad<T> generator_loss(const ScorePair<T>& s, const LossConfig& cfg) {
  const T n = static_cast<T>(s.per_point.size());
  const T beta = static_cast<T>(cfg.beta);
  LossGrad<T> g;
  const T shape_err = s.per_shape - T(1);
  const Vector<T> point_err = s.per_point.array() - T(1);
  g.value = T(0.5) * shape_err * shape_err + beta / (T(2) * n) * point_err.squaredNorm();
  g.d_per_shape = shape_err;
  g.d_per_point = point_err * (beta / n);
  return g;
}

template <typename T>
T loss_generator(const ScorePair<T>& s, const LossConfig& cfg) {
  return generator_loss(s, cfg).value;
}

template <typename T>
struct DiscriminatorLoss {
  T shape = T(0);
  T point = T(0);
  T total() const { return shape + point; }
  // Gradients with respect to the scores of the generated and real clouds.
  LossGrad<T> fake;
  LossGrad<T> real;
};

/// L_D = L_shape + L_point with
///   L_shape = 1/2 [(D(P) - t)^2 + (D(P^) - 1)^2]
///   L_point = 1/(2N) sum_i [(D(p_i) - t)^2 + (D(p^_i) - 1)^2]
/// where t = 0 in standard mode and 1 in literal mode. The per-point sums are
/// averaged over each cloud's own point count.
template <typename T>
DiscriminatorLoss<T> discriminator_loss(const ScorePair<T>& fake, const ScorePair<T>& real,
                                        const LossConfig& cfg) {
  const T fake_target = cfg.target_mode == TargetMode::Standard ? T(0) : T(1);
  const T nf = static_cast<T>(fake.per_point.size());
  const T nr = static_cast<T>(real.per_point.size());
  DiscriminatorLoss<T> l;
  const T fs = fake.per_shape - fake_target;
  const T rs = real.per_shape - T(1);
  const Vector<T> fp = fake.per_point.array() - fake_target;
  const Vector<T> rp = real.per_point.array() - T(1);
  l.shape = T(0.5) * (fs * fs + rs * rs);
  l.point = fp.squaredNorm() / (T(2) * nf) + rp.squaredNorm() / (T(2) * nr);
  l.fake.d_per_shape = fs;
  l.real.d_per_shape = rs;
  l.fake.d_per_point = fp / nf;
  l.real.d_per_point = rp / nr;
  l.fake.value = T(0.5) * fs * fs + fp.squaredNorm() / (T(2) * nf);
  l.real.value = T(0.5) * rs * rs + rp.squaredNorm() / (T(2) * nr);
  return l;
}

template <typename T>
T loss_discriminator(const ScorePair<T>& fake, const ScorePair<T>& real, const LossConfig& cfg) {
  return discriminator_loss(fake, real, cfg).total();
}

}  // namespace spgan

#endif  // SPGAN_LOSSES_HPP
