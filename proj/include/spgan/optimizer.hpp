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

#ifndef SPGAN_OPTIMIZER_HPP
#define SPGAN_OPTIMIZER_HPP

#include "spgan/nets.hpp"

#include <cmath>
#include <cstdint>

namespace spgan {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates for one ParamSet.
template <typename T>
struct AdamMoments {
  ParamSet<T> m;
  ParamSet<T> v;
  std::uint64_t steps = 0;

  static AdamMoments for_params(const ParamSet<T>& params) {
    return {params.zeros_like(), params.zeros_like(), 0};
  }
};

template <typename T>
void adam_update(ParamSet<T>& params, const ParamSet<T>& grads, AdamMoments<T>& moments,
                 const AdamConfig& cfg) {
  ++moments.steps;
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.epsilon);
  const double t = static_cast<double>(moments.steps);
  const T c1 = static_cast<T>(1.0 - std::pow(cfg.beta1, t));
  const T c2 = static_cast<T>(1.0 - std::pow(cfg.beta2, t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = moments.m[i];
    auto& v = moments.v[i];
    const auto& g = grads[i];
    m = b1 * m + (T(1) - b1) * g;
    v = b2 * v + (T(1) - b2) * g.cwiseProduct(g);
    const auto m_hat = m.array() / c1;
    const auto v_hat = v.array() / c2;
    params[i].array() -= lr * m_hat / (v_hat.sqrt() + eps);
  }
}

}  // namespace spgan

#endif  // SPGAN_OPTIMIZER_HPP
