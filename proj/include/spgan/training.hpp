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

#ifndef SPGAN_TRAINING_HPP
#define SPGAN_TRAINING_HPP

#include "spgan/checkpoint.hpp"
#include "spgan/losses.hpp"
#include "spgan/nets.hpp"
#include "spgan/optimizer.hpp"
#include "spgan/prior.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace spgan {

struct TrainOptions {
  NetShape shape;
  std::size_t n_points = 2048;
  std::size_t k = 64;  // centroids per reference; ignored when shape.vanilla
  CentroidLayout layout = CentroidLayout::Replicate;
  LossConfig loss;
  AdamConfig adam;
  KMeansOptions kmeans;
  std::uint64_t seed = 0;

  void validate() const {
    loss.validate();
    if (n_points == 0) throw InvalidArgument("n_points must be >= 1");
    if (shape.latent_dim == 0 || shape.hidden == 0) {
      throw InvalidArgument("latent_dim and hidden must be >= 1");
    }
    if (!shape.vanilla && (k == 0 || n_points % k != 0)) {
      throw InvalidArgument("k_centroids=" + std::to_string(k) +
                            " does not divide n_points=" + std::to_string(n_points));
    }
    if (!(adam.learning_rate >= 0.0)) throw InvalidArgument("learning_rate must be >= 0");
  }
};

struct TrainState {
  ModelParams<float> params;
  AdamMoments<float> opt_g;
  AdamMoments<float> opt_d;
  std::uint64_t step = 0;
  std::uint64_t seed = 0;
  SpherePrior sphere;
};

struct StepReport {
  std::uint64_t step = 0;
  double loss_g = 0.0;
  double loss_d_shape = 0.0;
  double loss_d_point = 0.0;

  double loss_d() const { return loss_d_shape + loss_d_point; }
};

inline SpherePrior training_sphere(std::uint64_t seed, std::size_t n) {
  return sample_unit_sphere(n, derive_seed(seed, streams::kSphere));
}

inline TrainState initial_state(const TrainOptions& opts) {
  opts.validate();
  TrainState s;
  s.seed = opts.seed;
  s.params = init_params<float>(opts.shape, derive_seed(opts.seed, streams::kInit));
  s.opt_g = AdamMoments<float>::for_params(s.params.generator);
  s.opt_d = AdamMoments<float>::for_params(s.params.discriminator);
  s.sphere = training_sphere(opts.seed, opts.n_points);
  return s;
}

/// Centroid block of one reference cloud under the run's k-means seed.
inline CentroidBlock training_block(const PointCloud& reference, const TrainOptions& opts) {
  return reference_centroid_block(reference, opts.k, derive_seed(opts.seed, streams::kKMeans),
                                  opts.kmeans, opts.layout);
}

inline PriorLatentMatrix training_prior(const TrainState& state, const TrainOptions& opts,
                                        const CentroidBlock* block) {
  const auto z_seed = derive_seed(state.seed, streams::kLatent, state.step);
  if (opts.shape.vanilla) return assemble_vanilla_prior(state.sphere, opts.shape.latent_dim, z_seed);
  return assemble_training_prior(state.sphere, opts.shape.latent_dim, *block, z_seed);
}

/// One discriminator update followed by one generator update. The
/// discriminator's real sample is `reference`, the same cloud whose
/// centroids form the generator's prior block.
inline StepReport train_step(TrainState& state, const PointCloud& reference,
                             const TrainOptions& opts, const CentroidBlock* cached_block = nullptr) {
  if (reference.size() != state.sphere.size()) {
    throw InvalidArgument("reference has " + std::to_string(reference.size()) +
                          " points, expected " + std::to_string(state.sphere.size()));
  }
  std::optional<CentroidBlock> block;
  if (!opts.shape.vanilla) {
    if (cached_block == nullptr) {
      block = training_block(reference, opts);
      cached_block = &*block;
    }
  }
  const PriorLatentMatrix prior = training_prior(state, opts, cached_block);
  const MatrixXf prior_f = prior.data.cast<float>();
  const MatrixXf real = reference.points().cast<float>();

  GeneratorTape<float> g_tape;
  const MatrixXf fake = generator_forward<float>(prior_f, state.params, &g_tape);

  DiscriminatorTape<float> fake_tape, real_tape;
  const auto fake_scores = discriminator_forward<float>(fake, state.params, &fake_tape);
  const auto real_scores = discriminator_forward<float>(real, state.params, &real_tape);
  const auto d_loss = discriminator_loss(fake_scores, real_scores, opts.loss);
  auto d_grads = discriminator_backward(fake_tape, state.params, d_loss.fake.d_per_point,
                                        d_loss.fake.d_per_shape)
                     .params;
  const auto d_grads_real = discriminator_backward(real_tape, state.params,
                                                   d_loss.real.d_per_point,
                                                   d_loss.real.d_per_shape)
                                .params;
  for (std::size_t i = 0; i < d_grads.size(); ++i) d_grads[i] += d_grads_real[i];
  adam_update(state.params.discriminator, d_grads, state.opt_d, opts.adam);

  DiscriminatorTape<float> rescore_tape;
  const auto rescored = discriminator_forward<float>(fake, state.params, &rescore_tape);
  const auto g_loss = generator_loss(rescored, opts.loss);
  const auto d_fake = discriminator_backward(rescore_tape, state.params, g_loss.d_per_point,
                                             g_loss.d_per_shape);
  const auto g_grads = generator_backward(g_tape, state.params, d_fake.input);
  adam_update(state.params.generator, g_grads.params, state.opt_g, opts.adam);

  ++state.step;
  if (!state.params.all_finite()) {
    throw std::runtime_error("training diverged: non-finite parameters at step " +
                             std::to_string(state.step));
  }
  return {state.step, g_loss.value, d_loss.shape, d_loss.point};
}

// ---------------------------------------------------------------------------
// Checkpoints of the full training state.

inline Checkpoint state_checkpoint(const TrainState& state) {
  Checkpoint ckpt = params_checkpoint(state.params);
  ckpt.meta["step"] = std::to_string(state.step);
  ckpt.meta["seed"] = std::to_string(state.seed);
  ckpt.meta["n_points"] = std::to_string(state.sphere.size());
  ckpt.meta["adam_steps_g"] = std::to_string(state.opt_g.steps);
  ckpt.meta["adam_steps_d"] = std::to_string(state.opt_d.steps);
  append_tensors(ckpt, state.opt_g.m, "adam.m.");
  append_tensors(ckpt, state.opt_g.v, "adam.v.");
  append_tensors(ckpt, state.opt_d.m, "adam.m.");
  append_tensors(ckpt, state.opt_d.v, "adam.v.");
  return ckpt;
}

inline TrainState state_from_checkpoint(const Checkpoint& ckpt) {
  TrainState s;
  s.params = params_from_checkpoint(ckpt);
  try {
    s.step = std::stoull(ckpt.meta_value("step"));
    s.seed = std::stoull(ckpt.meta_value("seed"));
    s.sphere = training_sphere(s.seed, std::stoul(ckpt.meta_value("n_points")));
    s.opt_g = AdamMoments<float>::for_params(s.params.generator);
    s.opt_d = AdamMoments<float>::for_params(s.params.discriminator);
    s.opt_g.steps = std::stoull(ckpt.meta_value("adam_steps_g"));
    s.opt_d.steps = std::stoull(ckpt.meta_value("adam_steps_d"));
  } catch (const std::logic_error&) {
    throw ParseError("checkpoint: malformed training meta");
  }
  restore_tensors(ckpt, s.opt_g.m, "adam.m.");
  restore_tensors(ckpt, s.opt_g.v, "adam.v.");
  restore_tensors(ckpt, s.opt_d.m, "adam.m.");
  restore_tensors(ckpt, s.opt_d.v, "adam.v.");
  return s;
}

// ---------------------------------------------------------------------------
// Full runs.

struct CheckpointPolicy {
  std::filesystem::path dir;     // empty: no checkpoints
  std::uint64_t every = 0;       // 0: only initial and final
  std::string config_snapshot;   // written as config.txt next to each checkpoint
};

struct RunLength {
  std::size_t epochs = 1;
  std::uint64_t max_steps = 0;  // nonzero overrides epochs
};

inline constexpr const char* kLossLogHeader = "step,loss_g,loss_d_shape,loss_d_point";

inline std::string format_loss_row(const StepReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%llu,%.9g,%.9g,%.9g", static_cast<unsigned long long>(r.step),
                r.loss_g, r.loss_d_shape, r.loss_d_point);
  return buf;
}

inline std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::uint64_t step) {
  char name[32];
  std::snprintf(name, sizeof name, "step_%08llu", static_cast<unsigned long long>(step));
  return dir / name;
}

inline void write_state_checkpoint(const TrainState& state, const CheckpointPolicy& policy) {
  if (policy.dir.empty()) return;
  const auto path = checkpoint_path(policy.dir, state.step);
  save_checkpoint(state_checkpoint(state), path);
  if (!policy.config_snapshot.empty()) {
    std::ofstream(path / "config.txt", std::ios::trunc) << policy.config_snapshot;
  }
}

/// Dataset order for one epoch; a pure function of (seed, epoch).
inline std::vector<std::size_t> epoch_order(std::uint64_t seed, std::uint64_t epoch,
                                            std::size_t size) {
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(seed, streams::kShuffle, epoch));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

/// Trains from `state` (fresh or resumed) until the run length is reached.
/// Writes the CSV loss log to `loss_log` if given; the header is emitted only
/// when starting from step 0.
inline TrainState train(TrainState state, const std::vector<PointCloud>& dataset,
                        const TrainOptions& opts, const RunLength& length,
                        const CheckpointPolicy& policy = {}, std::ostream* loss_log = nullptr,
                        const std::function<void(const StepReport&)>& on_step = {}) {
  opts.validate();
  if (dataset.empty()) throw InvalidArgument("train: empty dataset");
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].size() != opts.n_points) {
      throw InvalidArgument("train: cloud " + std::to_string(i) + " has " +
                            std::to_string(dataset[i].size()) + " points, expected " +
                            std::to_string(opts.n_points));
    }
  }
  const std::uint64_t total =
      length.max_steps > 0 ? length.max_steps
                           : static_cast<std::uint64_t>(length.epochs) * dataset.size();

  if (loss_log != nullptr && state.step == 0) *loss_log << kLossLogHeader << '\n';
  if (state.step == 0) write_state_checkpoint(state, policy);

  // K-means is deterministic for a fixed seed, so blocks are memoized per cloud.
  std::vector<std::optional<CentroidBlock>> blocks(dataset.size());
  std::uint64_t current_epoch = ~std::uint64_t{0};
  std::vector<std::size_t> order;
  while (state.step < total) {
    const std::uint64_t epoch = state.step / dataset.size();
    if (epoch != current_epoch) {
      order = epoch_order(state.seed, epoch, dataset.size());
      current_epoch = epoch;
    }
    const std::size_t idx = order[state.step % dataset.size()];
    const CentroidBlock* block = nullptr;
    if (!opts.shape.vanilla) {
      if (!blocks[idx]) blocks[idx] = training_block(dataset[idx], opts);
      block = &*blocks[idx];
    }
    const StepReport report = train_step(state, dataset[idx], opts, block);
    if (loss_log != nullptr) *loss_log << format_loss_row(report) << '\n';
    if (on_step) on_step(report);
    if (policy.every > 0 && state.step % policy.every == 0 && state.step < total) {
      write_state_checkpoint(state, policy);
    }
  }
  if (!policy.dir.empty() && !std::filesystem::exists(checkpoint_path(policy.dir, state.step))) {
    write_state_checkpoint(state, policy);
  }
  return state;
}

}  // namespace spgan

#endif  // SPGAN_TRAINING_HPP
