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

#include "spgan/synthetic.hpp"
#include "spgan/training.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace spgan {
namespace {

TrainOptions toy_options(std::uint64_t seed = 0) {
  TrainOptions o;
  o.shape = {16, 32, false};
  o.n_points = 256;
  o.k = 16;
  o.adam.learning_rate = 1e-3;
  o.seed = seed;
  return o;
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spgan_training_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(TrainStep, AdvancesStepAndKeepsParamsFinite) {
  const auto opts = toy_options();
  auto state = initial_state(opts);
  const auto ref = two_cluster_blob(256, 1);
  const auto report = train_step(state, ref, opts);
  EXPECT_EQ(state.step, 1u);
  EXPECT_EQ(report.step, 1u);
  EXPECT_TRUE(state.params.all_finite());
  EXPECT_TRUE(std::isfinite(report.loss_g));
  EXPECT_GE(report.loss_d_shape, 0.0);
  EXPECT_GE(report.loss_d_point, 0.0);
}

TEST(TrainStep, ZeroLearningRateLeavesParamsUnchanged) {
  auto opts = toy_options();
  opts.adam.learning_rate = 0.0;
  auto state = initial_state(opts);
  const auto before = state.params;
  train_step(state, box_surface(256, 2), opts);
  train_step(state, box_surface(256, 3), opts);
  EXPECT_TRUE(state.params == before);
  EXPECT_EQ(state.step, 2u);
}

TEST(TrainStep, UsesCentroidsOfTheCloudItScores) {
  const auto opts = toy_options();
  const auto ref = two_cluster_blob(256, 4);
  const auto other = box_surface(256, 5);
  auto a = initial_state(opts);
  auto b = initial_state(opts);
  auto c = initial_state(opts);
  const auto own_block = training_block(ref, opts);
  const auto foreign_block = training_block(other, opts);
  const auto ra = train_step(a, ref, opts);
  const auto rb = train_step(b, ref, opts, &own_block);
  const auto rc = train_step(c, ref, opts, &foreign_block);
  EXPECT_EQ(ra.loss_g, rb.loss_g);
  EXPECT_TRUE(a.params == b.params);
  EXPECT_FALSE(a.params == c.params);
}

TEST(TrainStep, RejectsWrongPointCount) {
  const auto opts = toy_options();
  auto state = initial_state(opts);
  EXPECT_THROW(train_step(state, two_cluster_blob(128, 1), opts), InvalidArgument);
}

TEST(TrainStep, VanillaModeTrains) {
  auto opts = toy_options();
  opts.shape.vanilla = true;
  opts.k = 7;  // ignored without a block
  auto state = initial_state(opts);
  EXPECT_EQ(state.params.generator[gen::kEmbed1W].rows(), 3 + 16);
  train_step(state, two_cluster_blob(256, 1), opts);
  EXPECT_TRUE(state.params.all_finite());
}

TEST(TrainStep, DiscriminatorLossFallsOnFixedReference) {
  // Measured once per seed: D loss at step 50 vs step 1, median over seeds 0-2.
  std::vector<double> first, last;
  const auto ref = two_cluster_blob(256, 0);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto opts = toy_options(seed);
    auto state = initial_state(opts);
    const auto block = training_block(ref, opts);
    for (int i = 0; i < 50; ++i) {
      const auto r = train_step(state, ref, opts, &block);
      if (r.step == 1) first.push_back(r.loss_d());
      if (r.step == 50) last.push_back(r.loss_d());
    }
  }
  std::sort(first.begin(), first.end());
  std::sort(last.begin(), last.end());
  EXPECT_LT(last[1], first[1]);
}

TEST(Train, ZeroEpochsWritesInitialCheckpoint) {
  const auto opts = toy_options();
  const auto dir = fresh_dir("zero");
  const auto data = procedural_dataset(4, 256, 1);
  std::ostringstream log;
  const auto initial = initial_state(opts);
  const auto state = train(initial, data, opts, {0, 0}, {dir, 0, "seed = 0\n"}, &log);
  EXPECT_EQ(state.step, 0u);
  EXPECT_TRUE(state.params == initial.params);
  EXPECT_TRUE(std::filesystem::exists(checkpoint_path(dir, 0) / kManifestName));
  EXPECT_TRUE(std::filesystem::exists(checkpoint_path(dir, 0) / "config.txt"));
  EXPECT_EQ(log.str(), std::string(kLossLogHeader) + "\n");
}

TEST(Train, EpochsTimesDatasetSteps) {
  const auto opts = toy_options();
  const auto data = procedural_dataset(3, 256, 1);
  std::ostringstream log;
  const auto state = train(initial_state(opts), data, opts, {2, 0}, {}, &log);
  EXPECT_EQ(state.step, 6u);
  EXPECT_EQ(lines(log.str()).size(), 7u);
}

TEST(Train, HeterogeneousPointCounts) {
  const auto opts = toy_options();
  std::vector<PointCloud> data = {two_cluster_blob(256, 1), two_cluster_blob(200, 2)};
  EXPECT_THROW(train(initial_state(opts), data, opts, {1, 0}), InvalidArgument);
  EXPECT_THROW(train(initial_state(opts), {}, opts, {1, 0}), InvalidArgument);
}

TEST(Train, LossLogIsBitReproducible) {
  const auto opts = toy_options(3);
  const auto data = procedural_dataset(4, 256, 2);
  std::ostringstream a, b;
  train(initial_state(opts), data, opts, {0, 12}, {}, &a);
  train(initial_state(opts), data, opts, {0, 12}, {}, &b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(lines(a.str()).front(), kLossLogHeader);
}

TEST(Train, ResumeReproducesSubsequentLosses) {
  const auto opts = toy_options(1);
  const auto data = procedural_dataset(3, 256, 7);
  const auto dir = fresh_dir("resume");
  std::ostringstream full;
  train(initial_state(opts), data, opts, {0, 10}, {dir, 4, ""}, &full);
  ASSERT_TRUE(std::filesystem::exists(checkpoint_path(dir, 4)));
  ASSERT_TRUE(std::filesystem::exists(checkpoint_path(dir, 8)));
  ASSERT_TRUE(std::filesystem::exists(checkpoint_path(dir, 10)));

  const auto resumed_state = state_from_checkpoint(load_checkpoint(checkpoint_path(dir, 4)));
  EXPECT_EQ(resumed_state.step, 4u);
  std::ostringstream tail;
  const auto end = train(resumed_state, data, opts, {0, 10}, {}, &tail);
  const auto full_lines = lines(full.str());
  const auto tail_lines = lines(tail.str());
  ASSERT_EQ(tail_lines.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(tail_lines[i], full_lines[5 + i]);
  const auto final_state = state_from_checkpoint(load_checkpoint(checkpoint_path(dir, 10)));
  EXPECT_TRUE(end.params == final_state.params);
}

TEST(Train, EpochOrderIsAPermutation) {
  auto order = epoch_order(5, 2, 10);
  EXPECT_EQ(order, epoch_order(5, 2, 10));
  EXPECT_NE(order, epoch_order(5, 3, 10));
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(order[i], i);
}

TEST(TrainOptions, Validation) {
  auto opts = toy_options();
  opts.k = 15;
  EXPECT_THROW(opts.validate(), InvalidArgument);
  opts.shape.vanilla = true;
  EXPECT_NO_THROW(opts.validate());
  opts.loss.beta = -1;
  EXPECT_THROW(opts.validate(), InvalidArgument);
}

}  // namespace
}  // namespace spgan
