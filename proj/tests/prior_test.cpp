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

#include "spgan/prior.hpp"

#include <gtest/gtest.h>

#include <array>
#include <map>
#include <random>

namespace spgan {
namespace {

MatrixXd random_centroids(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  MatrixXd c(static_cast<Eigen::Index>(k), 3);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) c(i, j) = u(rng);
  }
  return c;
}

TEST(CentroidBlock, ReplicatesEachCentroidContiguously) {
  MatrixXd c(2, 3);
  c << 1, 2, 3, 4, 5, 6;
  const auto block = build_centroid_block(c, 4);
  MatrixXd expected(4, 3);
  expected << 1, 2, 3, 1, 2, 3, 4, 5, 6, 4, 5, 6;
  EXPECT_EQ(block.rows, expected);
  EXPECT_EQ(block.k, 2u);
  EXPECT_EQ(block.replication, 2u);
}

TEST(CentroidBlock, FactorOneIsUnchanged) {
  const auto c = random_centroids(8, 1);
  EXPECT_EQ(build_centroid_block(c, 8).rows, c);
}

TEST(CentroidBlock, SingleCentroid) {
  MatrixXd c(1, 3);
  c << 1, 2, 3;
  const auto block = build_centroid_block(c, 3);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_EQ(block.rows.row(i), c.row(0));
}

TEST(CentroidBlock, LayoutAndMultiplicityForStandardKs) {
  for (std::size_t k : {16u, 32u, 64u, 128u, 2048u}) {
    const auto c = random_centroids(k, k);
    const auto block = build_centroid_block(c, 2048);
    const std::size_t rep = 2048 / k;
    std::map<std::array<double, 3>, std::size_t> multiplicity;
    for (std::size_t i = 0; i < 2048; ++i) {
      const auto row = block.rows.row(static_cast<Eigen::Index>(i));
      ASSERT_EQ(row, c.row(static_cast<Eigen::Index>(i / rep)));
      ++multiplicity[{row[0], row[1], row[2]}];
    }
    EXPECT_EQ(multiplicity.size(), k);
    for (const auto& [row, n] : multiplicity) EXPECT_EQ(n, rep);
  }
}

TEST(CentroidBlock, TileLayoutAlternative) {
  const auto c = random_centroids(4, 2);
  const auto block = build_centroid_block(c, 12, {}, CentroidLayout::Tile);
  for (Eigen::Index i = 0; i < 12; ++i) EXPECT_EQ(block.rows.row(i), c.row(i % 4));
}

TEST(CentroidBlock, NonDivisorNamesBothValues) {
  try {
    build_centroid_block(random_centroids(3, 1), 2048);
    FAIL();
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("K=3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("N=2048"), std::string::npos) << msg;
  }
}

TEST(CentroidBlock, AppliesSourceTransformUnchanged) {
  MatrixXd c(2, 3);
  c << 2, 0, 0, 4, 0, 0;
  SimilarityTransform t;
  t.center = Eigen::RowVector3d(3, 0, 0);
  t.scale = 0.5;
  const auto block = build_centroid_block(c, 2, t);
  EXPECT_EQ(block.rows.row(0), Eigen::RowVector3d(-0.5, 0, 0));
  EXPECT_EQ(block.rows.row(1), Eigen::RowVector3d(0.5, 0, 0));
}

TEST(ReferenceBlock, FullCloudUsesPointsInOrder) {
  const PointCloud pc(random_centroids(16, 3));
  EXPECT_EQ(reference_centroid_block(pc, 16, 0).rows, pc.points());
  const auto block = reference_centroid_block(pc, 4, 0);
  EXPECT_EQ(block.rows.rows(), 16);
  EXPECT_THROW(reference_centroid_block(pc, 5, 0), InvalidArgument);
}

TEST(TrainingPrior, FullScaleShape) {
  const auto sphere = sample_unit_sphere(2048, 1);
  const auto block = build_centroid_block(random_centroids(64, 1), 2048);
  const auto prior = assemble_training_prior(sphere, 128, block, 0);
  EXPECT_EQ(prior.data.rows(), 2048);
  EXPECT_EQ(prior.data.cols(), 134);
  EXPECT_EQ(prior.sphere(), sphere.points);
  EXPECT_EQ(prior.block(), block.rows);
  EXPECT_EQ(assemble_vanilla_prior(sphere, 128, 0).data.cols(), 131);
}

TEST(TrainingPrior, LatentIsStandardNormal) {
  const auto sphere = sample_unit_sphere(2048, 1);
  const auto block = build_centroid_block(random_centroids(64, 1), 2048);
  const MatrixXd z = assemble_training_prior(sphere, 128, block, 0).latent();
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / static_cast<double>(z.size() - 1);
  EXPECT_GT(mean, -0.01);
  EXPECT_LT(mean, 0.01);
  EXPECT_GT(var, 0.97);
  EXPECT_LT(var, 1.03);
}

TEST(TrainingPrior, VanillaIsTrainingWithoutBlock) {
  const auto sphere = sample_unit_sphere(64, 2);
  const auto block = build_centroid_block(random_centroids(8, 3), 64);
  const auto full = assemble_training_prior(sphere, 16, block, 99);
  const auto vanilla = assemble_vanilla_prior(sphere, 16, 99);
  EXPECT_FALSE(vanilla.has_block);
  EXPECT_EQ(full.data.leftCols(19), vanilla.data);
}

TEST(TrainingPrior, SizeMismatch) {
  const auto sphere = sample_unit_sphere(64, 2);
  const auto block = build_centroid_block(random_centroids(8, 3), 32);
  EXPECT_THROW(assemble_training_prior(sphere, 16, block, 0), InvalidArgument);
}

TEST(EvalPrior, RepeatsSphereInBlockColumns) {
  const auto sphere = sample_unit_sphere(128, 4);
  const auto a = assemble_eval_prior(sphere, 8, 1);
  EXPECT_EQ(a.data.rows(), 128);
  EXPECT_EQ(a.data.cols(), 3 + 8 + 3);
  EXPECT_EQ(a.block(), a.sphere());
  const auto b = assemble_eval_prior(sphere, 8, 2);
  EXPECT_EQ(a.data.leftCols(3), b.data.leftCols(3));
  EXPECT_EQ(a.data.rightCols(3), b.data.rightCols(3));
  EXPECT_NE(a.latent(), b.latent());
}

}  // namespace
}  // namespace spgan
