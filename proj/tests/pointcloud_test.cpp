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

#include "spgan/cloud_io.hpp"
#include "spgan/dataset.hpp"
#include "spgan/pointcloud.hpp"

#include <gtest/gtest.h>

#include <array>
#include <bit>
#include <filesystem>
#include <random>

namespace spgan {
namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("spgan_pointcloud_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

PointCloud random_cloud(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd m(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) m(i, j) = u(rng);
  }
  return PointCloud(m);
}

TEST(PointCloud, RejectsNonFinite) {
  MatrixXd m(1, 3);
  m << 0.0, std::numeric_limits<double>::quiet_NaN(), 1.0;
  EXPECT_THROW(PointCloud{m}, InvalidArgument);
  EXPECT_THROW(PointCloud{MatrixXd(2, 2)}, InvalidArgument);
}

TEST(SampleUnitSphere, RowsHaveUnitNorm) {
  const auto s = sample_unit_sphere(2048, 3);
  ASSERT_EQ(s.points.rows(), 2048);
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    EXPECT_NEAR(s.points.row(i).norm(), 1.0, 1e-6);
  }
  const auto one = sample_unit_sphere(1, 0);
  ASSERT_EQ(one.points.rows(), 1);
  EXPECT_NEAR(one.points.row(0).norm(), 1.0, 1e-6);
}

TEST(SampleUnitSphere, ZeroPointsIsAnError) {
  EXPECT_THROW(sample_unit_sphere(0, 1), InvalidArgument);
}

TEST(SampleUnitSphere, MeanNearOrigin) {
  // For uniform points on S^2 each coordinate has variance 1/3, so the mean
  // of 2048 rows has norm ~ sqrt(1/2048) = 0.022 (rms); 0.05 is > 2 sigma.
  const auto s = sample_unit_sphere(2048, 7);
  EXPECT_LT(s.points.colwise().mean().norm(), 0.05);
}

TEST(SampleUnitSphere, OctantsRoughlyBalanced) {
  const auto s = sample_unit_sphere(4096, 11);
  std::array<int, 8> counts{};
  for (Eigen::Index i = 0; i < s.points.rows(); ++i) {
    const int o = (s.points(i, 0) > 0) | ((s.points(i, 1) > 0) << 1) | ((s.points(i, 2) > 0) << 2);
    ++counts[static_cast<std::size_t>(o)];
  }
  for (int c : counts) {
    EXPECT_GE(c, 0.08 * 4096);
    EXPECT_LE(c, 0.17 * 4096);
  }
}

TEST(SampleUnitSphere, DeterministicPerSeed) {
  EXPECT_EQ(sample_unit_sphere(64, 5).points, sample_unit_sphere(64, 5).points);
  EXPECT_NE(sample_unit_sphere(64, 5).points, sample_unit_sphere(64, 6).points);
}

TEST(Normalize, TwoPointExample) {
  MatrixXd m(2, 3);
  m << 0, 0, 0, 0, 0, 2;
  const auto out = normalize_to_unit_sphere(PointCloud(m)).points();
  MatrixXd expected(2, 3);
  expected << 0, 0, -1, 0, 0, 1;
  EXPECT_TRUE(out.isApprox(expected, 1e-15));
}

TEST(Normalize, RandomCloudIsCenteredWithUnitMaxNorm) {
  const auto out = normalize_to_unit_sphere(random_cloud(64, 1, 3.0)).points();
  EXPECT_NEAR(out.rowwise().norm().maxCoeff(), 1.0, 1e-9);
  EXPECT_LT(out.colwise().mean().norm(), 1e-9);
}

TEST(Normalize, Idempotent) {
  const auto once = normalize_to_unit_sphere(random_cloud(50, 2, 5.0));
  const auto twice = normalize_to_unit_sphere(once);
  EXPECT_LT((once.points() - twice.points()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Normalize, PreservesDistanceRatios) {
  const auto pc = random_cloud(20, 3, 4.0);
  const auto out = normalize_to_unit_sphere(pc);
  const double ref = (pc.point(0) - pc.point(1)).norm();
  const double ref_out = (out.point(0) - out.point(1)).norm();
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t j = i + 1; j < 20; ++j) {
      const double r_in = (pc.point(i) - pc.point(j)).norm() / ref;
      const double r_out = (out.point(i) - out.point(j)).norm() / ref_out;
      EXPECT_NEAR(r_in, r_out, 1e-9);
    }
  }
}

TEST(Normalize, IdenticalPointsAreDegenerate) {
  MatrixXd m = MatrixXd::Ones(4, 3);
  EXPECT_THROW(normalize_to_unit_sphere(PointCloud(m)), DegenerateInput);
  EXPECT_THROW(normalize_to_unit_sphere(PointCloud()), InvalidArgument);
}

TEST(XyzText, ParsesPointsAndComments) {
  const auto pc = parse_xyz("# header\n1.0 2.0 3.0\n\n-4 5e-1 +6\n");
  ASSERT_EQ(pc.size(), 2u);
  EXPECT_EQ(pc.point(0), Eigen::RowVector3d(1, 2, 3));
  EXPECT_EQ(pc.point(1), Eigen::RowVector3d(-4, 0.5, 6));
}

TEST(XyzText, ErrorsNameTheLine) {
  try {
    parse_xyz("1.0 2.0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":1:"), std::string::npos) << e.what();
  }
  try {
    parse_xyz("0 0 0\n1 2 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_xyz("1 2 3 4\n"), ParseError);
  EXPECT_THROW(parse_xyz("nan 0 0\n"), ParseError);
  EXPECT_THROW(parse_xyz("inf 0 0\n"), ParseError);
}

TEST(CloudFiles, RoundTripProperty) {
  const auto dir = temp_dir("roundtrip");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pc = random_cloud(1 + seed * 7, seed, 10.0);
    write_cloud(pc, dir / "c.xyz");
    const auto text = read_cloud(dir / "c.xyz");
    EXPECT_LE((text.points() - pc.points()).cwiseAbs().maxCoeff(), 1e-6);

    // Binary stores float32; a second write must reproduce the bytes exactly.
    write_cloud(pc, dir / "a.pcf");
    const auto bin = read_cloud(dir / "a.pcf");
    write_cloud(bin, dir / "b.pcf");
    EXPECT_EQ(encode_f32le(bin), encode_f32le(read_cloud(dir / "b.pcf")));
    EXPECT_EQ(bin.points(), read_cloud(dir / "b.pcf").points());
  }
}

TEST(CloudFiles, BinaryThreePointsBitExact) {
  MatrixXd m(3, 3);
  m << 0.5, -1.25, 3.0, 1e-3f, 2.0, -0.0, 7.0, 8.0, 9.0;
  const PointCloud pc(m.cast<float>().cast<double>());
  const auto dir = temp_dir("bits");
  write_cloud(pc, dir / "p.pcf");
  const auto back = read_cloud(dir / "p.pcf");
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(back.points()(i, j)),
                std::bit_cast<std::uint64_t>(pc.points()(i, j)));
    }
  }
}

TEST(CloudFiles, BinaryHeaderLayout) {
  MatrixXd m(1, 3);
  m << 1.0, 2.0, 3.0;
  const auto bytes = encode_f32le(PointCloud(m));
  ASSERT_EQ(bytes.size(), 24u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "PCF1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[8], 3);
  // 1.0f = 0x3f800000 little-endian
  EXPECT_EQ(bytes[12], 0x00);
  EXPECT_EQ(bytes[15], 0x3f);
}

TEST(CloudFiles, BinaryErrorsNameOffsets) {
  auto bytes = encode_f32le(random_cloud(2, 1));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_f32le(bad_magic), ParseError);
  auto bad_cols = bytes;
  bad_cols[8] = 4;
  try {
    decode_f32le(bad_cols);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 8"), std::string::npos);
  }
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_f32le(truncated), ParseError);
  auto nan = bytes;
  nan[12] = 0x00;
  nan[13] = 0x00;
  nan[14] = 0xc0;
  nan[15] = 0x7f;
  EXPECT_THROW(decode_f32le(nan), ParseError);
  EXPECT_THROW(read_cloud("/nonexistent/file.pcf"), ParseError);
}

TEST(Rows, SelectAndPermute) {
  MatrixXd m(3, 3);
  m << 0, 0, 0, 1, 1, 1, 2, 2, 2;
  const PointCloud pc(m);
  const auto two = select_rows(pc, {2, 0});
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two.point(0)(0), 2.0);
  EXPECT_EQ(two.point(1)(0), 0.0);
  EXPECT_THROW(select_rows(pc, {3}), InvalidArgument);
  EXPECT_THROW(permute_rows(pc, {1, 0}), InvalidArgument);
  EXPECT_EQ(permute_rows(pc, {2, 1, 0}).point(0)(0), 2.0);
}

TEST(Subsample, DistinctRowsInOriginalOrder) {
  MatrixXd m(50, 3);
  for (int i = 0; i < 50; ++i) m.row(i) << i, -i, 0.5 * i;
  const PointCloud pc(m);
  const auto s = subsample(pc, 20, 4);
  ASSERT_EQ(s.size(), 20u);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GT(s.point(i)(0), s.point(i - 1)(0));
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s.point(i)(1), -s.point(i)(0));
    EXPECT_EQ(s.point(i)(2), 0.5 * s.point(i)(0));
  }
  EXPECT_EQ(subsample(pc, 20, 4), s);
  EXPECT_EQ(subsample(pc, 50, 9), pc);
  EXPECT_THROW(subsample(pc, 51, 0), InvalidArgument);
}

}  // namespace
}  // namespace spgan
