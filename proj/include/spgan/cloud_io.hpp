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

#ifndef SPGAN_CLOUD_IO_HPP
#define SPGAN_CLOUD_IO_HPP

#include "spgan/pointcloud.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace spgan {

enum class CloudFormat { XyzText, F32Binary };

// .pcf -> binary, everything else -> xyz text.
inline CloudFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".pcf" ? CloudFormat::F32Binary
                                    : CloudFormat::XyzText;
}

namespace detail {

inline constexpr std::array<char, 4> kCloudMagic = {'P', 'C', 'F', '1'};

inline std::uint32_t load_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void store_u32le(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v & 0xffu);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xffu);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xffu);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xffu);
}

inline void store_f32le(float f, unsigned char* p) {
  store_u32le(std::bit_cast<std::uint32_t>(f), p);
}

inline float load_f32le(const unsigned char* p) {
  return std::bit_cast<float>(load_u32le(p));
}

inline std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::filesystem::path& path,
                        const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError("write failed: " + path.string());
}

inline bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

inline PointCloud parse_xyz(std::string_view text, const std::string& origin = "<memory>") {
  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') {
      if (end == text.size()) break;
      continue;
    }
    std::array<double, 3> xyz{};
    std::size_t fields = 0;
    std::size_t cursor = 0;
    while (cursor < line.size()) {
      const auto start = line.find_first_not_of(" \t", cursor);
      if (start == std::string_view::npos) break;
      auto stop = line.find_first_of(" \t", start);
      if (stop == std::string_view::npos) stop = line.size();
      const auto token = line.substr(start, stop - start);
      if (fields < 3) {
        double v = 0.0;
        if (!detail::parse_double(token, v)) {
          throw ParseError(origin + ":" + std::to_string(line_no) +
                           ": malformed number '" + std::string(token) + "'");
        }
        if (!std::isfinite(v)) {
          throw ParseError(origin + ":" + std::to_string(line_no) +
                           ": non-finite coordinate");
        }
        xyz[fields] = v;
      }
      ++fields;
      cursor = stop;
    }
    if (fields != 3) {
      throw ParseError(origin + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(fields));
    }
    values.insert(values.end(), xyz.begin(), xyz.end());
    if (end == text.size()) break;
  }
  const auto rows = static_cast<Eigen::Index>(values.size() / 3);
  MatrixXd m(rows, 3);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) m(i, j) = values[static_cast<std::size_t>(i * 3 + j)];
  }
  return PointCloud(std::move(m));
}

inline std::string format_xyz(const PointCloud& pc) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto& p = pc.points();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    os << p(i, 0) << ' ' << p(i, 1) << ' ' << p(i, 2) << '\n';
  }
  return os.str();
}

inline std::vector<unsigned char> encode_f32le(const PointCloud& pc) {
  const auto rows = pc.points().rows();
  if (rows > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("point cloud too large for binary format");
  }
  std::vector<unsigned char> bytes(12 + static_cast<std::size_t>(rows) * 12);
  std::memcpy(bytes.data(), detail::kCloudMagic.data(), 4);
  detail::store_u32le(static_cast<std::uint32_t>(rows), bytes.data() + 4);
  detail::store_u32le(3u, bytes.data() + 8);
  unsigned char* out = bytes.data() + 12;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j, out += 4) {
      detail::store_f32le(static_cast<float>(pc.points()(i, j)), out);
    }
  }
  return bytes;
}

inline PointCloud decode_f32le(const std::vector<unsigned char>& bytes,
                               const std::string& origin = "<memory>") {
  if (bytes.size() < 12) {
    throw ParseError(origin + ": offset 0: truncated header (" +
                     std::to_string(bytes.size()) + " bytes)");
  }
  if (std::memcmp(bytes.data(), detail::kCloudMagic.data(), 4) != 0) {
    throw ParseError(origin + ": offset 0: bad magic, expected PCF1");
  }
  const std::uint32_t rows = detail::load_u32le(bytes.data() + 4);
  const std::uint32_t cols = detail::load_u32le(bytes.data() + 8);
  if (cols != 3) {
    throw ParseError(origin + ": offset 8: column count must be 3, got " +
                     std::to_string(cols));
  }
  const std::size_t expected = 12 + static_cast<std::size_t>(rows) * 12;
  if (bytes.size() != expected) {
    throw ParseError(origin + ": offset 12: payload size " +
                     std::to_string(bytes.size() - 12) + " does not match " +
                     std::to_string(rows) + " rows");
  }
  MatrixXd m(static_cast<Eigen::Index>(rows), 3);
  const unsigned char* in = bytes.data() + 12;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j, in += 4) {
      const float v = detail::load_f32le(in);
      if (!std::isfinite(v)) {
        throw ParseError(origin + ": offset " +
                         std::to_string(in - bytes.data()) +
                         ": non-finite coordinate");
      }
      m(i, j) = static_cast<double>(v);
    }
  }
  return PointCloud(std::move(m));
}

inline PointCloud read_cloud(const std::filesystem::path& path, CloudFormat format) {
  if (format == CloudFormat::F32Binary) {
    return decode_f32le(detail::read_bytes(path), path.string());
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_xyz(buffer.str(), path.string());
}

inline PointCloud read_cloud(const std::filesystem::path& path) {
  return read_cloud(path, format_for_path(path));
}

inline void write_cloud(const PointCloud& pc, const std::filesystem::path& path,
                        CloudFormat format) {
  if (format == CloudFormat::F32Binary) {
    detail::write_bytes(path, encode_f32le(pc));
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  out << format_xyz(pc);
  if (!out) throw ParseError("write failed: " + path.string());
}

inline void write_cloud(const PointCloud& pc, const std::filesystem::path& path) {
  write_cloud(pc, path, format_for_path(path));
}

}  // namespace spgan

#endif  // SPGAN_CLOUD_IO_HPP
