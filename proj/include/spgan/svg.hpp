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

#ifndef SPGAN_SVG_HPP
#define SPGAN_SVG_HPP

#include "spgan/pointcloud.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace spgan {

/// Three orthographic scatter projections (xy, xz, yz) side by side.
/// Coordinates outside [-1.1, 1.1] are drawn clipped by the panel.
inline std::string render_projections_svg(const PointCloud& pc, const std::string& title = "") {
  constexpr double kPanel = 240.0;
  constexpr double kPad = 10.0;
  constexpr double kHeader = 24.0;
  constexpr double kRange = 1.1;
  const int axes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  const char* labels[3] = {"xy", "xz", "yz"};

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                3 * kPanel + 4 * kPad, kPanel + kHeader + 2 * kPad,
                3 * kPanel + 4 * kPad, kPanel + kHeader + 2 * kPad);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    std::string escaped;
    for (char c : title) {
      switch (c) {
        case '<': escaped += "&lt;"; break;
        case '>': escaped += "&gt;"; break;
        case '&': escaped += "&amp;"; break;
        case '"': escaped += "&quot;"; break;
        default: escaped += c;
      }
    }
    svg += "<title>" + escaped + "</title>\n";
  }
  for (int panel = 0; panel < 3; ++panel) {
    const double x0 = kPad + panel * (kPanel + kPad);
    const double y0 = kHeader + kPad;
    std::snprintf(buf, sizeof buf,
                  "<g id=\"%s\">\n<text x=\"%.1f\" y=\"%.1f\" font-family=\"monospace\" "
                  "font-size=\"14\" fill=\"#333333\">%s</text>\n"
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
                  "stroke=\"#999999\"/>\n",
                  labels[panel], x0, kHeader, labels[panel], x0, y0, kPanel, kPanel);
    svg += buf;
    for (std::size_t i = 0; i < pc.size(); ++i) {
      const auto p = pc.point(i);
      const double u = p[axes[panel][0]];
      const double v = p[axes[panel][1]];
      if (std::abs(u) > kRange || std::abs(v) > kRange) continue;
      const double cx = x0 + (u + kRange) / (2 * kRange) * kPanel;
      const double cy = y0 + (kRange - v) / (2 * kRange) * kPanel;
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.2\" fill=\"#1f77b4\"/>\n",
                    cx, cy);
      svg += buf;
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace spgan

#endif  // SPGAN_SVG_HPP
