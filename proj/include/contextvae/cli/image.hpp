// Copyright 2026 The ContextVAE Authors.
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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "contextvae/semantic_map.hpp"

// RGB canvases for static figures, written as 8-bit PNG.

namespace contextvae::cli {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kObservedColor{40, 90, 230};   // blue
inline constexpr Rgb kTruthColor{220, 30, 30};      // red
inline constexpr Rgb kPredictionColor{255, 150, 0}; // orange
inline constexpr Rgb kAnchorColor{255, 0, 255};

// Raster channel colors; later channels are painted over earlier ones in
// the order drivable, lane divider, road divider.
inline constexpr Rgb kDrivableColor{70, 70, 70};
inline constexpr Rgb kLaneDividerColor{200, 200, 200};
inline constexpr Rgb kRoadDividerColor{240, 200, 0};

class Image {
 public:
  Image(int width, int height, Rgb fill = {0, 0, 0});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);  // silently clips
  // Alpha-blends `c` over the pixel.
  void blend(int x, int y, Rgb c, double alpha);

  void line(double x0, double y0, double x1, double y1, Rgb c, int thickness = 1);
  void disc(double cx, double cy, double radius, Rgb c, double alpha = 1.0);

  // `text` becomes tEXt chunks (key, value).
  void write_png(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& text = {}) const;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
};

// The raster at `scale` pixels per raster pixel.
Image raster_image(const semantic_map::RasterMap& raster, int scale = 1);

// Canvas coordinates (x, y) of a local-frame point on a scaled raster image.
std::array<double, 2> canvas_point(Vec2 local, int scale);

}  // namespace contextvae::cli
