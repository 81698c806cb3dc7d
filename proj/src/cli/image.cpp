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

#include "contextvae/cli/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "contextvae/error.hpp"

namespace contextvae::cli {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw InvalidInput("image: empty canvas");
  rgb_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < rgb_.size(); i += 3) std::copy(fill.begin(), fill.end(), rgb_.begin() + i);
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  std::copy(c.begin(), c.end(), rgb_.begin() + i);
}

void Image::blend(int x, int y, Rgb c, double alpha) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  alpha = std::clamp(alpha, 0.0, 1.0);
  const std::size_t i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  for (int k = 0; k < 3; ++k)
    rgb_[i + k] = static_cast<std::uint8_t>(std::lround((1 - alpha) * rgb_[i + k] + alpha * c[k]));
}

void Image::line(double x0, double y0, double x1, double y1, Rgb c, int thickness) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 2)));
  const double r = (thickness - 1) / 2.0;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const double x = x0 + t * (x1 - x0), y = y0 + t * (y1 - y0);
    if (thickness <= 1)
      set(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)), c);
    else
      disc(x, y, r, c);
  }
}

void Image::disc(double cx, double cy, double radius, Rgb c, double alpha) {
  const int x0 = static_cast<int>(std::floor(cx - radius)), x1 = static_cast<int>(std::ceil(cx + radius));
  const int y0 = static_cast<int>(std::floor(cy - radius)), y1 = static_cast<int>(std::ceil(cy + radius));
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius + 0.25) blend(x, y, c, alpha);
}

void Image::write_png(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& text) const {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width_, height_, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<char*>(text[i].first.c_str());
    chunks[i].text = const_cast<char*>(text[i].second.c_str());
    chunks[i].text_length = text[i].second.size();
  }
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  png_write_info(png, info);
  for (int y = 0; y < height_; ++y)
    png_write_row(png, const_cast<png_bytep>(rgb_.data() + static_cast<std::size_t>(y) * width_ * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image raster_image(const semantic_map::RasterMap& raster, int scale) {
  using namespace semantic_map;
  if (scale < 1) throw InvalidInput("raster_image: scale must be >= 1");
  if (!raster.valid_shape()) throw InvalidInput("raster_image: malformed raster");
  Image img(kRasterSize * scale, kRasterSize * scale);
  for (int r = 0; r < kRasterSize; ++r)
    for (int c = 0; c < kRasterSize; ++c) {
      Rgb px{0, 0, 0};
      if (raster.at(kDrivableChannel, r, c)) px = kDrivableColor;
      if (raster.at(kLaneDividerChannel, r, c)) px = kLaneDividerColor;
      if (raster.at(kRoadDividerChannel, r, c)) px = kRoadDividerColor;
      for (int dy = 0; dy < scale; ++dy)
        for (int dx = 0; dx < scale; ++dx) img.set(c * scale + dx, r * scale + dy, px);
    }
  return img;
}

std::array<double, 2> canvas_point(Vec2 local, int scale) {
  const auto p = semantic_map::local_to_pixel(local);
  // Pixel centers sit in the middle of each scale x scale block.
  return {(p.col + 0.5) * scale - 0.5, (p.row + 0.5) * scale - 0.5};
}

}  // namespace contextvae::cli
