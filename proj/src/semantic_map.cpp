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

#include "contextvae/semantic_map.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "contextvae/error.hpp"

namespace contextvae::semantic_map {
namespace {

std::atomic<std::uint64_t> g_encoder_passes{0};

constexpr double kClipLo = -1.0;
constexpr double kClipHi = static_cast<double>(kRasterSize);

void set_pixel(RasterMap& r, int channel, long row, long col) {
  if (row < 0 || col < 0 || row >= kRasterSize || col >= kRasterSize) return;
  r.at(channel, static_cast<int>(row), static_cast<int>(col)) = 1;
}

// Liang-Barsky clip of a segment in pixel space to a box slightly larger than
// the raster.
bool clip_segment(PixelCoord& a, PixelCoord& b) {
  double t0 = 0.0;
  double t1 = 1.0;
  const double dr = b.row - a.row;
  const double dc = b.col - a.col;
  const double p[4] = {-dc, dc, -dr, dr};
  const double q[4] = {a.col - kClipLo, kClipHi - a.col, a.row - kClipLo, kClipHi - a.row};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return false;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      if (t > t1) return false;
      t0 = std::max(t0, t);
    } else {
      if (t < t0) return false;
      t1 = std::min(t1, t);
    }
  }
  const PixelCoord a0 = a;
  a = {a0.row + t0 * dr, a0.col + t0 * dc};
  b = {a0.row + t1 * dr, a0.col + t1 * dc};
  return true;
}

void draw_segment(RasterMap& r, int channel, PixelCoord a, PixelCoord b) {
  if (!clip_segment(a, b)) return;
  long x0 = std::lround(a.col), y0 = std::lround(a.row);
  const long x1 = std::lround(b.col), y1 = std::lround(b.row);
  const long dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
  const long dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  for (;;) {
    set_pixel(r, channel, y0, x0);
    if (x0 == x1 && y0 == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::vector<PixelCoord> to_pixels(const std::vector<Vec2>& pts, const geometry::LocalFrame& frame) {
  std::vector<PixelCoord> out;
  out.reserve(pts.size());
  for (const Vec2& p : pts) out.push_back(local_to_pixel(frame.to_local(p)));
  return out;
}

void draw_polyline(RasterMap& r, int channel, const Polyline& line,
                   const geometry::LocalFrame& frame) {
  const auto px = to_pixels(line, frame);
  if (px.size() == 1) {
    set_pixel(r, channel, std::lround(px[0].row), std::lround(px[0].col));
    return;
  }
  for (std::size_t i = 1; i < px.size(); ++i) draw_segment(r, channel, px[i - 1], px[i]);
}

// Even-odd fill of pixels whose centers lie inside the polygon.
void fill_polygon(RasterMap& r, int channel, const Polygon& poly,
                  const geometry::LocalFrame& frame) {
  if (poly.size() < 3) return;
  const auto px = to_pixels(poly, frame);
  double rmin = px[0].row, rmax = px[0].row;
  for (const auto& p : px) {
    rmin = std::min(rmin, p.row);
    rmax = std::max(rmax, p.row);
  }
  const long row_lo = std::max<long>(0, static_cast<long>(std::ceil(rmin)));
  const long row_hi = std::min<long>(kRasterSize - 1, static_cast<long>(std::floor(rmax)));
  std::vector<double> xs;
  for (long row = row_lo; row <= row_hi; ++row) {
    const double y = static_cast<double>(row);
    xs.clear();
    for (std::size_t i = 0; i < px.size(); ++i) {
      const PixelCoord& a = px[i];
      const PixelCoord& b = px[(i + 1) % px.size()];
      if ((a.row <= y && y < b.row) || (b.row <= y && y < a.row))
        xs.push_back(a.col + (y - a.row) * (b.col - a.col) / (b.row - a.row));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      const long c0 = std::max<long>(0, static_cast<long>(std::ceil(xs[i])));
      const long c1 = std::min<long>(kRasterSize - 1, static_cast<long>(std::ceil(xs[i + 1])) - 1);
      for (long c = c0; c <= c1; ++c) r.at(channel, static_cast<int>(row), static_cast<int>(c)) = 1;
    }
  }
}

}  // namespace

PixelCoord local_to_pixel(Vec2 local) {
  return {kAnchorRow - local.y / kResolution, kAnchorCol + local.x / kResolution};
}

Vec2 pixel_to_local(double row, double col) {
  return {(col - kAnchorCol) * kResolution, (kAnchorRow - row) * kResolution};
}

RasterMap rasterize(const VectorMap& map, const geometry::LocalFrame& frame,
                    const RasterOptions& options) {
  RasterMap r;
  r.frame = frame;
  for (const auto& poly : map.drivable_areas) fill_polygon(r, kDrivableChannel, poly, frame);
  for (const auto& poly : map.crosswalks) fill_polygon(r, kDrivableChannel, poly, frame);
  for (const auto& line : map.road_dividers) draw_polyline(r, kRoadDividerChannel, line, frame);
  for (const auto& line : map.lane_dividers) draw_polyline(r, kLaneDividerChannel, line, frame);
  if (options.centerlines_all_channels)
    for (const auto& line : map.lane_centerlines)
      for (int c = 0; c < kRasterChannels; ++c) draw_polyline(r, c, line, frame);
  return r;
}

MapEncoder MapEncoder::create(nn::ParameterSet& ps, const MapEncoderConfig& config,
                              std::mt19937_64& rng) {
  if (config.feature_dim <= 0) throw ConfigError("map encoder feature_dim must be positive");
  MapEncoder e;
  e.config_ = config;
  int in_ch = kRasterChannels;
  int extent = kRasterSize;
  for (std::size_t i = 0; i < config.channels.size(); ++i) {
    const bool first = i == 0;
    const int k = first ? config.first_kernel : config.kernel;
    const int s = first ? config.first_stride : config.stride;
    const int pad = first ? 0 : k / 2;
    auto conv = nn::Conv2d::create(ps, "map_encoder.conv" + std::to_string(i + 1), in_ch,
                                   config.channels[i], k, s, pad, rng);
    extent = conv.output_extent(extent);
    if (extent <= 0) throw ConfigError("map encoder stages shrink the raster to nothing");
    e.stages_.push_back(conv);
    in_ch = config.channels[i];
  }
  const int pooled = config.pool == MapEncoderConfig::Pool::kFlatten && !e.stages_.empty()
                         ? in_ch * extent * extent
                         : in_ch;
  e.head_ = nn::Linear::create(ps, "map_encoder.head", pooled, config.feature_dim, rng);
  return e;
}

MapEncoder::Trace MapEncoder::forward(nn::Graph& g, const RasterMap& raster) const {
  if (!raster.valid_shape()) throw InvalidInput("map encoder: raster must be 3 x 224 x 224");
  g_encoder_passes.fetch_add(1, std::memory_order_relaxed);
  nn::Var x = g.constant(raster.to_doubles(), {kRasterChannels, kRasterSize, kRasterSize});
  Trace t;
  for (const auto& stage : stages_) x = g.relu(stage(g, x));
  if (!stages_.empty()) t.last_activation = x;
  const nn::Var pooled = (config_.pool == MapEncoderConfig::Pool::kFlatten && !stages_.empty())
                             ? g.reshape(x, {static_cast<int>(g.size(x))})
                             : g.spatial_mean(x);
  t.features = head_(g, pooled);
  return t;
}

std::uint64_t map_encoder_pass_count() { return g_encoder_passes.load(std::memory_order_relaxed); }

MapFeatures extract_map_features(const RasterMap& raster, const nn::ParameterSet& params,
                                 const MapEncoder& encoder) {
  nn::Graph g(params);
  const auto t = encoder.forward(g, raster);
  const auto v = g.value(t.features);
  return {v.begin(), v.end()};
}

Saliency map_saliency(const RasterMap& raster, const nn::ParameterSet& params,
                      const MapEncoder& encoder, const SaliencyHead& head) {
  if (!encoder.has_conv_stages())
    throw Unsupported("map_saliency: encoder has no convolutional stages");
  nn::Gradients scratch(params);
  nn::Graph g(params, &scratch);
  const auto t = encoder.forward(g, raster);
  const nn::Var score = head(g, t.features);
  g.backward(score);

  const auto& shape = g.shape(t.last_activation);
  const int c = shape[0], h = shape[1], w = shape[2];
  const auto act = g.value(t.last_activation);
  const auto grad = g.grad(t.last_activation);
  const std::size_t p = static_cast<std::size_t>(h) * w;

  Saliency s;
  s.raw_rows = h;
  s.raw_cols = w;
  s.raw.assign(p, 0.0);
  if (!grad.empty()) {
    for (int ci = 0; ci < c; ++ci) {
      double alpha = 0.0;
      for (std::size_t i = 0; i < p; ++i) alpha += grad[ci * p + i];
      alpha /= static_cast<double>(p);
      for (std::size_t i = 0; i < p; ++i) s.raw[i] += alpha * act[ci * p + i];
    }
  }
  for (double& v : s.raw) v = std::max(v, 0.0);
  const double peak = *std::max_element(s.raw.begin(), s.raw.end());

  s.pixels.assign(static_cast<std::size_t>(kRasterSize) * kRasterSize, 0.0);
  if (peak <= 0.0) return s;
  const double sr = static_cast<double>(h) / kRasterSize;
  const double sc = static_cast<double>(w) / kRasterSize;
  for (int row = 0; row < kRasterSize; ++row) {
    const double fr = std::clamp((row + 0.5) * sr - 0.5, 0.0, static_cast<double>(h - 1));
    const int r0 = static_cast<int>(fr);
    const int r1 = std::min(r0 + 1, h - 1);
    const double wr = fr - r0;
    for (int col = 0; col < kRasterSize; ++col) {
      const double fc = std::clamp((col + 0.5) * sc - 0.5, 0.0, static_cast<double>(w - 1));
      const int c0 = static_cast<int>(fc);
      const int c1 = std::min(c0 + 1, w - 1);
      const double wc = fc - c0;
      const double v = (1 - wr) * ((1 - wc) * s.raw[r0 * w + c0] + wc * s.raw[r0 * w + c1]) +
                       wr * ((1 - wc) * s.raw[r1 * w + c0] + wc * s.raw[r1 * w + c1]);
      s.pixels[static_cast<std::size_t>(row) * kRasterSize + col] = v / peak;
    }
  }
  return s;
}

}  // namespace contextvae::semantic_map
