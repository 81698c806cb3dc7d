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

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "contextvae/geometry.hpp"
#include "contextvae/nn/graph.hpp"
#include "contextvae/nn/layers.hpp"
#include "contextvae/scene.hpp"

namespace contextvae::semantic_map {

inline constexpr int kRasterSize = 224;
inline constexpr int kRasterChannels = 3;
// 0-based pixel holding the anchor agent (row 122, column 51 counted from 1).
inline constexpr int kAnchorRow = 121;
inline constexpr int kAnchorCol = 50;
inline constexpr double kResolution = 1.0;  // meters per pixel

// Channel layout.
inline constexpr int kRoadDividerChannel = 0;
inline constexpr int kLaneDividerChannel = 1;
inline constexpr int kDrivableChannel = 2;  // drivable area and crosswalks

// Binary 3 x 224 x 224 raster in channel-major order. Column grows with local
// +x (the anchor heading), row grows with local -y.
struct RasterMap {
  std::vector<std::uint8_t> data =
      std::vector<std::uint8_t>(kRasterChannels * kRasterSize * kRasterSize, 0);
  geometry::LocalFrame frame;
  double resolution = kResolution;

  std::uint8_t at(int channel, int row, int col) const {
    return data[(static_cast<std::size_t>(channel) * kRasterSize + row) * kRasterSize + col];
  }
  std::uint8_t& at(int channel, int row, int col) {
    return data[(static_cast<std::size_t>(channel) * kRasterSize + row) * kRasterSize + col];
  }
  bool valid_shape() const {
    return data.size() == static_cast<std::size_t>(kRasterChannels) * kRasterSize * kRasterSize;
  }
  std::vector<double> to_doubles() const { return {data.begin(), data.end()}; }
};

// Continuous pixel coordinates (row, col) of a local-frame point; integer
// values are pixel centers.
struct PixelCoord {
  double row = 0.0;
  double col = 0.0;
};
PixelCoord local_to_pixel(Vec2 local);
Vec2 pixel_to_local(double row, double col);

struct RasterOptions {
  // Draw lane centerlines into every channel (for maps whose drivable area
  // is only implied by centerlines).
  bool centerlines_all_channels = false;
};

RasterMap rasterize(const VectorMap& map, const geometry::LocalFrame& frame,
                    const RasterOptions& options = {});

using MapFeatures = std::vector<double>;

struct MapEncoderConfig {
  enum class Pool { kGlobalAverage, kFlatten };

  std::vector<int> channels{16, 32, 64, 128};
  int first_kernel = 4;
  int first_stride = 4;
  int kernel = 3;
  int stride = 2;
  int feature_dim = 256;
  Pool pool = Pool::kGlobalAverage;
};

// Strided convolution stack (ReLU after each stage), pooled and mapped
// linearly to the feature vector.
class MapEncoder {
 public:
  MapEncoder() = default;
  static MapEncoder create(nn::ParameterSet& ps, const MapEncoderConfig& config,
                           std::mt19937_64& rng);

  struct Trace {
    nn::Var features;
    nn::Var last_activation;  // invalid when there are no conv stages
  };
  Trace forward(nn::Graph& g, const RasterMap& raster) const;

  int feature_dim() const { return head_.out; }
  bool has_conv_stages() const { return !stages_.empty(); }
  const MapEncoderConfig& config() const { return config_; }

 private:
  MapEncoderConfig config_;
  std::vector<nn::Conv2d> stages_;
  nn::Linear head_;
};

// Number of MapEncoder::forward evaluations in this process.
std::uint64_t map_encoder_pass_count();

MapFeatures extract_map_features(const RasterMap& raster, const nn::ParameterSet& params,
                                 const MapEncoder& encoder);

// Scalar whose sensitivity the saliency explains, built on top of the map
// features.
using SaliencyHead = std::function<nn::Var(nn::Graph&, nn::Var map_features)>;

struct Saliency {
  std::vector<double> raw;     // coarse map at the last conv stage, before normalization
  int raw_rows = 0;
  int raw_cols = 0;
  std::vector<double> pixels;  // kRasterSize x kRasterSize in [0, 1]
};

// Gradient-weighted class activation map over the last convolution stage,
// rectified, normalized by its maximum and bilinearly upsampled.
Saliency map_saliency(const RasterMap& raster, const nn::ParameterSet& params,
                      const MapEncoder& encoder, const SaliencyHead& head);

}  // namespace contextvae::semantic_map
