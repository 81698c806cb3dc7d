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

#include <memory>
#include <string>
#include <vector>

#include "contextvae/geometry.hpp"
#include "contextvae/semantic_map.hpp"

namespace contextvae {

// T observed frames of one target, all expressed in the frame of the first
// observed pose.
struct ObservationWindow {
  std::string scene_id;
  int target_id = 0;
  std::size_t first_frame = 0;
  double dt = 0.2;
  geometry::LocalFrame frame;
  std::vector<AgentState> states;
  std::vector<std::vector<geometry::NeighborView>> neighbors;
  // Either a raster (encoded by the model's map encoder) or precomputed
  // features; the raster wins when both are present.
  std::shared_ptr<const semantic_map::RasterMap> raster;
  semantic_map::MapFeatures map_features;

  int T() const { return static_cast<int>(states.size()); }
  // Throws InvalidInput on T < 2, ragged neighbor lists or non-finite states.
  void validate() const;
};

// Ground truth for the H frames after a window, in the window's frame.
struct FutureTruth {
  std::vector<AgentState> states;
  std::vector<std::vector<geometry::NeighborView>> neighbors;
  std::vector<Vec2> displacements;  // d^{T+1} = x^{T+1} - x^T, ...

  int H() const { return static_cast<int>(displacements.size()); }
  std::vector<Vec2> local_positions(const ObservationWindow& w) const;
  std::vector<Vec2> world_positions(const ObservationWindow& w) const;
};

// Synthetic scenes carry the maneuver label so an oracle can be scored.
enum class Maneuver : int { kUnknown = -1, kStraight = 0, kLeft = 1, kRight = 2 };

struct Sample {
  ObservationWindow window;
  FutureTruth future;
  Maneuver maneuver = Maneuver::kUnknown;
  // World-frame future under the labelled maneuver without noise, if known.
  std::vector<Vec2> oracle_future;
};

}  // namespace contextvae
