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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "contextvae/vec2.hpp"

namespace contextvae {

enum class AgentType : std::uint8_t { kVehicle, kPedestrian, kCyclist, kOther };

std::string_view agent_type_name(AgentType type);
// Unknown names map to kOther.
AgentType agent_type_from_name(std::string_view name);

struct AgentState {
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
  double heading = 0.0;
  AgentType type = AgentType::kVehicle;
  bool valid = true;

  bool finite() const {
    return position.finite() && velocity.finite() && acceleration.finite() &&
           std::isfinite(heading);
  }
};

struct VectorMap {
  std::vector<Polygon> drivable_areas;
  std::vector<Polygon> crosswalks;
  std::vector<Polyline> lane_dividers;
  std::vector<Polyline> road_dividers;
  std::vector<Polyline> lane_centerlines;

  bool empty() const {
    return drivable_areas.empty() && crosswalks.empty() && lane_dividers.empty() &&
           road_dividers.empty() && lane_centerlines.empty();
  }
  bool operator==(const VectorMap&) const = default;
};

struct AgentEntry {
  int id = 0;
  AgentState state;
};

// Agents are stored in arbitrary order; lookups never depend on it.
struct SceneFrame {
  double timestamp = 0.0;
  std::vector<AgentEntry> agents;

  const AgentState* find(int id) const;
};

struct SceneRecord {
  std::string scene_id;
  double fps = 10.0;
  std::vector<SceneFrame> frames;
  VectorMap vector_map;
  std::vector<int> objects_of_interest;

  double dt() const { return 1.0 / fps; }
  // Positions of one agent over [first, first + count); nullopt if the agent
  // is missing or invalid in any of those frames.
  std::optional<std::vector<Vec2>> track(int id, std::size_t first, std::size_t count) const;
  // Checks timestamps and object-of-interest references; throws InvalidInput.
  void validate() const;
};

}  // namespace contextvae
