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

#include <span>
#include <vector>

#include "contextvae/scene.hpp"
#include "contextvae/vec2.hpp"

// Agent-state arithmetic: local frames, displacement sequences, neighbor
// queries and the social features used as attention keys.

namespace contextvae::geometry {

// Below this speed (m/s) an agent's heading comes from its stored heading
// field instead of its velocity direction.
inline constexpr double kStationarySpeed = 0.1;

struct SocialFeatures {
  double distance = 0.0;
  double bearing = 0.0;  // (-pi, pi], relative to the observer's heading
  double min_predicted_distance = 0.0;
};

struct NeighborView {
  int agent_id = 0;
  Vec2 rel_position;
  Vec2 rel_velocity;
  SocialFeatures social;
};

// Rigid transform taking world coordinates to a frame where `origin` sits at
// (0, 0) and the world direction `rotation` points along +x.
class LocalFrame {
 public:
  LocalFrame() = default;
  LocalFrame(Vec2 origin, double rotation);

  Vec2 origin() const { return origin_; }
  double rotation() const { return rotation_; }

  Vec2 to_local(Vec2 world) const;
  Vec2 to_world(Vec2 local) const;
  // Direction-only variants for velocities and displacements.
  Vec2 vector_to_local(Vec2 world) const;
  Vec2 vector_to_world(Vec2 local) const;
  double heading_to_local(double world_heading) const;
  AgentState state_to_local(const AgentState& world) const;

 private:
  Vec2 origin_;
  double rotation_ = 0.0;
  double cos_ = 1.0;
  double sin_ = 0.0;
};

// Heading used for frame construction and bearings: velocity direction, or
// the stored heading when nearly stationary.
double effective_heading(const AgentState& state);

LocalFrame build_local_frame(const AgentState& anchor);

std::vector<Vec2> to_displacements(std::span<const Vec2> positions);

std::vector<Vec2> reconstruct_trajectory(Vec2 last_position, std::span<const Vec2> displacements);

// `self` must be expressed in the same frame as the neighbor view.
SocialFeatures compute_social_features(const AgentState& self, const NeighborView& neighbor,
                                       double horizon_cap);

struct NeighborQuery {
  double radius = 30.0;
  double horizon_cap = 3.0;
};

// Valid agents within the closed ball around the target at frame t, expressed
// in `frame`, ordered by ascending distance with ties broken by agent id.
std::vector<NeighborView> query_neighbors(const SceneRecord& scene, int target_id, std::size_t t,
                                          const NeighborQuery& query, const LocalFrame& frame);
// Same, in the target's own frame at t.
std::vector<NeighborView> query_neighbors(const SceneRecord& scene, int target_id, std::size_t t,
                                          const NeighborQuery& query);

// Kinematic states from positions at spacing dt. Velocity and acceleration at
// the sequence start repeat the first computable value.
std::vector<AgentState> finite_difference_states(std::span<const Vec2> positions, double dt);

}  // namespace contextvae::geometry
