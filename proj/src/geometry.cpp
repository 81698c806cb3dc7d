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

#include "contextvae/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "contextvae/error.hpp"

namespace contextvae::geometry {

LocalFrame::LocalFrame(Vec2 origin, double rotation)
    : origin_(origin), rotation_(rotation), cos_(std::cos(rotation)), sin_(std::sin(rotation)) {}

Vec2 LocalFrame::vector_to_local(Vec2 w) const {
  return {cos_ * w.x + sin_ * w.y, -sin_ * w.x + cos_ * w.y};
}

Vec2 LocalFrame::vector_to_world(Vec2 l) const {
  return {cos_ * l.x - sin_ * l.y, sin_ * l.x + cos_ * l.y};
}

Vec2 LocalFrame::to_local(Vec2 world) const { return vector_to_local(world - origin_); }

Vec2 LocalFrame::to_world(Vec2 local) const { return vector_to_world(local) + origin_; }

double LocalFrame::heading_to_local(double world_heading) const {
  return wrap_angle(world_heading - rotation_);
}

AgentState LocalFrame::state_to_local(const AgentState& world) const {
  AgentState out = world;
  out.position = to_local(world.position);
  out.velocity = vector_to_local(world.velocity);
  out.acceleration = vector_to_local(world.acceleration);
  out.heading = heading_to_local(world.heading);
  return out;
}

double effective_heading(const AgentState& state) {
  if (state.velocity.norm() < kStationarySpeed) return wrap_angle(state.heading);
  return state.velocity.angle();
}

LocalFrame build_local_frame(const AgentState& anchor) {
  if (!anchor.finite()) throw InvalidInput("build_local_frame: non-finite anchor state");
  return LocalFrame(anchor.position, effective_heading(anchor));
}

std::vector<Vec2> to_displacements(std::span<const Vec2> positions) {
  if (positions.empty()) throw InvalidInput("to_displacements: empty position sequence");
  std::vector<Vec2> out;
  out.reserve(positions.size() - 1);
  for (std::size_t t = 1; t < positions.size(); ++t) out.push_back(positions[t] - positions[t - 1]);
  return out;
}

std::vector<Vec2> reconstruct_trajectory(Vec2 last_position, std::span<const Vec2> displacements) {
  std::vector<Vec2> out;
  out.reserve(displacements.size());
  Vec2 p = last_position;
  for (const Vec2& d : displacements) {
    p += d;
    if (!p.finite()) throw InvalidInput("reconstruct_trajectory: non-finite displacement");
    out.push_back(p);
  }
  return out;
}

SocialFeatures compute_social_features(const AgentState& self, const NeighborView& neighbor,
                                       double horizon_cap) {
  if (!(horizon_cap > 0.0)) throw InvalidInput("compute_social_features: horizon_cap must be > 0");
  const Vec2 dp = neighbor.rel_position;
  const Vec2 dv = neighbor.rel_velocity;
  SocialFeatures f;
  f.distance = dp.norm();
  f.bearing = f.distance > 0.0 ? wrap_angle(dp.angle() - effective_heading(self)) : 0.0;
  const double speed2 = dv.squared_norm();
  double t_star = 0.0;
  if (speed2 > 0.0) t_star = std::clamp(-dp.dot(dv) / speed2, 0.0, horizon_cap);
  f.min_predicted_distance = std::min((dp + dv * t_star).norm(), f.distance);
  return f;
}

std::vector<NeighborView> query_neighbors(const SceneRecord& scene, int target_id, std::size_t t,
                                          const NeighborQuery& query, const LocalFrame& frame) {
  if (t >= scene.frames.size()) throw InvalidInput("query_neighbors: frame index out of range");
  const SceneFrame& f = scene.frames[t];
  const AgentState* target = f.find(target_id);
  if (target == nullptr)
    throw NotFound("query_neighbors: agent " + std::to_string(target_id) + " not in frame " +
                   std::to_string(t));
  if (!target->valid) throw InvalidInput("query_neighbors: target invalid at frame");

  const AgentState self_local = frame.state_to_local(*target);
  const double r2 = query.radius * query.radius;
  std::vector<NeighborView> out;
  for (const AgentEntry& e : f.agents) {
    if (e.id == target_id || !e.state.valid) continue;
    const Vec2 delta = e.state.position - target->position;
    if (delta.squared_norm() > r2) continue;
    NeighborView v;
    v.agent_id = e.id;
    v.rel_position = frame.vector_to_local(delta);
    v.rel_velocity = frame.vector_to_local(e.state.velocity - target->velocity);
    v.social = compute_social_features(self_local, v, query.horizon_cap);
    out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const NeighborView& a, const NeighborView& b) {
    if (a.social.distance != b.social.distance) return a.social.distance < b.social.distance;
    return a.agent_id < b.agent_id;
  });
  return out;
}

std::vector<NeighborView> query_neighbors(const SceneRecord& scene, int target_id, std::size_t t,
                                          const NeighborQuery& query) {
  if (t >= scene.frames.size()) throw InvalidInput("query_neighbors: frame index out of range");
  const AgentState* target = scene.frames[t].find(target_id);
  if (target == nullptr)
    throw NotFound("query_neighbors: agent " + std::to_string(target_id) + " not in frame");
  return query_neighbors(scene, target_id, t, query, build_local_frame(*target));
}

std::vector<AgentState> finite_difference_states(std::span<const Vec2> positions, double dt) {
  if (!(dt > 0.0)) throw InvalidInput("finite_difference_states: dt must be > 0");
  if (positions.empty()) throw InvalidInput("finite_difference_states: empty position sequence");
  const std::size_t n = positions.size();
  std::vector<AgentState> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t].position = positions[t];
  if (n == 1) return out;

  for (std::size_t t = 1; t < n; ++t) out[t].velocity = (positions[t] - positions[t - 1]) / dt;
  out[0].velocity = out[1].velocity;
  if (n >= 3) {
    for (std::size_t t = 2; t < n; ++t)
      out[t].acceleration = (out[t].velocity - out[t - 1].velocity) / dt;
    out[0].acceleration = out[1].acceleration = out[2].acceleration;
  }

  double heading = out[0].velocity.norm() >= kStationarySpeed ? out[0].velocity.angle() : 0.0;
  for (auto& s : out) {
    if (s.velocity.norm() >= kStationarySpeed) heading = s.velocity.angle();
    s.heading = heading;
  }
  return out;
}

}  // namespace contextvae::geometry
