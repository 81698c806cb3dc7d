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
#include <map>
#include <vector>

#include "json.hpp"

#include "contextvae/scene.hpp"
#include "contextvae/window.hpp"

namespace contextvae::data {

// Per-agent ground truth kept alongside synthetic scenes.
struct AgentTruth {
  Maneuver maneuver = Maneuver::kUnknown;
  std::vector<Vec2> clean;  // noiseless world positions, one per frame
};

struct LabeledScene {
  SceneRecord scene;
  std::map<int, AgentTruth> truth;
};

// kCurve: one two-way road bending through an arc; traffic follows it.
enum class Topology { kStraight, kTJunction, kFourWay, kCurve };

struct SyntheticConfig {
  Topology topology = Topology::kFourWay;
  int lanes_per_direction = 2;
  double lane_width = 3.5;
  // Left turns use only the innermost lane, right turns only the outermost,
  // straight traffic only the lanes in between (needs >= 3 lanes). Otherwise
  // straight traffic may use any lane.
  bool dedicated_turn_lanes = false;
  double arm_length = 80.0;
  // Four-way only: probability that one arm of a scene is closed.
  double arm_closure_prob = 0.3;
  // Bezier handle length as a fraction of the turn chord.
  double turn_handle = 0.55;
  // Curve only: arc radius range (m) and largest bend angle (rad).
  double curve_min_radius = 20.0;
  double curve_max_radius = 60.0;
  double curve_max_angle = 1.5707963267948966;
  // Straight, left, right.
  std::array<double, 3> turn_probabilities{1.0 / 3, 1.0 / 3, 1.0 / 3};
  int min_agents = 2;
  int max_agents = 5;
  double min_speed = 5.0;
  double max_speed = 12.0;
  // Chance that a new agent trails an earlier one in its lane and copies its
  // maneuver.
  double follow_prob = 0.3;
  double min_gap = 8.0;
  double max_gap = 15.0;
  double noise_std = 0.05;
  double fps = 10.0;
  int frames = 40;
  // Time from the first frame until an agent (not a follower) reaches the
  // stop line; longer than the observation window so prefixes carry no
  // maneuver information.
  double min_lead_time = 1.0;
  double max_lead_time = 2.5;
  bool random_pose = true;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;
};

nlohmann::json to_json(const SyntheticConfig& c);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);

std::vector<LabeledScene> generate_scenarios(const SyntheticConfig& config, std::size_t n);

// Keeps every factor-th frame from index 0 and recomputes velocities,
// accelerations and headings by finite differences at the new spacing.
SceneRecord downsample(const SceneRecord& scene, int factor);
LabeledScene downsample(const LabeledScene& scene, int factor);

std::string maneuver_name(Maneuver m);
Maneuver maneuver_from_name(const std::string& name);

}  // namespace contextvae::data
