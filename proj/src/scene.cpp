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

#include "contextvae/scene.hpp"

#include <algorithm>
#include <cmath>

#include "contextvae/error.hpp"

namespace contextvae {

std::string_view agent_type_name(AgentType type) {
  switch (type) {
    case AgentType::kVehicle:
      return "vehicle";
    case AgentType::kPedestrian:
      return "pedestrian";
    case AgentType::kCyclist:
      return "cyclist";
    case AgentType::kOther:
      return "other";
  }
  return "other";
}

AgentType agent_type_from_name(std::string_view name) {
  if (name == "vehicle") return AgentType::kVehicle;
  if (name == "pedestrian") return AgentType::kPedestrian;
  if (name == "cyclist") return AgentType::kCyclist;
  return AgentType::kOther;
}

const AgentState* SceneFrame::find(int id) const {
  for (const auto& e : agents)
    if (e.id == id) return &e.state;
  return nullptr;
}

std::optional<std::vector<Vec2>> SceneRecord::track(int id, std::size_t first,
                                                    std::size_t count) const {
  if (first + count > frames.size()) return std::nullopt;
  std::vector<Vec2> out;
  out.reserve(count);
  for (std::size_t t = first; t < first + count; ++t) {
    const AgentState* s = frames[t].find(id);
    if (s == nullptr || !s->valid) return std::nullopt;
    out.push_back(s->position);
  }
  return out;
}

void SceneRecord::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps))
    throw InvalidInput("scene " + scene_id + ": fps must be positive");
  const double step = 1.0 / fps;
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const double gap = frames[t].timestamp - frames[t - 1].timestamp;
    if (!(gap > 0.0) || std::abs(gap - step) > 1e-6 * std::max(1.0, step))
      throw InvalidInput("scene " + scene_id + ": timestamps must advance by 1/fps at frame " +
                         std::to_string(t));
  }
  for (int id : objects_of_interest) {
    const bool present = std::any_of(frames.begin(), frames.end(),
                                     [id](const SceneFrame& f) { return f.find(id) != nullptr; });
    if (!present)
      throw InvalidInput("scene " + scene_id + ": object of interest " + std::to_string(id) +
                         " never appears");
  }
}

}  // namespace contextvae
