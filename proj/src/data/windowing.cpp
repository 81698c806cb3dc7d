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

#include "contextvae/data/windowing.hpp"

#include <algorithm>
#include <memory>

#include "contextvae/error.hpp"

namespace contextvae::data {

void WindowConfig::validate() const {
  if (T_min < 2 || T_max < T_min) throw ConfigError("windowing: need 2 <= T_min <= T_max");
  if (H < 1) throw ConfigError("windowing: H must be >= 1");
  if (!(query.radius > 0.0)) throw ConfigError("windowing: neighbor radius must be > 0");
  if (!(query.horizon_cap > 0.0)) throw ConfigError("windowing: horizon cap must be > 0");
}

std::vector<Sample> make_windows(const SceneRecord& scene, const WindowConfig& config,
                                 const std::map<int, AgentTruth>* truth) {
  config.validate();
  std::vector<int> targets = config.targets;
  if (targets.empty()) targets = scene.objects_of_interest;
  if (targets.empty()) {
    for (const auto& f : scene.frames)
      for (const auto& a : f.agents) targets.push_back(a.id);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  }

  const int L = static_cast<int>(scene.frames.size());
  std::vector<Sample> out;
  for (int id : targets) {
    const AgentTruth* tr = nullptr;
    if (truth != nullptr)
      if (auto it = truth->find(id); it != truth->end()) tr = &it->second;
    for (int e = config.T_min - 1; e + config.H < L; ++e) {
      const int T = std::min(config.T_max, e + 1);
      const int first = e - T + 1;
      bool ok = true;
      for (int f = first; f <= e + config.H && ok; ++f) {
        const AgentState* s = scene.frames[f].find(id);
        ok = s != nullptr && s->valid;
      }
      if (!ok) continue;

      Sample smp;
      ObservationWindow& w = smp.window;
      w.scene_id = scene.scene_id;
      w.target_id = id;
      w.first_frame = static_cast<std::size_t>(first);
      w.dt = scene.dt();
      w.frame = geometry::build_local_frame(*scene.frames[first].find(id));
      for (int f = first; f <= e; ++f) {
        w.states.push_back(w.frame.state_to_local(*scene.frames[f].find(id)));
        w.neighbors.push_back(geometry::query_neighbors(scene, id, static_cast<std::size_t>(f),
                                                        config.query, w.frame));
      }
      Vec2 prev = w.states.back().position;
      for (int f = e + 1; f <= e + config.H; ++f) {
        const AgentState local = w.frame.state_to_local(*scene.frames[f].find(id));
        smp.future.states.push_back(local);
        smp.future.neighbors.push_back(geometry::query_neighbors(
            scene, id, static_cast<std::size_t>(f), config.query, w.frame));
        smp.future.displacements.push_back(local.position - prev);
        prev = local.position;
      }
      if (config.rasterize)
        w.raster = std::make_shared<const semantic_map::RasterMap>(
            semantic_map::rasterize(scene.vector_map, w.frame, config.raster_options));
      if (tr != nullptr) {
        smp.maneuver = tr->maneuver;
        if (static_cast<int>(tr->clean.size()) > e + config.H)
          smp.oracle_future.assign(tr->clean.begin() + e + 1, tr->clean.begin() + e + 1 + config.H);
      }
      out.push_back(std::move(smp));
    }
  }
  return out;
}

std::vector<Sample> make_dataset(const std::vector<LabeledScene>& scenes, const WindowConfig& config) {
  std::vector<Sample> out;
  for (const auto& s : scenes) {
    auto w = make_windows(s.scene, config, &s.truth);
    std::move(w.begin(), w.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace contextvae::data
