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

#include <map>
#include <vector>

#include "contextvae/data/synthetic.hpp"
#include "contextvae/geometry.hpp"
#include "contextvae/semantic_map.hpp"
#include "contextvae/window.hpp"

namespace contextvae::data {

struct WindowConfig {
  int T_min = 5;
  int T_max = 5;
  int H = 15;
  geometry::NeighborQuery query;
  bool rasterize = true;
  semantic_map::RasterOptions raster_options;
  // Targets to window; empty means the scene's objects of interest, or every
  // agent when the scene names none.
  std::vector<int> targets;

  void validate() const;
};

// One window per (target, last observed frame e) with T = min(T_max, e + 1)
// >= T_min and e + H inside the scene. Windows touching an invalid or missing
// target frame are dropped.
std::vector<Sample> make_windows(const SceneRecord& scene, const WindowConfig& config,
                                 const std::map<int, AgentTruth>* truth = nullptr);

std::vector<Sample> make_dataset(const std::vector<LabeledScene>& scenes, const WindowConfig& config);

}  // namespace contextvae::data
