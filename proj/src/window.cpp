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

#include "contextvae/window.hpp"

#include "contextvae/error.hpp"

namespace contextvae {

void ObservationWindow::validate() const {
  if (states.size() < 2) throw InvalidInput("observation window needs at least 2 frames");
  if (neighbors.size() != states.size())
    throw InvalidInput("observation window: one neighbor list per frame expected");
  for (const auto& s : states)
    if (!s.finite()) throw InvalidInput("observation window: non-finite state");
  if (!(dt > 0.0)) throw InvalidInput("observation window: dt must be > 0");
  if (raster && !raster->valid_shape()) throw InvalidInput("observation window: bad raster shape");
}

std::vector<Vec2> FutureTruth::local_positions(const ObservationWindow& w) const {
  return geometry::reconstruct_trajectory(w.states.back().position, displacements);
}

std::vector<Vec2> FutureTruth::world_positions(const ObservationWindow& w) const {
  auto p = local_positions(w);
  for (auto& v : p) v = w.frame.to_world(v);
  return p;
}

}  // namespace contextvae
