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

#include "contextvae/vec2.hpp"

namespace contextvae::baselines {

// x^{T+tau} = x^T + tau * (x^T - x^{T-1}).
std::vector<Vec2> constant_velocity_predict(std::span<const Vec2> observed, int H);

struct EkfConfig {
  double q_speed = 1e-2;    // process noise on speed per step
  double q_heading = 1e-2;  // process noise on heading per step
  double r_position = 1e-1; // measurement noise, m^2 per axis
  double p0 = 1.0;          // initial covariance diagonal
};

// Extended Kalman filter over (x, y, speed, heading) with a constant-speed,
// constant-heading motion model and position measurements, initialized from
// the first two positions, then rolled out open-loop for H steps.
std::vector<Vec2> kalman_predict(std::span<const Vec2> observed, double dt, int H,
                                 const EkfConfig& config = {});

}  // namespace contextvae::baselines
