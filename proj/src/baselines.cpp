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

#include "contextvae/baselines.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "contextvae/error.hpp"

namespace contextvae::baselines {

std::vector<Vec2> constant_velocity_predict(std::span<const Vec2> observed, int H) {
  if (observed.size() < 2) throw InvalidInput("constant_velocity_predict: need >= 2 positions");
  if (H < 0) throw InvalidInput("constant_velocity_predict: negative horizon");
  const Vec2 last = observed.back();
  const Vec2 step = last - observed[observed.size() - 2];
  std::vector<Vec2> out;
  out.reserve(H);
  for (int tau = 1; tau <= H; ++tau) out.push_back(last + step * static_cast<double>(tau));
  return out;
}

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

Vec4 motion(const Vec4& s, double dt) {
  return {s(0) + s(2) * std::cos(s(3)) * dt, s(1) + s(2) * std::sin(s(3)) * dt, s(2), s(3)};
}

Mat4 motion_jacobian(const Vec4& s, double dt) {
  Mat4 f = Mat4::Identity();
  const double c = std::cos(s(3)), si = std::sin(s(3));
  f(0, 2) = c * dt;
  f(0, 3) = -s(2) * si * dt;
  f(1, 2) = si * dt;
  f(1, 3) = s(2) * c * dt;
  return f;
}

}  // namespace

std::vector<Vec2> kalman_predict(std::span<const Vec2> observed, double dt, int H,
                                 const EkfConfig& config) {
  if (observed.size() < 2) throw InvalidInput("kalman_predict: need >= 2 positions");
  if (!(dt > 0.0)) throw InvalidInput("kalman_predict: dt must be > 0");
  if (H < 0) throw InvalidInput("kalman_predict: negative horizon");

  const Vec2 d = observed[1] - observed[0];
  Vec4 s(observed[1].x, observed[1].y, d.norm() / dt, d.norm() > 0.0 ? d.angle() : 0.0);
  Mat4 p = Mat4::Identity() * config.p0;
  Mat4 q = Mat4::Zero();
  q(2, 2) = config.q_speed;
  q(3, 3) = config.q_heading;
  Eigen::Matrix<double, 2, 4> hm = Eigen::Matrix<double, 2, 4>::Zero();
  hm(0, 0) = 1.0;
  hm(1, 1) = 1.0;
  const Eigen::Matrix2d r = Eigen::Matrix2d::Identity() * config.r_position;

  for (std::size_t t = 2; t < observed.size(); ++t) {
    const Mat4 f = motion_jacobian(s, dt);
    s = motion(s, dt);
    p = f * p * f.transpose() + q;
    const Eigen::Vector2d innovation(observed[t].x - s(0), observed[t].y - s(1));
    const Eigen::Matrix2d sm = hm * p * hm.transpose() + r;
    const Eigen::Matrix<double, 4, 2> k = p * hm.transpose() * sm.inverse();
    s += k * innovation;
    p = (Mat4::Identity() - k * hm) * p;
  }

  std::vector<Vec2> out;
  out.reserve(H);
  for (int tau = 0; tau < H; ++tau) {
    s = motion(s, dt);
    out.emplace_back(s(0), s(1));
  }
  return out;
}

}  // namespace contextvae::baselines
