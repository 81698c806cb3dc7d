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

#include "contextvae/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "contextvae/error.hpp"
#include "contextvae/geometry.hpp"

namespace contextvae::data {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::kStraight: return "straight";
    case Topology::kTJunction: return "t_junction";
    case Topology::kFourWay: return "four_way";
    case Topology::kCurve: return "curve";
  }
  return "?";
}

// Arm a points from the junction center along angle a * 90 degrees.
Vec2 arm_dir(int a) { return Vec2{1, 0}.rotated(a * kPi / 2); }
Vec2 arm_left(int a) { const Vec2 u = arm_dir(a); return {-u.y, u.x}; }

int arm_of(Vec2 dir) {
  const int a = static_cast<int>(std::lround(std::atan2(dir.y, dir.x) / (kPi / 2)));
  return ((a % 4) + 4) % 4;
}

// Exit arm for an agent entering from arm `a`.
int exit_arm(int a, Maneuver m) {
  const Vec2 travel = -arm_dir(a);
  switch (m) {
    case Maneuver::kLeft: return arm_of(travel.rotated(kPi / 2));
    case Maneuver::kRight: return arm_of(travel.rotated(-kPi / 2));
    default: return arm_of(travel);
  }
}

class Path {
 public:
  void add(Vec2 p) {
    if (!pts_.empty()) {
      const double l = (p - pts_.back()).norm();
      if (l <= 1e-12) return;
      cum_.push_back(cum_.back() + l);
    } else {
      cum_.push_back(0.0);
    }
    pts_.push_back(p);
  }
  Vec2 at(double s) const {
    if (s <= 0.0) return pts_.front();
    if (s >= cum_.back()) {
      const Vec2 dir = (pts_.back() - pts_[pts_.size() - 2]) / (cum_.back() - cum_[cum_.size() - 2]);
      return pts_.back() + dir * (s - cum_.back());
    }
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    const double f = (s - cum_[i - 1]) / (cum_[i] - cum_[i - 1]);
    return pts_[i - 1] + (pts_[i] - pts_[i - 1]) * f;
  }

 private:
  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

struct AgentPlan {
  int arm = 0;
  int lane = 0;
  Maneuver maneuver = Maneuver::kStraight;
  double speed = 0.0;
  double start = 0.0;  // distance before the stop line at frame 0
};

VectorMap build_map(const SyntheticConfig& c, const std::array<bool, 4>& open) {
  const double lw = c.lane_width;
  const double hw = lw * c.lanes_per_direction;
  const double L = c.arm_length;
  VectorMap m;
  m.drivable_areas.push_back({{-hw, -hw}, {hw, -hw}, {hw, hw}, {-hw, hw}});
  for (int a = 0; a < 4; ++a) {
    if (!open[a]) continue;
    const Vec2 u = arm_dir(a), n = arm_left(a);
    m.drivable_areas.push_back({u * hw - n * hw, u * L - n * hw, u * L + n * hw, u * hw + n * hw});
    m.crosswalks.push_back({u * (hw + 1) - n * hw, u * (hw + 4) - n * hw, u * (hw + 4) + n * hw,
                            u * (hw + 1) + n * hw});
    m.road_dividers.push_back({u * hw, u * L});
    for (int k = 1; k < c.lanes_per_direction; ++k)
      for (double side : {-1.0, 1.0})
        m.lane_dividers.push_back({u * hw + n * (side * k * lw), u * L + n * (side * k * lw)});
    for (int k = 0; k < c.lanes_per_direction; ++k)
      for (double side : {-1.0, 1.0})
        m.lane_centerlines.push_back(
            {u * hw + n * (side * (k + 0.5) * lw), u * L + n * (side * (k + 0.5) * lw)});
  }
  return m;
}

Path build_path(const SyntheticConfig& c, const AgentPlan& p) {
  const double lw = c.lane_width;
  const double hw = lw * c.lanes_per_direction;
  const Vec2 u = arm_dir(p.arm), n = arm_left(p.arm);
  const Vec2 travel = -u;
  const int e = exit_arm(p.arm, p.maneuver);
  const Vec2 ue = arm_dir(e), ne = arm_left(e);
  const int out_lane = p.maneuver == Maneuver::kLeft    ? 0
                       : p.maneuver == Maneuver::kRight ? c.lanes_per_direction - 1
                                                        : p.lane;
  const Vec2 in_off = n * ((p.lane + 0.5) * lw);
  const Vec2 out_off = ne * (-(out_lane + 0.5) * lw);
  const Vec2 p0 = u * hw + in_off;
  const Vec2 p3 = ue * hw + out_off;

  Path path;
  path.add(u * (hw + p.start) + in_off);
  path.add(p0);
  if (p.maneuver != Maneuver::kStraight) {
    const double handle = c.turn_handle * (p3 - p0).norm();
    const Vec2 p1 = p0 + travel * handle;
    const Vec2 p2 = p3 - ue * handle;
    for (int i = 1; i < 64; ++i) {
      const double t = i / 64.0, s = 1 - t;
      path.add(p0 * (s * s * s) + p1 * (3 * s * s * t) + p2 * (3 * s * t * t) + p3 * (t * t * t));
    }
  }
  path.add(p3);
  path.add(ue * c.arm_length + out_off);
  return path;
}

struct Motion {
  Path path;
  double offset = 0.0;  // path distance at frame 0
  double speed = 0.0;
  Maneuver maneuver = Maneuver::kStraight;
};

// Random pose, per-frame noisy states and labels for agents moving at
// constant speed along their paths.
LabeledScene emit_scene(const SyntheticConfig& c, std::size_t index, std::mt19937_64& rng,
                        VectorMap map, const std::vector<Motion>& motions) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const double theta = c.random_pose ? uniform(-kPi, kPi) : 0.0;
  const Vec2 shift = c.random_pose ? Vec2{uniform(-500, 500), uniform(-500, 500)} : Vec2{};
  auto pose = [&](Vec2 p) { return p.rotated(theta) + shift; };

  LabeledScene out;
  SceneRecord& s = out.scene;
  s.scene_id = "syn-" + std::to_string(c.seed) + "-" + std::to_string(index);
  s.fps = c.fps;
  s.vector_map = std::move(map);
  for (auto* layer : {&s.vector_map.drivable_areas, &s.vector_map.crosswalks,
                      &s.vector_map.lane_dividers, &s.vector_map.road_dividers,
                      &s.vector_map.lane_centerlines})
    for (auto& line : *layer)
      for (auto& p : line) p = pose(p);
  s.frames.resize(c.frames);
  for (int f = 0; f < c.frames; ++f) s.frames[f].timestamp = f / c.fps;

  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < motions.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    const Motion& m = motions[i];
    AgentTruth truth{m.maneuver, {}};
    std::vector<Vec2> noisy;
    for (int f = 0; f < c.frames; ++f) {
      const Vec2 clean = pose(m.path.at(m.offset + m.speed * f / c.fps));
      truth.clean.push_back(clean);
      noisy.push_back(clean + Vec2{noise(rng), noise(rng)} * c.noise_std);
    }
    const auto states = geometry::finite_difference_states(noisy, 1.0 / c.fps);
    for (int f = 0; f < c.frames; ++f) s.frames[f].agents.push_back({id, states[f]});
    out.truth.emplace(id, std::move(truth));
    s.objects_of_interest.push_back(id);
  }
  return out;
}

// Reference line of a curved road: lead-in along +x ending at the origin, an
// arc, and a lead-out, sampled about every meter. Each sample carries its
// unit left normal.
struct RoadSample {
  Vec2 p;
  Vec2 left;
};

std::vector<RoadSample> curve_reference(double lead, double radius, double angle) {
  std::vector<RoadSample> out;
  const int n_lead = static_cast<int>(std::ceil(lead));
  for (int i = 0; i <= n_lead; ++i) out.push_back({{-lead + lead * i / n_lead, 0.0}, {0.0, 1.0}});
  // Arc center on the inside of the bend.
  const double side = angle >= 0 ? 1.0 : -1.0;
  const Vec2 center{0.0, side * radius};
  const int n_arc = std::max(2, static_cast<int>(std::ceil(radius * std::abs(angle))));
  for (int i = 1; i <= n_arc; ++i) {
    const double a = angle * i / n_arc;
    const Vec2 tangent = Vec2{1.0, 0.0}.rotated(a);
    out.push_back({(Vec2{0.0, 0.0} - center).rotated(a) + center, {-tangent.y, tangent.x}});
  }
  const RoadSample end = out.back();
  const Vec2 dir{end.left.y, -end.left.x};
  for (int i = 1; i <= n_lead; ++i) out.push_back({end.p + dir * (lead * i / n_lead), end.left});
  return out;
}

std::vector<Vec2> offset_line(const std::vector<RoadSample>& ref, double offset) {
  std::vector<Vec2> out;
  for (const auto& r : ref) out.push_back(r.p + r.left * offset);
  return out;
}

LabeledScene generate_curve(const SyntheticConfig& c, std::size_t index, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  const double lw = c.lane_width;
  const double hw = lw * c.lanes_per_direction;
  const double radius = uniform(c.curve_min_radius, c.curve_max_radius);
  const double angle = (unit(rng) < 0.5 ? -1.0 : 1.0) * uniform(0.25, 1.0) * c.curve_max_angle;
  const auto ref = curve_reference(c.arm_length, radius, angle);

  VectorMap m;
  auto right = offset_line(ref, -hw), left = offset_line(ref, hw);
  Polygon area = right;
  area.insert(area.end(), left.rbegin(), left.rend());
  m.drivable_areas.push_back(std::move(area));
  m.road_dividers.push_back(offset_line(ref, 0.0));
  for (int k = 1; k < c.lanes_per_direction; ++k)
    for (double side : {-1.0, 1.0}) m.lane_dividers.push_back(offset_line(ref, side * k * lw));
  for (int k = 0; k < c.lanes_per_direction; ++k)
    for (double side : {-1.0, 1.0}) m.lane_centerlines.push_back(offset_line(ref, side * (k + 0.5) * lw));

  // Lane k of direction +1 runs along the reference line on its right;
  // direction -1 runs the other way on the left.
  auto lane_path = [&](int direction, int lane) {
    auto pts = offset_line(ref, -direction * (lane + 0.5) * lw);
    if (direction < 0) std::reverse(pts.begin(), pts.end());
    Path p;
    for (const auto& q : pts) p.add(q);
    return p;
  };
  struct Plan {
    int direction = 1;
    int lane = 0;
    double speed = 0.0;
    double offset = 0.0;
  };
  const int n = std::uniform_int_distribution<int>(c.min_agents, c.max_agents)(rng);
  std::vector<Plan> plans;
  for (int i = 0; i < n; ++i) {
    Plan p;
    bool placed = false;
    if (!plans.empty() && unit(rng) < c.follow_prob) {
      p = plans[std::uniform_int_distribution<std::size_t>(0, plans.size() - 1)(rng)];
      p.offset -= uniform(c.min_gap, c.max_gap);
      placed = p.offset >= 0.0;
    }
    if (!placed) {
      p.direction = unit(rng) < 0.5 ? 1 : -1;
      p.lane = std::uniform_int_distribution<int>(0, c.lanes_per_direction - 1)(rng);
      p.speed = uniform(c.min_speed, c.max_speed);
      // Reach the start of the bend after the lead time.
      p.offset = c.arm_length - p.speed * uniform(c.min_lead_time, c.max_lead_time);
    }
    plans.push_back(p);
  }
  std::vector<Motion> motions;
  for (const auto& p : plans)
    motions.push_back({lane_path(p.direction, p.lane), p.offset, p.speed, Maneuver::kStraight});
  return emit_scene(c, index, rng, std::move(m), motions);
}

bool feasible(const std::array<bool, 4>& open, int arm, Maneuver m) {
  return open[arm] && open[exit_arm(arm, m)];
}

LabeledScene generate_one(const SyntheticConfig& c, std::size_t index) {
  std::mt19937_64 rng(mix(c.seed, index));
  if (c.topology == Topology::kCurve) return generate_curve(c, index, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::array<bool, 4> open{true, true, true, true};
  if (c.topology == Topology::kStraight) {
    open = {true, false, true, false};
  } else if (c.topology == Topology::kTJunction) {
    open[std::uniform_int_distribution<int>(0, 3)(rng)] = false;
  } else if (unit(rng) < c.arm_closure_prob) {
    open[std::uniform_int_distribution<int>(0, 3)(rng)] = false;
  }

  const Maneuver kinds[3] = {Maneuver::kStraight, Maneuver::kLeft, Maneuver::kRight};
  std::vector<int> arms;
  for (int a = 0; a < 4; ++a) {
    bool any = false;
    for (int m = 0; m < 3; ++m) any |= c.turn_probabilities[m] > 0 && feasible(open, a, kinds[m]);
    if (any) arms.push_back(a);
  }
  if (arms.empty()) throw ConfigError("synthetic: no arm admits a maneuver with positive probability");

  const double hw = c.lane_width * c.lanes_per_direction;
  const double max_start = c.arm_length - hw - 1.0;
  const int n = std::uniform_int_distribution<int>(c.min_agents, c.max_agents)(rng);
  std::vector<AgentPlan> plans;
  for (int i = 0; i < n; ++i) {
    AgentPlan p;
    bool placed = false;
    if (!plans.empty() && unit(rng) < c.follow_prob) {
      const auto& lead = plans[std::uniform_int_distribution<std::size_t>(0, plans.size() - 1)(rng)];
      p = lead;
      p.start = lead.start + uniform(c.min_gap, c.max_gap);
      placed = p.start <= max_start;
    }
    if (!placed) {
      p.arm = arms[std::uniform_int_distribution<std::size_t>(0, arms.size() - 1)(rng)];
      double w[3], total = 0.0;
      for (int m = 0; m < 3; ++m) {
        w[m] = feasible(open, p.arm, kinds[m]) ? c.turn_probabilities[m] : 0.0;
        total += w[m];
      }
      double r = unit(rng) * total;
      int pick = -1;
      for (int m = 0; m < 3; ++m) {
        if (w[m] <= 0.0) continue;
        pick = m;
        if (r < w[m]) break;
        r -= w[m];
      }
      p.maneuver = kinds[pick];
      if (p.maneuver == Maneuver::kLeft) p.lane = 0;
      else if (p.maneuver == Maneuver::kRight) p.lane = c.lanes_per_direction - 1;
      else if (c.dedicated_turn_lanes)
        p.lane = std::uniform_int_distribution<int>(1, c.lanes_per_direction - 2)(rng);
      else p.lane = std::uniform_int_distribution<int>(0, c.lanes_per_direction - 1)(rng);
      p.speed = uniform(c.min_speed, c.max_speed);
      p.start = p.speed * uniform(c.min_lead_time, c.max_lead_time);
    }
    plans.push_back(p);
  }

  // Paths start at the agent's frame-0 position.
  std::vector<Motion> motions;
  for (const auto& p : plans) motions.push_back({build_path(c, p), 0.0, p.speed, p.maneuver});
  return emit_scene(c, index, rng, build_map(c, open), motions);
}

}  // namespace

void SyntheticConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("synthetic config: " + m); };
  if (lanes_per_direction < 1) fail("lanes_per_direction must be >= 1");
  if (!(lane_width > 0)) fail("lane_width must be > 0");
  if (dedicated_turn_lanes && lanes_per_direction < 3)
    fail("dedicated_turn_lanes needs lanes_per_direction >= 3");
  double total = 0.0;
  for (double p : turn_probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) fail("turn probabilities must lie in [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("turn probabilities must sum to 1");
  if ((topology == Topology::kStraight || topology == Topology::kCurve) && turn_probabilities[0] != 1.0)
    fail("a road without a junction admits only the straight maneuver");
  if (!(curve_min_radius > lane_width * lanes_per_direction && curve_max_radius >= curve_min_radius))
    fail("need road half-width < curve_min_radius <= curve_max_radius");
  if (!(curve_max_angle > 0 && curve_max_angle <= kPi)) fail("curve_max_angle must lie in (0, pi]");
  if (!(arm_closure_prob >= 0.0 && arm_closure_prob <= 1.0)) fail("arm_closure_prob must lie in [0, 1]");
  if (min_agents < 1 || max_agents < min_agents) fail("need 1 <= min_agents <= max_agents");
  if (!(min_speed > 0 && max_speed >= min_speed)) fail("need 0 < min_speed <= max_speed");
  if (!(follow_prob >= 0.0 && follow_prob <= 1.0)) fail("follow_prob must lie in [0, 1]");
  if (!(min_gap > 0 && max_gap >= min_gap)) fail("need 0 < min_gap <= max_gap");
  if (!(noise_std >= 0)) fail("noise_std must be >= 0");
  if (!(fps > 0)) fail("fps must be > 0");
  if (frames < 2) fail("frames must be >= 2");
  if (!(min_lead_time >= 0 && max_lead_time >= min_lead_time)) fail("bad lead time range");
  if (!(turn_handle > 0)) fail("turn_handle must be > 0");
  const double hw = lane_width * lanes_per_direction;
  if (arm_length < hw + max_speed * max_lead_time + 1.0)
    fail("arm_length too short for max_speed * max_lead_time");
}

json to_json(const SyntheticConfig& c) {
  return {{"topology", topology_name(c.topology)},
          {"lanes_per_direction", c.lanes_per_direction},
          {"lane_width", c.lane_width},
          {"dedicated_turn_lanes", c.dedicated_turn_lanes},
          {"arm_length", c.arm_length},
          {"arm_closure_prob", c.arm_closure_prob},
          {"turn_handle", c.turn_handle},
          {"curve_min_radius", c.curve_min_radius},
          {"curve_max_radius", c.curve_max_radius},
          {"curve_max_angle", c.curve_max_angle},
          {"turn_probabilities", c.turn_probabilities},
          {"min_agents", c.min_agents},
          {"max_agents", c.max_agents},
          {"min_speed", c.min_speed},
          {"max_speed", c.max_speed},
          {"follow_prob", c.follow_prob},
          {"min_gap", c.min_gap},
          {"max_gap", c.max_gap},
          {"noise_std", c.noise_std},
          {"fps", c.fps},
          {"frames", c.frames},
          {"min_lead_time", c.min_lead_time},
          {"max_lead_time", c.max_lead_time},
          {"random_pose", c.random_pose},
          {"seed", c.seed}};
}

SyntheticConfig synthetic_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("synthetic config must be a JSON object");
  SyntheticConfig c;
  auto get = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(out);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("synthetic config key '") + key + "': " + e.what());
    }
  };
  std::string topo = topology_name(c.topology);
  get("topology", topo);
  if (topo == "straight") c.topology = Topology::kStraight;
  else if (topo == "t_junction") c.topology = Topology::kTJunction;
  else if (topo == "four_way") c.topology = Topology::kFourWay;
  else if (topo == "curve") c.topology = Topology::kCurve;
  else throw ConfigError("synthetic config: unknown topology '" + topo + "'");
  get("lanes_per_direction", c.lanes_per_direction);
  get("lane_width", c.lane_width);
  get("dedicated_turn_lanes", c.dedicated_turn_lanes);
  get("arm_length", c.arm_length);
  get("arm_closure_prob", c.arm_closure_prob);
  get("turn_handle", c.turn_handle);
  get("curve_min_radius", c.curve_min_radius);
  get("curve_max_radius", c.curve_max_radius);
  get("curve_max_angle", c.curve_max_angle);
  get("turn_probabilities", c.turn_probabilities);
  get("min_agents", c.min_agents);
  get("max_agents", c.max_agents);
  get("min_speed", c.min_speed);
  get("max_speed", c.max_speed);
  get("follow_prob", c.follow_prob);
  get("min_gap", c.min_gap);
  get("max_gap", c.max_gap);
  get("noise_std", c.noise_std);
  get("fps", c.fps);
  get("frames", c.frames);
  get("min_lead_time", c.min_lead_time);
  get("max_lead_time", c.max_lead_time);
  get("random_pose", c.random_pose);
  get("seed", c.seed);
  c.validate();
  return c;
}

std::vector<LabeledScene> generate_scenarios(const SyntheticConfig& config, std::size_t n) {
  config.validate();
  if (n == 0) throw InvalidInput("generate_scenarios: n must be >= 1");
  std::vector<LabeledScene> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_one(config, i));
  return out;
}

SceneRecord downsample(const SceneRecord& scene, int factor) {
  if (factor < 1) throw InvalidInput("downsample: factor must be >= 1");
  if (factor == 1) return scene;
  SceneRecord out = scene;
  out.fps = scene.fps / factor;
  out.frames.clear();
  for (std::size_t f = 0; f < scene.frames.size(); f += static_cast<std::size_t>(factor))
    out.frames.push_back(scene.frames[f]);

  const double dt = 1.0 / out.fps;
  std::vector<int> ids;
  for (const auto& fr : out.frames)
    for (const auto& a : fr.agents) ids.push_back(a.id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  for (int id : ids) {
    // Recompute over each run of consecutive frames where the agent is valid.
    std::size_t f = 0;
    while (f < out.frames.size()) {
      std::vector<AgentState*> run;
      for (; f < out.frames.size(); ++f) {
        AgentState* s = nullptr;
        for (auto& a : out.frames[f].agents)
          if (a.id == id) s = &a.state;
        if (s == nullptr || !s->valid) break;
        run.push_back(s);
      }
      ++f;
      if (run.size() < 2) {
        for (auto* s : run) s->velocity = s->acceleration = {};
        continue;
      }
      std::vector<Vec2> pos;
      for (auto* s : run) pos.push_back(s->position);
      const auto states = geometry::finite_difference_states(pos, dt);
      for (std::size_t i = 0; i < run.size(); ++i) {
        run[i]->velocity = states[i].velocity;
        run[i]->acceleration = states[i].acceleration;
        if (states[i].velocity.norm() >= geometry::kStationarySpeed) run[i]->heading = states[i].heading;
      }
    }
  }
  return out;
}

LabeledScene downsample(const LabeledScene& scene, int factor) {
  LabeledScene out{downsample(scene.scene, factor), scene.truth};
  if (factor == 1) return out;
  for (auto& [id, t] : out.truth) {
    std::vector<Vec2> kept;
    for (std::size_t f = 0; f < t.clean.size(); f += static_cast<std::size_t>(factor))
      kept.push_back(t.clean[f]);
    t.clean = std::move(kept);
  }
  return out;
}

std::string maneuver_name(Maneuver m) {
  switch (m) {
    case Maneuver::kStraight: return "straight";
    case Maneuver::kLeft: return "left";
    case Maneuver::kRight: return "right";
    default: return "unknown";
  }
}

Maneuver maneuver_from_name(const std::string& name) {
  if (name == "straight") return Maneuver::kStraight;
  if (name == "left") return Maneuver::kLeft;
  if (name == "right") return Maneuver::kRight;
  return Maneuver::kUnknown;
}

}  // namespace contextvae::data
