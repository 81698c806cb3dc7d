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

#include "contextvae/data/interchange.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "contextvae/error.hpp"

namespace contextvae::data {

using nlohmann::json;

namespace {

json points(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

json layer(const std::vector<std::vector<Vec2>>& lines) {
  json a = json::array();
  for (const auto& l : lines) a.push_back(points(l));
  return a;
}

// Field access that reports "line N, field a.b[3].c" on failure.
class Reader {
 public:
  explicit Reader(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw ParseError("line " + std::to_string(line_) + ", field '" + path + "': " + what);
  }

  const json& member(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing");
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  int integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }

  double opt_number(const json& obj, const std::string& path, const char* key, double dflt) const {
    const auto it = obj.find(key);
    return it == obj.end() ? dflt : number(*it, join(path, key));
  }

  const json& array(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected an array");
    return v;
  }

  std::vector<Vec2> points(const json& v, const std::string& path) const {
    std::vector<Vec2> out;
    std::size_t i = 0;
    for (const auto& p : array(v, path)) {
      const std::string pp = path + "[" + std::to_string(i++) + "]";
      if (!p.is_array() || p.size() != 2) fail(pp, "expected [x, y]");
      out.emplace_back(number(p[0], pp + "[0]"), number(p[1], pp + "[1]"));
      if (!out.back().finite()) fail(pp, "non-finite coordinate");
    }
    return out;
  }

  std::vector<std::vector<Vec2>> layer(const json& map, const std::string& path, const char* key) const {
    std::vector<std::vector<Vec2>> out;
    const auto it = map.find(key);
    if (it == map.end()) return out;
    const std::string lp = join(path, key);
    std::size_t i = 0;
    for (const auto& l : array(*it, lp)) out.push_back(points(l, lp + "[" + std::to_string(i++) + "]"));
    return out;
  }

  static std::string join(const std::string& path, const char* key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::size_t line_;
};

}  // namespace

json scene_to_json(const LabeledScene& ls) {
  const SceneRecord& s = ls.scene;
  json frames = json::array();
  for (const auto& f : s.frames) {
    json agents = json::array();
    for (const auto& a : f.agents) {
      const auto& st = a.state;
      agents.push_back({{"id", a.id},
                        {"type", agent_type_name(st.type)},
                        {"x", st.position.x},
                        {"y", st.position.y},
                        {"vx", st.velocity.x},
                        {"vy", st.velocity.y},
                        {"ax", st.acceleration.x},
                        {"ay", st.acceleration.y},
                        {"heading", st.heading},
                        {"valid", st.valid}});
    }
    frames.push_back({{"timestamp", f.timestamp}, {"agents", std::move(agents)}});
  }
  const VectorMap& m = s.vector_map;
  json j{{"scene_id", s.scene_id},
         {"fps", s.fps},
         {"objects_of_interest", s.objects_of_interest},
         {"map",
          {{"drivable_areas", layer(m.drivable_areas)},
           {"crosswalks", layer(m.crosswalks)},
           {"lane_dividers", layer(m.lane_dividers)},
           {"road_dividers", layer(m.road_dividers)},
           {"lane_centerlines", layer(m.lane_centerlines)}}},
         {"frames", std::move(frames)}};
  if (!ls.truth.empty()) {
    json t = json::object();
    for (const auto& [id, tr] : ls.truth)
      t[std::to_string(id)] = {{"maneuver", maneuver_name(tr.maneuver)}, {"clean", points(tr.clean)}};
    j["truth"] = std::move(t);
  }
  return j;
}

LabeledScene scene_from_json(const json& j, std::size_t line) {
  const Reader r(line);
  LabeledScene out;
  SceneRecord& s = out.scene;
  const json& id = r.member(j, "", "scene_id");
  if (!id.is_string()) r.fail("scene_id", "expected a string");
  s.scene_id = id.get<std::string>();
  s.fps = r.number(r.member(j, "", "fps"), "fps");
  if (!(s.fps > 0)) r.fail("fps", "must be > 0");
  if (const auto it = j.find("objects_of_interest"); it != j.end()) {
    std::size_t i = 0;
    for (const auto& v : r.array(*it, "objects_of_interest"))
      s.objects_of_interest.push_back(r.integer(v, "objects_of_interest[" + std::to_string(i++) + "]"));
  }
  if (const auto it = j.find("map"); it != j.end()) {
    if (!it->is_object()) r.fail("map", "expected an object");
    VectorMap& m = s.vector_map;
    m.drivable_areas = r.layer(*it, "map", "drivable_areas");
    m.crosswalks = r.layer(*it, "map", "crosswalks");
    m.lane_dividers = r.layer(*it, "map", "lane_dividers");
    m.road_dividers = r.layer(*it, "map", "road_dividers");
    m.lane_centerlines = r.layer(*it, "map", "lane_centerlines");
  }
  std::size_t fi = 0;
  for (const auto& fj : r.array(r.member(j, "", "frames"), "frames")) {
    const std::string fp = "frames[" + std::to_string(fi++) + "]";
    SceneFrame f;
    f.timestamp = r.number(r.member(fj, fp, "timestamp"), fp + ".timestamp");
    std::size_t ai = 0;
    for (const auto& aj : r.array(r.member(fj, fp, "agents"), fp + ".agents")) {
      const std::string ap = fp + ".agents[" + std::to_string(ai++) + "]";
      AgentEntry e;
      e.id = r.integer(r.member(aj, ap, "id"), ap + ".id");
      AgentState& st = e.state;
      st.position = {r.number(r.member(aj, ap, "x"), ap + ".x"), r.number(r.member(aj, ap, "y"), ap + ".y")};
      st.velocity = {r.opt_number(aj, ap, "vx", 0.0), r.opt_number(aj, ap, "vy", 0.0)};
      st.acceleration = {r.opt_number(aj, ap, "ax", 0.0), r.opt_number(aj, ap, "ay", 0.0)};
      st.heading = r.opt_number(aj, ap, "heading", 0.0);
      if (const auto it = aj.find("type"); it != aj.end()) {
        if (!it->is_string()) r.fail(ap + ".type", "expected a string");
        st.type = agent_type_from_name(it->get<std::string>());
      }
      if (const auto it = aj.find("valid"); it != aj.end()) {
        if (!it->is_boolean()) r.fail(ap + ".valid", "expected a boolean");
        st.valid = it->get<bool>();
      }
      if (!st.finite()) r.fail(ap, "non-finite state");
      f.agents.push_back(e);
    }
    s.frames.push_back(std::move(f));
  }
  if (const auto it = j.find("truth"); it != j.end()) {
    if (!it->is_object()) r.fail("truth", "expected an object");
    for (const auto& [key, tj] : it->items()) {
      const std::string tp = "truth." + key;
      int agent = 0;
      try {
        agent = std::stoi(key);
      } catch (const std::exception&) {
        r.fail(tp, "key must be an agent id");
      }
      AgentTruth t;
      const json& mn = r.member(tj, tp, "maneuver");
      if (!mn.is_string()) r.fail(tp + ".maneuver", "expected a string");
      t.maneuver = maneuver_from_name(mn.get<std::string>());
      t.clean = r.points(r.member(tj, tp, "clean"), tp + ".clean");
      out.truth.emplace(agent, std::move(t));
    }
  }
  try {
    s.validate();
  } catch (const InvalidInput& e) {
    throw ParseError("line " + std::to_string(line) + ": " + e.what());
  }
  return out;
}

void write_scenes(std::ostream& out, const std::vector<LabeledScene>& scenes) {
  for (const auto& s : scenes) out << scene_to_json(s).dump() << '\n';
}

void write_scenes(const std::string& path, const std::vector<LabeledScene>& scenes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  write_scenes(out, scenes);
  if (!out) throw IoError("failed writing " + path);
}

std::vector<LabeledScene> read_scenes(std::istream& in) {
  std::vector<LabeledScene> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(line) + ": invalid JSON: " + e.what());
    }
    out.push_back(scene_from_json(j, line));
  }
  return out;
}

std::vector<LabeledScene> read_scenes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  try {
    return read_scenes(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<SceneRecord> ingest_external(const std::string& path, const std::string& format_tag) {
  if (format_tag != "ndjson")
    throw Unsupported("ingest: format '" + format_tag + "' has no built-in reader; convert to ndjson");
  std::vector<SceneRecord> out;
  for (auto& s : read_scenes(path)) out.push_back(std::move(s.scene));
  return out;
}

}  // namespace contextvae::data
