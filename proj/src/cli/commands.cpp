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

#include "contextvae/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "contextvae/baselines.hpp"
#include "contextvae/cli/image.hpp"
#include "contextvae/data/interchange.hpp"
#include "contextvae/error.hpp"

namespace contextvae::cli {

using nlohmann::json;

namespace {

template <typename T>
void get(const json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config " + section + "." + key + ": " + e.what());
  }
}

void reject_unknown(const json& given, const json& known, const std::string& section) {
  if (!given.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& [key, value] : given.items())
    if (!known.contains(key))
      throw ConfigError("config: unknown key " + (section.empty() ? key : section + "." + key));
}

json data_json(const DataConfig& d) {
  return {{"downsample", d.downsample},
          {"T_min", d.window.T_min},
          {"T_max", d.window.T_max},
          {"H", d.window.H},
          {"radius", d.window.query.radius},
          {"horizon_cap", d.window.query.horizon_cap},
          {"rasterize", d.window.rasterize},
          {"centerlines_all_channels", d.window.raster_options.centerlines_all_channels},
          {"dt", d.dt},
          {"max_windows", d.max_windows}};
}

json eval_json(const EvalConfig& e) {
  return {{"ks", e.ks}, {"seed", e.seed}, {"baselines", e.baselines}, {"per_sample", e.per_sample}};
}

json predict_json(const PredictConfig& p) {
  return {{"k", p.k},
          {"seed", p.seed},
          {"scene_id", p.scene_id},
          {"target", p.target},
          {"first_frame", p.first_frame},
          {"figure_scale", p.figure_scale}};
}

json preview_json(const PreviewConfig& p) {
  return {{"scene_id", p.scene_id},
          {"target", p.target},
          {"frame", p.frame},
          {"scale", p.scale},
          {"anchor_marker", p.anchor_marker}};
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!std::filesystem::is_regular_file(path))
    throw ConfigError(std::string(what) + " path does not exist: " + path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

json points_json(const std::vector<Vec2>& pts) {
  json a = json::array();
  for (const Vec2 p : pts) a.push_back({p.x, p.y});
  return a;
}

std::vector<Vec2> observed_world(const ObservationWindow& w) {
  std::vector<Vec2> out;
  for (const auto& s : w.states) out.push_back(w.frame.to_world(s.position));
  return out;
}

metrics::Predictor baseline_predictor(const std::string& name) {
  using metrics::Trajectory;
  if (name == "cv")
    return [](const Sample& s, int k, std::uint64_t) {
      return std::vector<Trajectory>(
          k, baselines::constant_velocity_predict(observed_world(s.window), s.future.H()));
    };
  if (name == "ekf")
    return [](const Sample& s, int k, std::uint64_t) {
      return std::vector<Trajectory>(
          k, baselines::kalman_predict(observed_world(s.window), s.window.dt, s.future.H()));
    };
  if (name == "truth")
    return [](const Sample& s, int k, std::uint64_t) {
      return std::vector<Trajectory>(k, s.future.world_positions(s.window));
    };
  if (name == "oracle")
    return [](const Sample& s, int k, std::uint64_t) {
      if (s.oracle_future.empty())
        throw InvalidInput("oracle baseline: scene carries no maneuver-labelled truth");
      return std::vector<Trajectory>(k, s.oracle_future);
    };
  throw ConfigError("unknown baseline '" + name + "' (cv, ekf, truth, oracle)");
}

data::LabeledScene find_scene(const RunConfig& c, const std::string& scenes_path,
                              const std::string& scene_id) {
  require_file(scenes_path, "scenes");
  auto scenes = data::read_scenes(scenes_path);
  if (scenes.empty()) throw InvalidInput("scene file " + scenes_path + " is empty");
  for (auto& s : scenes)
    if (scene_id.empty() || s.scene.scene_id == scene_id) return data::downsample(s, c.data.downsample);
  throw NotFound("scene '" + scene_id + "' not in " + scenes_path);
}

std::vector<std::pair<std::string, std::string>> png_text(const json& doc) {
  return {{"Software", "contextvae"}, {"contextvae-config", doc.dump()}};
}

}  // namespace

// --- configuration ------------------------------------------------------------

void RunConfig::validate() const {
  synthetic.validate();
  model.validate();
  data.window.validate();
  if (data.downsample < 1) throw ConfigError("data.downsample must be >= 1");
  if (data.dt < 0.0) throw ConfigError("data.dt must be >= 0");
  if (eval.ks.empty()) throw ConfigError("eval.ks must not be empty");
  for (int k : eval.ks)
    if (k < 1) throw ConfigError("eval.ks entries must be >= 1");
  for (const auto& b : eval.baselines) baseline_predictor(b);
  if (predict.k < 1) throw ConfigError("predict.k must be >= 1");
  if (predict.figure_scale < 1 || preview.scale < 1) throw ConfigError("figure scales must be >= 1");
  if (train.epochs < 0 || train.batch_size < 1 || train.elbo_samples < 1)
    throw ConfigError("train: need epochs >= 0, batch_size >= 1, elbo_samples >= 1");
  if (!(train.adam.learning_rate >= 0.0)) throw ConfigError("train.learning_rate must be >= 0");
}

json to_json(const RunConfig& c) {
  json syn = data::to_json(c.synthetic);
  syn["count"] = c.scene_count;
  return {{"synthetic", syn},
          {"data", data_json(c.data)},
          {"model", vae::to_json(c.model)},
          {"train", vae::to_json(c.train)},
          {"eval", eval_json(c.eval)},
          {"predict", predict_json(c.predict)},
          {"preview", preview_json(c.preview)}};
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  const json known = to_json(c);
  reject_unknown(j, known, "");
  if (j.contains("synthetic")) {
    json syn = j.at("synthetic");
    reject_unknown(syn, known.at("synthetic"), "synthetic");
    get(syn, "count", c.scene_count, "synthetic");
    syn.erase("count");
    c.synthetic = data::synthetic_config_from_json(syn);
  }
  if (j.contains("data")) {
    const json& d = j.at("data");
    reject_unknown(d, known.at("data"), "data");
    get(d, "downsample", c.data.downsample, "data");
    get(d, "T_min", c.data.window.T_min, "data");
    get(d, "T_max", c.data.window.T_max, "data");
    get(d, "H", c.data.window.H, "data");
    get(d, "radius", c.data.window.query.radius, "data");
    get(d, "horizon_cap", c.data.window.query.horizon_cap, "data");
    get(d, "rasterize", c.data.window.rasterize, "data");
    get(d, "centerlines_all_channels", c.data.window.raster_options.centerlines_all_channels, "data");
    get(d, "dt", c.data.dt, "data");
    get(d, "max_windows", c.data.max_windows, "data");
  }
  if (j.contains("model")) {
    reject_unknown(j.at("model"), known.at("model"), "model");
    c.model = vae::model_config_from_json(j.at("model"));
  }
  if (j.contains("train")) {
    reject_unknown(j.at("train"), known.at("train"), "train");
    c.train = vae::train_config_from_json(j.at("train"));
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    reject_unknown(e, known.at("eval"), "eval");
    get(e, "ks", c.eval.ks, "eval");
    get(e, "seed", c.eval.seed, "eval");
    get(e, "baselines", c.eval.baselines, "eval");
    get(e, "per_sample", c.eval.per_sample, "eval");
  }
  if (j.contains("predict")) {
    const json& p = j.at("predict");
    reject_unknown(p, known.at("predict"), "predict");
    get(p, "k", c.predict.k, "predict");
    get(p, "seed", c.predict.seed, "predict");
    get(p, "scene_id", c.predict.scene_id, "predict");
    get(p, "target", c.predict.target, "predict");
    get(p, "first_frame", c.predict.first_frame, "predict");
    get(p, "figure_scale", c.predict.figure_scale, "predict");
  }
  if (j.contains("preview")) {
    const json& p = j.at("preview");
    reject_unknown(p, known.at("preview"), "preview");
    get(p, "scene_id", c.preview.scene_id, "preview");
    get(p, "target", c.preview.target, "preview");
    get(p, "frame", c.preview.frame, "preview");
    get(p, "scale", c.preview.scale, "preview");
    get(p, "anchor_marker", c.preview.anchor_marker, "preview");
  }
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  json doc = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError("config " + path + ": " + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);
  RunConfig c = run_config_from_json(doc);
  c.validate();
  return c;
}

std::vector<Sample> load_dataset(const RunConfig& c, const std::string& scenes_path) {
  require_file(scenes_path, "scenes");
  std::vector<Sample> out;
  for (const auto& s : data::read_scenes(scenes_path)) {
    const auto d = data::downsample(s, c.data.downsample);
    if (c.data.dt > 0.0 && std::abs(d.scene.dt() - c.data.dt) > 1e-9)
      throw ConfigError("data.dt = " + std::to_string(c.data.dt) + " but scene " + d.scene.scene_id +
                        " has step " + std::to_string(d.scene.dt()) + " after downsampling");
    for (auto& w : data::make_windows(d.scene, c.data.window, &d.truth)) {
      out.push_back(std::move(w));
      if (c.data.max_windows > 0 && out.size() >= c.data.max_windows) return out;
    }
  }
  return out;
}

// --- commands -----------------------------------------------------------------

void cmd_generate(const RunConfig& c, const std::string& out_path) {
  if (out_path.empty()) throw ConfigError("generate: missing output path");
  std::vector<data::LabeledScene> scenes;
  if (c.scene_count > 0) scenes = data::generate_scenarios(c.synthetic, c.scene_count);
  auto out = open_out(out_path);
  const json provenance{{"config", to_json(c)}};
  for (const auto& s : scenes) {
    json j = data::scene_to_json(s);
    j["provenance"] = provenance;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing " + out_path);
}

TrainResult cmd_train(const RunConfig& c, const std::string& scenes_path,
                      const std::string& checkpoint_path, const std::string& log_path,
                      const std::string& resume_path) {
  if (checkpoint_path.empty()) throw ConfigError("train: missing checkpoint path");
  const auto data = load_dataset(c, scenes_path);
  if (data.empty()) throw InvalidInput("train: no windows in " + scenes_path);

  vae::ContextVae model;
  vae::TrainState state;
  if (!resume_path.empty()) {
    require_file(resume_path, "resume checkpoint");
    const auto ck = vae::load_checkpoint(resume_path);
    model = vae::model_from_checkpoint(ck);
    state = vae::train_state_from_checkpoint(ck, model, c.train.adam);
  } else {
    model = vae::ContextVae(c.model);
  }

  const json doc = to_json(c);
  vae::TrainConfig tc = c.train;
  tc.checkpoint_path = checkpoint_path;
  if (tc.nan_dump_path.empty()) tc.nan_dump_path = checkpoint_path + ".nan.json";
  tc.provenance = doc;

  std::ofstream log;
  if (!log_path.empty()) {
    log = open_out(log_path);
    log << json{{"config", doc},
                {"model", vae::to_json(model.config())},
                {"resume", resume_path},
                {"windows", data.size()},
                {"start_step", state.step},
                {"start_epoch", state.epoch}}
               .dump()
        << '\n';
  }
  const auto on_step = [&](const vae::StepRecord& r) {
    if (!log.is_open()) return;
    log << json{{"step", r.step},
                {"epoch", r.epoch},
                {"loss", r.loss},
                {"reconstruction", r.reconstruction},
                {"kl", r.kl},
                {"grad_norm", r.grad_norm}}
               .dump()
        << '\n';
  };
  TrainResult res;
  res.log = vae::train(model, data, tc, &state, on_step);
  // Also covers zero epochs, where train() never checkpoints.
  vae::save_checkpoint(checkpoint_path, model, &state,
                       {{"train", vae::to_json(tc)}, {"run", doc}});
  if (log.is_open()) {
    log << json{{"epoch_loss", res.log.epoch_loss}, {"final_step", state.step}, {"final_epoch", state.epoch}}
               .dump()
        << '\n';
    if (!log) throw IoError("failed writing " + log_path);
  }
  res.step = state.step;
  res.epoch = state.epoch;
  return res;
}

std::vector<metrics::EvaluationReport> cmd_eval(const RunConfig& c, const std::string& scenes_path,
                                                const std::string& checkpoint_path,
                                                const std::string& json_path,
                                                const std::string& text_path) {
  if (checkpoint_path.empty() && c.eval.baselines.empty())
    throw ConfigError("eval: give a checkpoint and/or eval.baselines");
  const auto data = load_dataset(c, scenes_path);
  if (data.empty()) throw InvalidInput("eval: no windows in " + scenes_path);

  std::vector<metrics::EvaluationReport> reports;
  if (!checkpoint_path.empty()) {
    require_file(checkpoint_path, "checkpoint");
    const auto model = vae::model_from_checkpoint(vae::load_checkpoint(checkpoint_path));
    const metrics::Predictor p = [&model](const Sample& s, int k, std::uint64_t seed) {
      return model.sample_predictions(s.window, k, s.future.H(), seed).trajectories;
    };
    reports.push_back(metrics::evaluate(p, data, c.eval.ks, c.eval.seed,
                                        "contextvae:" + model.config().mode.name()));
  }
  for (const auto& b : c.eval.baselines)
    reports.push_back(metrics::evaluate(baseline_predictor(b), data, c.eval.ks, c.eval.seed, b));

  if (!json_path.empty()) {
    json rows = json::array();
    for (const auto& r : reports) rows.push_back(r.to_json(c.eval.per_sample));
    auto out = open_out(json_path);
    out << json{{"config", to_json(c)}, {"checkpoint", checkpoint_path}, {"reports", rows}}.dump(2)
        << '\n';
  }
  if (!text_path.empty()) {
    auto out = open_out(text_path);
    out << "# config " << to_json(c).dump() << '\n';
    for (std::size_t i = 0; i < reports.size(); ++i) out << (i ? "\n" : "") << reports[i].to_text();
  }
  return reports;
}

namespace {

void draw_path(Image& img, const std::vector<Vec2>& local, Rgb color, int scale, double dot) {
  for (std::size_t i = 0; i < local.size(); ++i) {
    const auto p = canvas_point(local[i], scale);
    if (i > 0) {
      const auto q = canvas_point(local[i - 1], scale);
      img.line(q[0], q[1], p[0], p[1], color, std::max(1, scale / 2));
    }
    img.disc(p[0], p[1], dot, color);
  }
}

json frame_attention_json(const encoder::FrameAttention& f) {
  return {{"frame", f.frame}, {"neighbor_ids", f.neighbor_ids}, {"weights", f.weights}};
}

}  // namespace

json cmd_predict(const RunConfig& c, const std::string& checkpoint_path, const std::string& scenes_path,
                 const PredictOutputs& out) {
  require_file(checkpoint_path, "checkpoint");
  const auto model = vae::model_from_checkpoint(vae::load_checkpoint(checkpoint_path));
  const auto scene = find_scene(c, scenes_path, c.predict.scene_id);

  data::WindowConfig wc = c.data.window;
  if (c.predict.target >= 0) wc.targets = {c.predict.target};
  const auto windows = data::make_windows(scene.scene, wc, &scene.truth);
  const Sample* pick = nullptr;
  for (const auto& s : windows)
    if (c.predict.first_frame < 0 || static_cast<int>(s.window.first_frame) == c.predict.first_frame) {
      pick = &s;
      break;
    }
  if (pick == nullptr)
    throw NotFound("predict: no window for scene " + scene.scene.scene_id + ", target " +
                   std::to_string(c.predict.target) + ", first frame " +
                   std::to_string(c.predict.first_frame));
  const ObservationWindow& w = pick->window;
  const int H = pick->future.H();

  const auto preds = model.sample_predictions(w, c.predict.k, H, c.predict.seed);
  encoder::AttentionRecord rec;
  encoder::encode_observation(model.encoder(), model.params(), w, &rec);

  json gaussians = json::array();
  for (const auto& traj : preds.displacement_gaussians) {
    json row = json::array();
    for (const auto& g : traj) row.push_back({{"mean", g.mean}, {"log_std", g.log_std}});
    gaussians.push_back(std::move(row));
  }
  json trajectories = json::array();
  for (const auto& t : preds.trajectories) trajectories.push_back(points_json(t));
  json social = json::array();
  for (const auto& f : rec.social) social.push_back(frame_attention_json(f));
  const json doc = to_json(c);
  json result{{"config", doc},
              {"checkpoint", checkpoint_path},
              {"model", vae::to_json(model.config())},
              {"scene_id", w.scene_id},
              {"target_id", w.target_id},
              {"first_frame", w.first_frame},
              {"T", w.T()},
              {"H", H},
              {"dt", w.dt},
              {"k", preds.k()},
              {"seed", preds.seed},
              {"observed", points_json(observed_world(w))},
              {"truth", points_json(pick->future.world_positions(w))},
              {"predictions", trajectories},
              {"displacement_gaussians", gaussians},
              {"attention", {{"map", frame_attention_json(rec.map)}, {"social", social}}}};

  if (!out.json_path.empty()) {
    auto f = open_out(out.json_path);
    f << result.dump(2) << '\n';
    if (!f) throw IoError("failed writing " + out.json_path);
  }

  const bool wants_image =
      !out.figure_path.empty() || !out.attention_path.empty() || !out.saliency_path.empty();
  if (!wants_image) return result;

  const auto raster = w.raster ? w.raster
                               : std::make_shared<const semantic_map::RasterMap>(semantic_map::rasterize(
                                     scene.scene.vector_map, w.frame, c.data.window.raster_options));
  const int scale = c.predict.figure_scale;
  const double dot = 0.8 * scale;
  std::vector<Vec2> observed;
  for (const auto& s : w.states) observed.push_back(s.position);

  if (!out.figure_path.empty()) {
    Image img = raster_image(*raster, scale);
    for (const auto& t : preds.trajectories) {
      std::vector<Vec2> local{observed.back()};
      for (const Vec2 p : t) local.push_back(w.frame.to_local(p));
      draw_path(img, local, kPredictionColor, scale, dot);
    }
    std::vector<Vec2> truth{observed.back()};
    for (const Vec2 p : pick->future.local_positions(w)) truth.push_back(p);
    draw_path(img, truth, kTruthColor, scale, dot);
    draw_path(img, observed, kObservedColor, scale, dot);
    img.write_png(out.figure_path, png_text(doc));
  }

  if (!out.attention_path.empty()) {
    Image img = raster_image(*raster, scale);
    draw_path(img, observed, kObservedColor, scale, dot);
    const auto overlay = [&](const std::vector<geometry::NeighborView>& n,
                             const encoder::FrameAttention& f, Rgb color) {
      for (std::size_t j = 0; j < n.size() && j < f.weights.size(); ++j) {
        const auto p = canvas_point(n[j].rel_position, scale);
        img.disc(p[0], p[1], 2.5 * scale, color, 0.15 + 0.85 * f.weights[j]);
      }
    };
    overlay(w.neighbors.front(), rec.map, Rgb{60, 220, 60});
    if (!rec.social.empty()) overlay(w.neighbors.back(), rec.social.back(), Rgb{0, 220, 230});
    img.write_png(out.attention_path, png_text(doc));
  }

  if (!out.saliency_path.empty()) {
    // Sensitivity of the first predicted forward displacement (latent at
    // the prior mean) to the raster.
    const semantic_map::SaliencyHead head = [&](nn::Graph& g, nn::Var m) {
      const nn::Var h = model.encoder().encode(g, w, m);
      const auto p = model.prior(g, h);
      const auto d = model.decode(g, p.mean, h);
      return g.slice(d.mean, 0, 1);
    };
    const auto sal = semantic_map::map_saliency(*raster, model.params(), model.encoder().map_encoder(), head);
    Image img = raster_image(*raster, scale);
    for (int r = 0; r < semantic_map::kRasterSize; ++r)
      for (int col = 0; col < semantic_map::kRasterSize; ++col) {
        const double s = sal.pixels[static_cast<std::size_t>(r) * semantic_map::kRasterSize + col];
        for (int dy = 0; dy < scale; ++dy)
          for (int dx = 0; dx < scale; ++dx) img.blend(col * scale + dx, r * scale + dy, {255, 0, 0}, 0.7 * s);
      }
    draw_path(img, observed, kObservedColor, scale, dot);
    img.write_png(out.saliency_path, png_text(doc));
  }
  return result;
}

void cmd_rasterize_preview(const RunConfig& c, const std::string& scenes_path,
                           const std::string& out_path) {
  if (out_path.empty()) throw ConfigError("rasterize-preview: missing output path");
  const auto scene = find_scene(c, scenes_path, c.preview.scene_id);
  const auto& frames = scene.scene.frames;
  if (c.preview.frame < 0 || c.preview.frame >= static_cast<int>(frames.size()))
    throw NotFound("rasterize-preview: frame " + std::to_string(c.preview.frame) + " outside the scene");
  const auto& frame = frames[c.preview.frame];
  int target = c.preview.target;
  if (target < 0) {
    for (int id : scene.scene.objects_of_interest)
      if (frame.find(id) != nullptr) {
        target = id;
        break;
      }
    if (target < 0 && !frame.agents.empty()) target = frame.agents.front().id;
  }
  const AgentState* anchor = frame.find(target);
  if (anchor == nullptr)
    throw NotFound("rasterize-preview: agent " + std::to_string(target) + " absent at frame " +
                   std::to_string(c.preview.frame));
  const auto raster = semantic_map::rasterize(scene.scene.vector_map, geometry::build_local_frame(*anchor),
                                              c.data.window.raster_options);
  Image img = raster_image(raster, c.preview.scale);
  if (c.preview.anchor_marker)
    for (int dy = 0; dy < c.preview.scale; ++dy)
      for (int dx = 0; dx < c.preview.scale; ++dx)
        img.set(semantic_map::kAnchorCol * c.preview.scale + dx,
                semantic_map::kAnchorRow * c.preview.scale + dy, kAnchorColor);
  img.write_png(out_path, png_text(to_json(c)));
}

// --- entry point --------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"Context-aware trajectory forecasting: synthetic data, training, evaluation, figures"};
  app.require_subcommand(1);
  app.fallthrough();  // --config and --set may follow the subcommand
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "JSON run config");
  app.add_option("-s,--set", overrides, "Override, e.g. --set model.hidden=64 (repeatable)");

  std::string out, scenes, checkpoint, log, resume, out_json, out_text, figure, attention, saliency;
  std::vector<std::string> baseline_flags;

  auto* gen = app.add_subcommand("generate", "Write synthetic junction scenes (NDJSON)");
  gen->add_option("-o,--out", out, "Output scene file")->required();

  auto* tr = app.add_subcommand("train", "Train a model; checkpoint after every epoch");
  tr->add_option("--scenes", scenes, "Training scene file")->required();
  tr->add_option("--checkpoint", checkpoint, "Checkpoint to write")->required();
  tr->add_option("--log", log, "Per-step JSONL log");
  tr->add_option("--resume", resume, "Checkpoint to resume from");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint and/or baselines");
  ev->add_option("--scenes", scenes, "Test scene file")->required();
  ev->add_option("--checkpoint", checkpoint, "Model checkpoint");
  ev->add_option("--baseline", baseline_flags, "cv, ekf, truth or oracle (repeatable)");
  ev->add_option("--json", out_json, "Report (JSON)");
  ev->add_option("--text", out_text, "Report (key value table)");

  auto* pr = app.add_subcommand("predict", "Sample predictions for one window");
  pr->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  pr->add_option("--scenes", scenes, "Scene file")->required();
  pr->add_option("-o,--out", out_json, "Prediction file (JSON)")->required();
  pr->add_option("--figure", figure, "PNG: observed, truth and predictions over the raster");
  pr->add_option("--attention", attention, "PNG: attention weights over neighbors");
  pr->add_option("--saliency", saliency, "PNG: map saliency");

  auto* pv = app.add_subcommand("rasterize-preview", "Render the raster around one agent");
  pv->add_option("--scenes", scenes, "Scene file")->required();
  pv->add_option("-o,--out", out, "PNG to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!baseline_flags.empty()) overrides.push_back("eval.baselines=" + json(baseline_flags).dump());
    const RunConfig c = load_run_config(config_path, overrides);
    if (*gen) {
      cmd_generate(c, out);
    } else if (*tr) {
      const auto r = cmd_train(c, scenes, checkpoint, log, resume);
      std::cerr << "trained to step " << r.step << " (epoch " << r.epoch << ") in " << r.log.seconds
                << " s\n";
    } else if (*ev) {
      for (const auto& r : cmd_eval(c, scenes, checkpoint, out_json, out_text)) std::cout << r.to_text() << '\n';
    } else if (*pr) {
      cmd_predict(c, checkpoint, scenes, {out_json, figure, attention, saliency});
    } else if (*pv) {
      cmd_rasterize_preview(c, scenes, out);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kConfiguration:
        return 2;
      case ErrorKind::kNumerical:
        return 4;
      default:
        return 3;
    }
  }
}

}  // namespace contextvae::cli
