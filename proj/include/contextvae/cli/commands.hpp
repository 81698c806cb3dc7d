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

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "contextvae/data/synthetic.hpp"
#include "contextvae/data/windowing.hpp"
#include "contextvae/metrics.hpp"
#include "contextvae/timewise_vae.hpp"

// The command-line surface: one structured run config, five commands.

namespace contextvae::cli {

struct DataConfig {
  int downsample = 2;
  data::WindowConfig window;
  double dt = 0.0;              // expected step after downsampling; 0 accepts any
  std::size_t max_windows = 0;  // 0 keeps all
};

struct EvalConfig {
  std::vector<int> ks{1, 5, 10, 20};
  std::uint64_t seed = 1;
  // Reported alongside (or instead of) a checkpoint: "cv", "ekf", "truth",
  // "oracle" (maneuver-labelled noiseless future).
  std::vector<std::string> baselines;
  bool per_sample = true;
};

struct PredictConfig {
  int k = 5;
  std::uint64_t seed = 1;
  std::string scene_id;  // empty: first scene
  int target = -1;       // -1: first windowed target
  int first_frame = -1;  // -1: first window of the target
  int figure_scale = 3;
};

struct PreviewConfig {
  std::string scene_id;
  int target = -1;
  int frame = 0;
  int scale = 1;
  bool anchor_marker = false;
};

struct RunConfig {
  data::SyntheticConfig synthetic;
  std::size_t scene_count = 100;
  DataConfig data;
  vae::ModelConfig model;
  vae::TrainConfig train;
  EvalConfig eval;
  PredictConfig predict;
  PreviewConfig preview;

  // Throws ConfigError (T >= 2, H >= 1, radius > 0, ...).
  void validate() const;
};

nlohmann::json to_json(const RunConfig& c);
// Unknown keys are configuration errors.
RunConfig run_config_from_json(const nlohmann::json& j);
// Applies "section.key=value" overrides to a config document; the value is
// parsed as JSON when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);
// Reads `path` (empty: defaults), applies overrides and validates.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);

// Scenes from an interchange file, downsampled and windowed per the config.
std::vector<Sample> load_dataset(const RunConfig& c, const std::string& scenes_path);

// --- commands (each throws contextvae errors; `run` maps them to exit codes) ---

void cmd_generate(const RunConfig& c, const std::string& out_path);

struct TrainResult {
  vae::TrainLog log;
  long step = 0;
  int epoch = 0;
};
TrainResult cmd_train(const RunConfig& c, const std::string& scenes_path,
                      const std::string& checkpoint_path, const std::string& log_path,
                      const std::string& resume_path = "");

std::vector<metrics::EvaluationReport> cmd_eval(const RunConfig& c, const std::string& scenes_path,
                                                const std::string& checkpoint_path,
                                                const std::string& json_path,
                                                const std::string& text_path);

struct PredictOutputs {
  std::string json_path;
  std::string figure_path;     // optional
  std::string attention_path;  // optional
  std::string saliency_path;   // optional
};
nlohmann::json cmd_predict(const RunConfig& c, const std::string& checkpoint_path,
                           const std::string& scenes_path, const PredictOutputs& out);

void cmd_rasterize_preview(const RunConfig& c, const std::string& scenes_path,
                           const std::string& out_path);

// Exit codes: 0 success, 2 config or usage error, 3 data error, 4 numerical failure.
int run(int argc, char** argv);

}  // namespace contextvae::cli
