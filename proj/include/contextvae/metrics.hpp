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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "contextvae/window.hpp"

namespace contextvae::metrics {

using Trajectory = std::vector<Vec2>;

// Best-of-k mean / final Euclidean error; every prediction must have the
// truth's length (>= 1). Throws InvalidInput otherwise.
double min_ade(std::span<const Trajectory> predictions, std::span<const Vec2> truth);
double min_fde(std::span<const Trajectory> predictions, std::span<const Vec2> truth);

// World-frame predictions for one sample; must return at least k
// trajectories of the sample's horizon.
using Predictor =
    std::function<std::vector<Trajectory>(const Sample& sample, int k, std::uint64_t seed)>;

struct SampleMetrics {
  std::string scene_id;
  int target_id = 0;
  std::size_t first_frame = 0;
  std::vector<double> min_ade;  // one per k
  std::vector<double> min_fde;
};

struct EvaluationReport {
  std::string model_tag;
  int horizon = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::vector<int> ks;
  std::vector<double> mean_min_ade;
  std::vector<double> mean_min_fde;
  std::vector<SampleMetrics> samples;

  double ade(int k) const;
  double fde(int k) const;
  nlohmann::json to_json(bool per_sample = true) const;
  static EvaluationReport from_json(const nlohmann::json& j);
  // "key value" lines, e.g. "minADE_5 0.4123".
  std::string to_text() const;
};

// Draws max(ks) predictions per sample once; minADE_k and minFDE_k use the
// first k of them, so results are nested in k. The per-sample seed is
// derived from `seed` and the sample index.
EvaluationReport evaluate(const Predictor& predictor, std::span<const Sample> data,
                          std::vector<int> ks, std::uint64_t seed, const std::string& model_tag);

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index);

}  // namespace contextvae::metrics
