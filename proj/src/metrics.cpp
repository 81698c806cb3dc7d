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

#include "contextvae/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "contextvae/error.hpp"

namespace contextvae::metrics {

namespace {

void check_shapes(std::span<const Trajectory> predictions, std::span<const Vec2> truth) {
  if (truth.empty()) throw InvalidInput("metrics: empty ground truth");
  if (predictions.empty()) throw InvalidInput("metrics: no predictions");
  for (const auto& p : predictions)
    if (p.size() != truth.size())
      throw InvalidInput("metrics: prediction length " + std::to_string(p.size()) +
                         " != truth length " + std::to_string(truth.size()));
}

}  // namespace

double min_ade(std::span<const Trajectory> predictions, std::span<const Vec2> truth) {
  check_shapes(predictions, truth);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : predictions) {
    double sum = 0.0;
    for (std::size_t t = 0; t < truth.size(); ++t) sum += (p[t] - truth[t]).norm();
    best = std::min(best, sum / static_cast<double>(truth.size()));
  }
  return best;
}

double min_fde(std::span<const Trajectory> predictions, std::span<const Vec2> truth) {
  check_shapes(predictions, truth);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : predictions) best = std::min(best, (p.back() - truth.back()).norm());
  return best;
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 finalizer over (seed, index).
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

EvaluationReport evaluate(const Predictor& predictor, std::span<const Sample> data,
                          std::vector<int> ks, std::uint64_t seed, const std::string& model_tag) {
  if (data.empty()) throw InvalidInput("evaluate: empty dataset");
  if (ks.empty()) throw InvalidInput("evaluate: empty k list");
  for (int k : ks)
    if (k < 1) throw InvalidInput("evaluate: k must be >= 1");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const int kmax = ks.back();

  EvaluationReport r;
  r.model_tag = model_tag;
  r.seed = seed;
  r.ks = ks;
  r.horizon = data.front().future.H();
  r.sample_count = data.size();
  r.mean_min_ade.assign(ks.size(), 0.0);
  r.mean_min_fde.assign(ks.size(), 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& s = data[i];
    const auto truth = s.future.world_positions(s.window);
    const auto preds = predictor(s, kmax, sample_seed(seed, i));
    if (static_cast<int>(preds.size()) < kmax)
      throw InvalidInput("evaluate: predictor returned fewer than k trajectories");
    SampleMetrics m{s.window.scene_id, s.window.target_id, s.window.first_frame, {}, {}};
    for (int k : ks) {
      const std::span<const Trajectory> first(preds.data(), static_cast<std::size_t>(k));
      m.min_ade.push_back(min_ade(first, truth));
      m.min_fde.push_back(min_fde(first, truth));
    }
    r.samples.push_back(std::move(m));
  }
  // Fixed summation order keeps the aggregate reproducible.
  for (std::size_t j = 0; j < ks.size(); ++j) {
    double a = 0.0, f = 0.0;
    for (const auto& m : r.samples) {
      a += m.min_ade[j];
      f += m.min_fde[j];
    }
    r.mean_min_ade[j] = a / static_cast<double>(r.samples.size());
    r.mean_min_fde[j] = f / static_cast<double>(r.samples.size());
  }
  return r;
}

double EvaluationReport::ade(int k) const {
  for (std::size_t j = 0; j < ks.size(); ++j)
    if (ks[j] == k) return mean_min_ade[j];
  throw NotFound("report has no k=" + std::to_string(k));
}

double EvaluationReport::fde(int k) const {
  for (std::size_t j = 0; j < ks.size(); ++j)
    if (ks[j] == k) return mean_min_fde[j];
  throw NotFound("report has no k=" + std::to_string(k));
}

nlohmann::json EvaluationReport::to_json(bool per_sample) const {
  nlohmann::json aggregate = nlohmann::json::object();
  for (std::size_t j = 0; j < ks.size(); ++j) {
    aggregate["minADE_" + std::to_string(ks[j])] = mean_min_ade[j];
    aggregate["minFDE_" + std::to_string(ks[j])] = mean_min_fde[j];
  }
  nlohmann::json j{{"model", model_tag},
                   {"horizon", horizon},
                   {"sample_count", sample_count},
                   {"seed", seed},
                   {"ks", ks},
                   {"units", "meters"},
                   {"aggregate", aggregate}};
  if (per_sample) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& m : samples)
      rows.push_back({{"scene_id", m.scene_id},
                      {"target_id", m.target_id},
                      {"first_frame", m.first_frame},
                      {"min_ade", m.min_ade},
                      {"min_fde", m.min_fde}});
    j["samples"] = std::move(rows);
  }
  return j;
}

EvaluationReport EvaluationReport::from_json(const nlohmann::json& j) {
  try {
    EvaluationReport r;
    r.model_tag = j.at("model").get<std::string>();
    r.horizon = j.at("horizon").get<int>();
    r.sample_count = j.at("sample_count").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.ks = j.at("ks").get<std::vector<int>>();
    const auto& agg = j.at("aggregate");
    for (int k : r.ks) {
      r.mean_min_ade.push_back(agg.at("minADE_" + std::to_string(k)).get<double>());
      r.mean_min_fde.push_back(agg.at("minFDE_" + std::to_string(k)).get<double>());
    }
    if (j.contains("samples"))
      for (const auto& row : j.at("samples"))
        r.samples.push_back({row.at("scene_id").get<std::string>(), row.at("target_id").get<int>(),
                             row.at("first_frame").get<std::size_t>(),
                             row.at("min_ade").get<std::vector<double>>(),
                             row.at("min_fde").get<std::vector<double>>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("evaluation report: ") + e.what());
  }
}

std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  out << "model " << model_tag << '\n'
      << "horizon " << horizon << '\n'
      << "samples " << sample_count << '\n'
      << "seed " << seed << '\n';
  char buf[64];
  for (std::size_t j = 0; j < ks.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.6f", mean_min_ade[j]);
    out << "minADE_" << ks[j] << ' ' << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.6f", mean_min_fde[j]);
    out << "minFDE_" << ks[j] << ' ' << buf << '\n';
  }
  return out.str();
}

}  // namespace contextvae::metrics
