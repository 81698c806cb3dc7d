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

// Acceptance suite: one PASS/FAIL line per criterion. Every size, seed and
// tolerance is fixed here; the only knobs select criteria and write a JSON
// summary. Exit status is nonzero when a gating criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "contextvae/baselines.hpp"
#include "contextvae/cli/commands.hpp"
#include "contextvae/data/synthetic.hpp"
#include "contextvae/data/windowing.hpp"
#include "contextvae/geometry.hpp"
#include "contextvae/metrics.hpp"
#include "contextvae/semantic_map.hpp"
#include "contextvae/timewise_vae.hpp"

namespace {

using namespace contextvae;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Outcome {
  int id = 0;
  bool pass = false;
  bool gating = true;
  std::string detail;
  json data = json::object();
};

// --- 1: KL against Monte Carlo ------------------------------------------------

Outcome kl_monte_carlo() {
  constexpr int kPairs = 100, kDraws = 100000, kDim = 4;
  constexpr double kTol = 0.01, kBudget = 30.0;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> mean(-2, 2), log_std(-0.7, 0.7);
  std::normal_distribution<double> n01;
  double worst = 0.0;
  std::vector<double> x(kDim);
  for (int pair = 0; pair < kPairs; ++pair) {
    vae::DiagonalGaussian q, p;
    for (int d = 0; d < kDim; ++d) {
      q.mean.push_back(mean(rng));
      q.log_std.push_back(log_std(rng));
      p.mean.push_back(mean(rng));
      p.log_std.push_back(log_std(rng));
    }
    // Antithetic pairs (e, -e): kDraws density evaluations, and the term of
    // the log ratio that is linear in e cancels exactly.
    double acc = 0.0;
    std::vector<double> e(kDim);
    for (int i = 0; i < kDraws / 2; ++i) {
      for (double& v : e) v = n01(rng);
      for (double sign : {1.0, -1.0}) {
        for (int d = 0; d < kDim; ++d) x[d] = q.mean[d] + sign * std::exp(q.log_std[d]) * e[d];
        acc += vae::gaussian_log_density(q, x) - vae::gaussian_log_density(p, x);
      }
    }
    const double closed = vae::kl_diagonal_gaussian(q, p);
    worst = std::max(worst, std::abs(acc / kDraws - closed) / closed);
  }
  const double secs = seconds_since(t0);
  return {1, worst < kTol && secs < kBudget, true,
          fmt("max relative error %.5f (< %.2f) over %d pairs, 1e5 antithetic draws each, %.1f s (< %.0f s)", worst, kTol,
              kPairs, secs, kBudget),
          {{"max_relative_error", worst}, {"seconds", secs}}};
}

// --- 2: ELBO gradients -----------------------------------------------------------

std::vector<Sample> miniature_samples(int T, int H) {
  data::SyntheticConfig sc;
  sc.seed = 11;
  data::WindowConfig wc;
  wc.T_min = wc.T_max = T;
  wc.H = H;
  wc.rasterize = false;
  std::vector<data::LabeledScene> labeled;
  for (const auto& s : data::generate_scenarios(sc, 2)) labeled.push_back(data::downsample(s, 2));
  return data::make_dataset(labeled, wc);
}

// Conv biases start at zero, so every all-zero raster patch sits exactly on
// the ReLU kink where a central difference averages the two one-sided slopes.
// Small nonzero biases move the check to a differentiable point.
void move_off_relu_kinks(nn::ParameterSet& ps) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> mag(0.02, 0.1);
  for (std::size_t b = 0; b < ps.size(); ++b) {
    const auto& name = ps[b].name;
    if (name.rfind("map_encoder.conv", 0) != 0 || name.find(".bias") == std::string::npos) continue;
    for (double& v : ps[b].value) v = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
  }
}

Outcome gradient_check() {
  constexpr double kTol = 1e-3, kStep = 1e-5, kBudget = 120.0;
  const auto t0 = Clock::now();
  auto samples = miniature_samples(2, 2);
  vae::ModelConfig cfg;
  cfg.encoder.hidden = 4;
  cfg.latent = 4;
  cfg.encoder.attn_dim = 4;
  cfg.encoder.embed_width = 5;
  cfg.encoder.map_dim = 4;
  cfg.map.channels = {2, 2};
  cfg.map.feature_dim = 4;
  cfg.zd_embed = 5;
  cfg.head_width = 7;
  cfg.seed = 5;
  // A real raster so the convolution stages are checked too.
  data::SyntheticConfig sc;
  const auto scene = data::generate_scenarios(sc, 1)[0];
  auto sample = samples.at(0);
  const auto& anchor = scene.scene.frames[0].agents[0].state;
  sample.window.raster = std::make_shared<const semantic_map::RasterMap>(semantic_map::rasterize(
      scene.scene.vector_map, geometry::LocalFrame(anchor.position, anchor.heading)));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  std::vector<double> eps(static_cast<std::size_t>(sample.future.H() * cfg.latent));
  for (double& e : eps) e = n01(rng);

  double worst = 0.0;
  std::string worst_group;
  std::size_t groups = 0;
  bool all_checked = true;
  for (const char* mode : {"full", "s-attn+integrated", "s-attn+indie", "pool+integrated", "no-map"}) {
    cfg.mode = encoder::EncoderMode::parse(mode);
    vae::ContextVae m(cfg);
    move_off_relu_kinks(m.params());
    for (const auto& e : vae::check_elbo_gradients(m, sample, 1.0, eps, kStep, 6, 17)) {
      ++groups;
      all_checked = all_checked && e.checked > 0;
      if (e.relative_error >= worst) {
        worst = e.relative_error;
        worst_group = std::string(mode) + ":" + e.group;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {2, worst < kTol && all_checked && secs < kBudget, true,
          fmt("max relative error %.2e (< %.0e) over %zu parameter groups in 5 modes, worst %s, %.1f s",
              worst, kTol, groups, worst_group.c_str(), secs),
          {{"max_relative_error", worst}, {"worst_group", worst_group}, {"seconds", secs}}};
}

// --- 3: attention invariants ---------------------------------------------------

std::vector<geometry::NeighborView> random_neighbors(std::mt19937_64& rng, const AgentState& self, int n,
                                                     int horizon_frames) {
  std::uniform_real_distribution<double> u(-25, 25);
  std::vector<geometry::NeighborView> out;
  for (int j = 0; j < n; ++j) {
    geometry::NeighborView v;
    v.agent_id = 100 + j;
    v.rel_position = {u(rng), u(rng)};
    v.rel_velocity = {u(rng) / 3, u(rng) / 3};
    v.social = geometry::compute_social_features(self, v, horizon_frames * 0.2);
    out.push_back(v);
  }
  return out;
}

ObservationWindow random_window(std::mt19937_64& rng, int F) {
  std::uniform_real_distribution<double> u(-3, 3);
  std::uniform_int_distribution<int> T_dist(2, 6), count(0, 8);
  ObservationWindow w;
  const int T = T_dist(rng);
  for (int t = 0; t < T; ++t) {
    AgentState s;
    s.position = {1.8 * t + 0.1 * u(rng), 0.1 * u(rng)};
    s.velocity = {9 + u(rng), u(rng)};
    s.acceleration = {u(rng), u(rng)};
    w.states.push_back(s);
    w.neighbors.push_back(random_neighbors(rng, s, count(rng), 15));
  }
  for (int i = 0; i < F; ++i) w.map_features.push_back(u(rng));
  return w;
}

std::map<int, double> by_id(const encoder::FrameAttention& a) {
  std::map<int, double> out;
  for (std::size_t i = 0; i < a.weights.size(); ++i) out[a.neighbor_ids[i]] = a.weights[i];
  return out;
}

Outcome attention_invariants() {
  constexpr int kWindows = 1000;
  constexpr double kSumTol = 1e-6, kPermTol = 1e-6;
  vae::ModelConfig cfg;
  cfg.encoder.hidden = 32;
  cfg.encoder.attn_dim = 16;
  cfg.encoder.embed_width = 16;
  cfg.encoder.map_dim = 16;
  cfg.map.channels.clear();
  cfg.map.feature_dim = 16;
  cfg.latent = 8;
  cfg.seed = 3;
  const vae::ContextVae model(cfg);
  const auto& enc = model.encoder();
  std::mt19937_64 rng(303);
  double worst_sum = 0.0, worst_perm = 0.0;
  bool negative = false;
  std::size_t distributions = 0;
  for (int i = 0; i < kWindows; ++i) {
    const auto w = random_window(rng, cfg.encoder.map_dim);
    encoder::AttentionRecord rec;
    const auto out = encoder::encode_observation(enc, model.params(), w, &rec);
    auto check = [&](const encoder::FrameAttention& a) {
      if (a.weights.empty()) return;
      ++distributions;
      double s = 0.0;
      for (double v : a.weights) {
        negative = negative || v < 0.0;
        s += v;
      }
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    };
    check(rec.map);
    for (const auto& f : rec.social) check(f);

    auto shuffled = w;
    for (auto& n : shuffled.neighbors) std::shuffle(n.begin(), n.end(), rng);
    encoder::AttentionRecord rec2;
    const auto out2 = encoder::encode_observation(enc, model.params(), shuffled, &rec2);
    for (std::size_t j = 0; j < out.size(); ++j) worst_perm = std::max(worst_perm, std::abs(out[j] - out2[j]));
    // The same neighbor must receive the same weight.
    auto compare = [&](const encoder::FrameAttention& a, const encoder::FrameAttention& b) {
      const auto ma = by_id(a), mb = by_id(b);
      for (const auto& [id, v] : ma) worst_perm = std::max(worst_perm, std::abs(v - mb.at(id)));
    };
    compare(rec.map, rec2.map);
    for (std::size_t f = 0; f < rec.social.size(); ++f) compare(rec.social[f], rec2.social[f]);
    // Decoder-side outputs depend on the encoding only; check one of them too.
    const auto p1 = model.sample_predictions(w, 1, 3, 7).trajectories[0];
    const auto p2 = model.sample_predictions(shuffled, 1, 3, 7).trajectories[0];
    for (std::size_t t = 0; t < p1.size(); ++t) worst_perm = std::max(worst_perm, (p1[t] - p2[t]).norm());
  }
  const bool pass = !negative && worst_sum <= kSumTol && worst_perm <= kPermTol;
  return {3, pass, true,
          fmt("%zu attention distributions over %d windows: nonnegative %s, max |sum-1| %.1e (<= %.0e), "
              "max permutation change %.1e (<= %.0e)",
              distributions, kWindows, negative ? "no" : "yes", worst_sum, kSumTol, worst_perm, kPermTol),
          {{"max_sum_error", worst_sum}, {"max_permutation_change", worst_perm}}};
}

// --- 4: baseline exactness -----------------------------------------------------

Outcome baseline_exactness() {
  constexpr int kTrials = 1000, kT = 5, kH = 15;
  constexpr double kTol = 1e-6, kDt = 0.2;
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> pos(-500, 500), speed(0.5, 20), ang(-M_PI, M_PI);
  double worst_cv = 0.0, worst_ekf = 0.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const Vec2 start{pos(rng), pos(rng)};
    const double v = speed(rng), h = ang(rng);
    const Vec2 step = Vec2{std::cos(h), std::sin(h)} * (v * kDt);
    std::vector<Vec2> track;
    for (int i = 0; i < kT + kH; ++i) track.push_back(start + step * static_cast<double>(i));
    const std::span<const Vec2> observed(track.data(), kT);
    const auto cv = baselines::constant_velocity_predict(observed, kH);
    const auto ekf = baselines::kalman_predict(observed, kDt, kH);
    for (int t = 0; t < kH; ++t) {
      worst_cv = std::max(worst_cv, (cv[t] - track[kT + t]).norm());
      worst_ekf = std::max(worst_ekf, (ekf[t] - track[kT + t]).norm());
    }
  }
  return {4, worst_cv < kTol && worst_ekf < kTol, true,
          fmt("max error at H=%d over %d tracks: constant velocity %.2e m, EKF %.2e m (< %.0e)", kH,
              kTrials, worst_cv, worst_ekf, kTol),
          {{"cv_max_error", worst_cv}, {"ekf_max_error", worst_ekf}}};
}

// --- 5: metric oracles -----------------------------------------------------------

Outcome metric_oracles() {
  constexpr int kInstances = 1000, kK = 6, kH = 12, kMaxK = 20;
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> u(-30, 30);
  int mismatches = 0, monotonic_violations = 0;
  for (int i = 0; i < kInstances; ++i) {
    std::vector<Vec2> truth(kH);
    for (auto& p : truth) p = {u(rng), u(rng)};
    std::vector<metrics::Trajectory> preds(kMaxK, metrics::Trajectory(kH));
    for (auto& tr : preds)
      for (auto& p : tr) p = {u(rng), u(rng)};
    // Brute force: every prediction against every truth step.
    double ade = INFINITY, fde = INFINITY;
    for (int k = 0; k < kK; ++k) {
      double sum = 0.0;
      for (int t = 0; t < kH; ++t) sum += std::hypot(preds[k][t].x - truth[t].x, preds[k][t].y - truth[t].y);
      ade = std::min(ade, sum / kH);
      fde = std::min(fde, std::hypot(preds[k][kH - 1].x - truth[kH - 1].x, preds[k][kH - 1].y - truth[kH - 1].y));
    }
    const std::span<const metrics::Trajectory> first(preds.data(), kK);
    mismatches += metrics::min_ade(first, truth) != ade;
    mismatches += metrics::min_fde(first, truth) != fde;
    double prev_ade = INFINITY, prev_fde = INFINITY;
    for (int k = 1; k <= kMaxK; ++k) {
      const std::span<const metrics::Trajectory> sub(preds.data(), k);
      const double a = metrics::min_ade(sub, truth), f = metrics::min_fde(sub, truth);
      monotonic_violations += (a > prev_ade) + (f > prev_fde);
      prev_ade = a;
      prev_fde = f;
    }
  }
  return {5, mismatches == 0 && monotonic_violations == 0, true,
          fmt("%d instances (k=%d, H=%d): %d inexact results; nested monotonicity k=1..%d: %d violations",
              kInstances, kK, kH, mismatches, kMaxK, monotonic_violations),
          {{"mismatches", mismatches}, {"monotonic_violations", monotonic_violations}}};
}

// --- 6-8, 11: synthetic end-to-end --------------------------------------------

constexpr std::size_t kTrainWindows = 2000, kTestWindows = 500;
constexpr int kEpochs = 20;
constexpr double kTrainBudget = 1800.0;
const std::vector<std::uint64_t> kSeeds{1, 2, 3};
const std::vector<std::string> kAblation{"full", "s-attn+integrated", "s-attn+indie", "no-map"};

struct Split {
  std::vector<Sample> train, test;
};

// Windows of whole scenes: a scene never contributes to both sides.
Split synthetic_split() {
  data::SyntheticConfig sc;  // four-way junctions, default maneuver mix
  sc.seed = 7;
  data::WindowConfig wc;  // T=5, H=15, rasters on
  const auto scenes = data::generate_scenarios(sc, 1600);
  Split s;
  for (const auto& scene : scenes) {
    if (s.test.size() >= kTestWindows) break;
    const auto low = data::downsample(scene, 2);
    auto windows = data::make_windows(low.scene, wc, &low.truth);
    auto& dst = s.train.size() < kTrainWindows ? s.train : s.test;
    for (auto& w : windows) dst.push_back(std::move(w));
  }
  if (s.test.size() < kTestWindows) throw std::runtime_error("synthetic set too small");
  s.train.resize(kTrainWindows);
  s.test.resize(kTestWindows);
  return s;
}

vae::ModelConfig reference_model(const std::string& mode, std::uint64_t seed) {
  vae::ModelConfig mc;
  mc.mode = encoder::EncoderMode::parse(mode);
  mc.encoder.hidden = 64;
  mc.encoder.attn_dim = 32;
  mc.encoder.embed_width = 32;
  mc.encoder.map_dim = 32;
  mc.latent = 16;
  mc.zd_embed = 32;
  mc.head_width = 64;
  mc.map.channels = {16, 32, 64, 128};  // reference encoder, global average pooling
  mc.map.feature_dim = 32;
  mc.seed = seed;
  return mc;
}

struct Trained {
  std::string mode;
  std::uint64_t seed;
  vae::ContextVae model;
  double seconds;
  std::vector<double> epoch_loss;
};

Sample truncate(const Sample& s, int H) {
  Sample out = s;
  out.future.states.resize(H);
  out.future.neighbors.resize(H);
  out.future.displacements.resize(H);
  return out;
}

metrics::Predictor model_predictor(const vae::ContextVae& m) {
  return [&m](const Sample& s, int k, std::uint64_t seed) {
    return m.sample_predictions(s.window, k, s.future.H(), seed).trajectories;
  };
}

struct EndToEnd {
  std::vector<Outcome> outcomes;
};

EndToEnd end_to_end(int epochs, bool want6, bool want7, bool want8, bool want11) {
  EndToEnd r;
  const auto t_data = Clock::now();
  const Split split = synthetic_split();
  std::printf("# synthetic set: %zu train / %zu test windows (%.1f s)\n", split.train.size(),
              split.test.size(), seconds_since(t_data));
  std::fflush(stdout);

  const metrics::Predictor cv = [](const Sample& s, int k, std::uint64_t) {
    std::vector<Vec2> obs;
    for (const auto& st : s.window.states) obs.push_back(s.window.frame.to_world(st.position));
    return std::vector<metrics::Trajectory>(k, baselines::constant_velocity_predict(obs, s.future.H()));
  };
  const double cv_ade1 = metrics::evaluate(cv, split.test, {1}, 1, "cv").ade(1);

  std::vector<std::string> modes{"full"};
  if (want6) modes = {"full", "no-map"};
  if (want7) modes = kAblation;
  std::map<std::string, std::vector<double>> ade5;
  std::map<std::string, std::vector<metrics::EvaluationReport>> reports;
  std::vector<Trained> full_models;
  double longest = 0.0;
  for (const auto& mode : modes)
    for (std::uint64_t seed : kSeeds) {
      vae::ContextVae model(reference_model(mode, seed));
      vae::TrainConfig tc;
      tc.epochs = epochs;
      tc.batch_size = 16;
      tc.adam.learning_rate = 2e-3;
      tc.seed = seed;
      tc.time_budget_seconds = kTrainBudget;
      const auto log = vae::train(model, split.train, tc);
      longest = std::max(longest, log.seconds);
      auto rep = metrics::evaluate(model_predictor(model), split.test, {1, 5, 10, 20}, 1, mode);
      std::printf("# %-18s seed %llu: %zu epochs in %.0f s, final loss %.3f, minADE_5 %.4f minFDE_5 %.4f\n",
                  mode.c_str(), static_cast<unsigned long long>(seed), log.epoch_loss.size(),
                  log.seconds, log.epoch_loss.empty() ? NAN : log.epoch_loss.back(), rep.ade(5),
                  rep.fde(5));
      std::fflush(stdout);
      ade5[mode].push_back(rep.ade(5));
      reports[mode].push_back(rep);
      if (mode == "full") full_models.push_back({mode, seed, std::move(model), log.seconds, log.epoch_loss});
    }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  auto mean_metric = [&](const std::string& mode, auto fn) {
    double s = 0.0;
    for (const auto& rep : reports[mode]) s += fn(rep);
    return s / reports[mode].size();
  };
  const bool within_budget = longest <= kTrainBudget;

  if (want6) {
    const double full = mean(ade5["full"]), nomap = mean(ade5["no-map"]);
    const double ratio = full / cv_ade1;
    const bool a = ratio <= 0.70, b = full < nomap;
    r.outcomes.push_back(
        {6, a && b && within_budget, true,
         fmt("(a) full minADE_5 %.4f vs CV minADE_1 %.4f: ratio %.3f (<= 0.70) %s; (b) full %.4f < no-map "
             "%.4f %s; longest training %.0f s (<= %.0f s)",
             full, cv_ade1, ratio, a ? "ok" : "FAILS", full, nomap, b ? "ok" : "FAILS", longest,
             kTrainBudget),
         {{"full_minADE5", ade5["full"]}, {"no_map_minADE5", ade5["no-map"]}, {"cv_minADE1", cv_ade1},
          {"longest_training_seconds", longest}}});
  }
  if (want7) {
    constexpr double kTie = 0.02;
    std::vector<double> means;
    std::string chain;
    for (const auto& m : kAblation) {
      means.push_back(mean(ade5[m]));
      chain += fmt("%s%s %.4f", chain.empty() ? "" : " <= ", m.c_str(), means.back());
    }
    bool ordered = true;
    for (std::size_t i = 0; i + 1 < means.size(); ++i) ordered = ordered && means[i] <= means[i + 1] * (1 + kTie);
    json data = json::object();
    for (const auto& m : kAblation) data[m] = ade5[m];
    r.outcomes.push_back({7, ordered && within_budget, true,
                          fmt("mean minADE_5 over 3 seeds: %s (ties within %.0f%%)", chain.c_str(), kTie * 100),
                          data});
  }
  if (want8) {
    std::vector<double> fde_k;
    for (int k : {1, 5, 10, 20}) fde_k.push_back(mean_metric("full", [k](const auto& rep) { return rep.fde(k); }));
    bool k_ok = true;
    for (std::size_t i = 0; i + 1 < fde_k.size(); ++i) k_ok = k_ok && fde_k[i + 1] <= fde_k[i];
    std::vector<double> fde_h;
    for (int H : {5, 10, 15}) {
      std::vector<Sample> cut;
      for (const auto& s : split.test) cut.push_back(truncate(s, H));
      double s = 0.0;
      for (const auto& t : full_models) s += metrics::evaluate(model_predictor(t.model), cut, {5}, 1, "full").fde(5);
      fde_h.push_back(s / full_models.size());
    }
    bool h_ok = true;
    for (std::size_t i = 0; i + 1 < fde_h.size(); ++i) h_ok = h_ok && fde_h[i + 1] >= fde_h[i];
    r.outcomes.push_back(
        {8, k_ok && h_ok, true,
         fmt("mean minFDE_k k=1,5,10,20: %.3f %.3f %.3f %.3f (non-increasing %s); mean minFDE_5 H=5,10,15: "
             "%.3f %.3f %.3f (non-decreasing %s)",
             fde_k[0], fde_k[1], fde_k[2], fde_k[3], k_ok ? "yes" : "no", fde_h[0], fde_h[1], fde_h[2],
             h_ok ? "yes" : "no"),
         {{"minFDE_by_k", fde_k}, {"minFDE5_by_H", fde_h}}});
  }
  if (want11) {
    constexpr std::size_t kBatch = 512;
    constexpr double kBudget = 5.0;
    std::vector<const Sample*> batch;
    for (const auto& s : split.test) batch.push_back(&s);
    for (std::size_t i = 0; batch.size() < kBatch; ++i) batch.push_back(&split.train[i]);
    const auto& model = full_models.front().model;
    const auto t0 = Clock::now();
    std::size_t produced = 0;
    for (std::size_t i = 0; i < batch.size(); ++i)
      produced += model.sample_predictions(batch[i]->window, 5, 15, i).trajectories.size();
    const double secs = seconds_since(t0);
    r.outcomes.push_back({11, secs < kBudget && produced == 5 * kBatch, false,
                          fmt("k=5 sampling for %zu windows (raster encoding included): %.2f s (< %.0f s), "
                              "informational",
                              kBatch, secs, kBudget),
                          {{"seconds", secs}}});
  }
  return r;
}

// --- 9: rasterization ------------------------------------------------------------

VectorMap random_map(std::mt19937_64& rng, Vec2 center) {
  std::uniform_real_distribution<double> u(-90, 90);
  auto pt = [&] { return center + Vec2{u(rng), u(rng)}; };
  VectorMap m;
  for (int i = 0; i < 4; ++i) m.road_dividers.push_back({pt(), pt(), pt()});
  for (int i = 0; i < 4; ++i) m.lane_dividers.push_back({pt(), pt()});
  m.drivable_areas.push_back({pt(), pt(), pt(), pt()});
  m.crosswalks.push_back({pt(), pt(), pt()});
  return m;
}

void transform(VectorMap& m, const std::function<Vec2(Vec2)>& f) {
  for (auto* layer : {&m.road_dividers, &m.lane_dividers, &m.drivable_areas, &m.crosswalks, &m.lane_centerlines})
    for (auto& line : *layer)
      for (auto& p : line) p = f(p);
}

Outcome rasterization() {
  using namespace semantic_map;
  constexpr int kTrials = 200;
  constexpr double kIoU = 0.95;
  std::mt19937_64 rng(909);
  std::uniform_real_distribution<double> shift(-2000, 2000), ang(-M_PI, M_PI);

  // A 0.6 m square around the anchor agent fills exactly the anchor pixel.
  bool anchor_ok = kAnchorRow == 121 && kAnchorCol == 50;
  for (int trial = 0; trial < 20; ++trial) {
    const Vec2 origin{shift(rng) / 7, shift(rng) / 7};
    const double heading = ang(rng);
    const geometry::LocalFrame frame(origin, heading);
    VectorMap m;
    Polygon sq;
    for (Vec2 c : {Vec2{-0.3, -0.3}, Vec2{0.3, -0.3}, Vec2{0.3, 0.3}, Vec2{-0.3, 0.3}}) sq.push_back(frame.to_world(c));
    m.drivable_areas.push_back(sq);
    const auto r = rasterize(m, frame);
    int set = 0;
    for (int row = 0; row < kRasterSize; ++row)
      for (int col = 0; col < kRasterSize; ++col) set += r.at(kDrivableChannel, row, col);
    anchor_ok = anchor_ok && set == 1 && r.at(kDrivableChannel, kAnchorRow, kAnchorCol) == 1;
    const auto px = local_to_pixel({0.0, 0.0});
    anchor_ok = anchor_ok && px.row == kAnchorRow && px.col == kAnchorCol;
  }

  int translation_mismatches = 0;
  double worst_iou = 1.0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const Vec2 origin{shift(rng) / 10, shift(rng) / 10};
    const double heading = ang(rng);
    const VectorMap m = random_map(rng, origin);
    // Integer shifts keep world-coordinate subtraction exact.
    const Vec2 s{std::round(shift(rng)), std::round(shift(rng))};
    VectorMap moved = m;
    transform(moved, [&](Vec2 p) { return p + s; });
    translation_mismatches +=
        rasterize(m, geometry::LocalFrame(origin, heading)).data !=
        rasterize(moved, geometry::LocalFrame(origin + s, heading)).data;

    const double phi = ang(rng);
    VectorMap turned = m;
    transform(turned, [&](Vec2 p) { return p.rotated(phi); });
    const auto a = rasterize(m, geometry::LocalFrame(origin, heading));
    const auto b = rasterize(turned, geometry::LocalFrame(origin.rotated(phi), heading + phi));
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      inter += a.data[i] & b.data[i];
      uni += a.data[i] | b.data[i];
    }
    if (uni > 0) worst_iou = std::min(worst_iou, static_cast<double>(inter) / static_cast<double>(uni));
  }
  return {9, anchor_ok && translation_mismatches == 0 && worst_iou >= kIoU, true,
          fmt("anchor pixel (row %d, col %d) %s; translation: %d/%d rasters differ; rotation: min IoU %.4f "
              "(>= %.2f) over %d maps",
              kAnchorRow, kAnchorCol, anchor_ok ? "exact" : "WRONG", translation_mismatches, kTrials, worst_iou,
              kIoU, kTrials),
          {{"translation_mismatches", translation_mismatches}, {"min_rotation_iou", worst_iou}}};
}

// --- 10: determinism -------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "contextvae_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto c = cli::load_run_config(
      "", {"synthetic.count=6", "synthetic.seed=21", "model.hidden=16", "model.attn_dim=8",
           "model.embed_width=8", "model.map_dim=8", "model.latent=4", "model.zd_embed=8",
           "model.head_width=16", "model.map_channels=[4,8]", "train.epochs=2", "data.max_windows=48",
           "predict.k=5"});
  const auto scenes = (dir / "scenes.ndjson").string();
  cli::cmd_generate(c, scenes);
  std::vector<std::vector<double>> curves;
  std::vector<std::string> logs, predictions, figures;
  // A rerun: same config, same seed, same paths (the prediction file records
  // the checkpoint path).
  const auto ckpt = (dir / "model.ckpt").string();
  for (int run = 0; run < 2; ++run) {
    const auto res = cli::cmd_train(c, scenes, ckpt, (dir / "train.jsonl").string());
    std::vector<double> curve;
    for (const auto& s : res.log.steps) curve.push_back(s.loss);
    curves.push_back(curve);
    cli::cmd_predict(c, ckpt, scenes, {(dir / "pred.json").string(), (dir / "pred.png").string(), "", ""});
    logs.push_back(slurp(dir / "train.jsonl"));
    predictions.push_back(slurp(dir / "pred.json"));
    figures.push_back(slurp(dir / "pred.png"));
  }
  fs::remove_all(dir);
  const bool curve_same = !curves[0].empty() && curves[0] == curves[1];
  const bool log_same = !logs[0].empty() && logs[0] == logs[1];
  const bool pred_same = !predictions[0].empty() && predictions[0] == predictions[1];
  const bool fig_same = figures[0] == figures[1];
  return {10, curve_same && log_same && pred_same && fig_same, true,
          fmt("loss curves (%zu steps) identical: %s; training logs bit-identical: %s; prediction files "
              "(%zu bytes) bit-identical: %s; figures bit-identical: %s",
              curves[0].size(), curve_same ? "yes" : "no", log_same ? "yes" : "no", predictions[0].size(),
              pred_same ? "yes" : "no", fig_same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contextvae acceptance suite"};
  std::vector<int> only;
  std::string report_path;
  int epochs = kEpochs;
  app.add_option("--only", only, "criteria to run (default: all)")->check(CLI::Range(1, 11));
  app.add_option("--report", report_path, "write a JSON summary here");
  app.add_option("--epochs", epochs, "training epochs for criteria 6-8 and 11 (development only)")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  const std::set<int> want = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}
                                          : std::set<int>(only.begin(), only.end());
  if (epochs != kEpochs) std::printf("# NOTE: --epochs %d overrides the pinned %d; results are not acceptance results\n", epochs, kEpochs);

  std::vector<Outcome> outcomes;
  auto run = [&](int id, const std::function<Outcome()>& f) {
    if (!want.count(id)) return;
    const auto t0 = Clock::now();
    try {
      outcomes.push_back(f());
    } catch (const std::exception& e) {
      outcomes.push_back({id, false, id != 11, std::string("exception: ") + e.what()});
    }
    std::printf("# criterion %d took %.1f s\n", id, seconds_since(t0));
    const auto& o = outcomes.back();
    std::printf("CRITERION %d %s %s\n", o.id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };
  run(1, kl_monte_carlo);
  run(2, gradient_check);
  run(3, attention_invariants);
  run(4, baseline_exactness);
  run(5, metric_oracles);
  run(9, rasterization);
  run(10, determinism);
  const bool w6 = want.count(6), w7 = want.count(7), w8 = want.count(8), w11 = want.count(11);
  if (w6 || w7 || w8 || w11) {
    const auto t0 = Clock::now();
    std::vector<Outcome> e2e;
    try {
      e2e = end_to_end(epochs, w6, w7, w8, w11).outcomes;
    } catch (const std::exception& e) {
      for (int id : {6, 7, 8, 11})
        if (want.count(id)) e2e.push_back({id, false, id != 11, std::string("exception: ") + e.what()});
    }
    std::printf("# criteria 6-8, 11 took %.1f s\n", seconds_since(t0));
    for (const auto& o : e2e) {
      std::printf("CRITERION %d %s %s\n", o.id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
      outcomes.push_back(o);
    }
  }
  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });

  int gating_failures = 0;
  json summary = json::array();
  std::printf("\n== summary ==\n");
  for (const auto& o : outcomes) {
    std::printf("CRITERION %d %s%s\n", o.id, o.pass ? "PASS" : "FAIL", o.gating ? "" : " (informational)");
    gating_failures += o.gating && !o.pass;
    summary.push_back({{"criterion", o.id}, {"pass", o.pass}, {"gating", o.gating}, {"detail", o.detail},
                       {"data", o.data}});
  }
  if (!report_path.empty()) std::ofstream(report_path) << json{{"epochs", epochs}, {"criteria", summary}}.dump(2) << "\n";
  return gating_failures == 0 ? 0 : 1;
}
