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

#include "contextvae/timewise_vae.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "contextvae/error.hpp"
#include "contextvae/semantic_map.hpp"
#include "test_support.hpp"

namespace contextvae::vae {
namespace {

using testing::tiny_dataset;
using testing::tiny_model;

std::vector<double> standard_eps(const Sample& s, int Z, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> e(static_cast<std::size_t>(s.future.H()) * Z);
  for (double& v : e) v = n(rng);
  return e;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("cvae_" + name)).string();
}

// --- closed forms -------------------------------------------------------------

TEST(GaussianDensity, StandardNormalAtOrigin) {
  const DiagonalGaussian g{{0.0, 0.0}, {0.0, 0.0}};
  const std::vector<double> x{0.0, 0.0};
  EXPECT_NEAR(gaussian_log_density(g, x), -std::log(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(gaussian_log_density(g, x), -1.8379, 1e-4);
}

TEST(GaussianDensity, OneDimensionalMarginalIntegratesToOne) {
  const DiagonalGaussian g{{0.7}, {std::log(1.3)}};
  double total = 0.0, mean = 0.0;
  const double lo = -15.0, hi = 15.0;
  const int n = 30000;
  const double h = (hi - lo) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const std::vector<double> xs{x};
    const double p = std::exp(gaussian_log_density(g, xs));
    total += w * h * p;
    mean += w * h * p * x;
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_NEAR(mean, 0.7, 1e-9);
}

TEST(GaussianDensity, SizeMismatchThrows) {
  const DiagonalGaussian g{{0.0}, {0.0}};
  const std::vector<double> x{0.0, 1.0};
  EXPECT_THROW(gaussian_log_density(g, x), InvalidInput);
}

TEST(Kl, ShiftedUnitGaussian) {
  EXPECT_NEAR(kl_diagonal_gaussian({{1.0}, {0.0}}, {{0.0}, {0.0}}), 0.5, 1e-15);
  EXPECT_EQ(kl_diagonal_gaussian({{0.3, -2}, {0.1, 0.2}}, {{0.3, -2}, {0.1, 0.2}}), 0.0);
}

TEST(Kl, MatchesMonteCarloOracle) {
  const DiagonalGaussian q{{0.5, -1.0, 2.0}, {std::log(0.8), std::log(1.5), std::log(0.6)}};
  const DiagonalGaussian p{{0.0, 0.5, 1.0}, {0.0, std::log(0.7), std::log(1.2)}};
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 1.0);
  const int N = 100000;
  double acc = 0.0;
  std::vector<double> x(3);
  for (int i = 0; i < N; ++i) {
    for (int d = 0; d < 3; ++d) x[d] = q.mean[d] + std::exp(q.log_std[d]) * n(rng);
    acc += gaussian_log_density(q, x) - gaussian_log_density(p, x);
  }
  const double closed = kl_diagonal_gaussian(q, p);
  EXPECT_NEAR(acc / N, closed, 0.01 * closed);
}

TEST(Kl, NonNegativeOnRandomPairs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    DiagonalGaussian q, p;
    for (int d = 0; d < 4; ++d) {
      q.mean.push_back(u(rng));
      q.log_std.push_back(u(rng) / 2);
      p.mean.push_back(u(rng));
      p.log_std.push_back(u(rng) / 2);
    }
    EXPECT_GE(kl_diagonal_gaussian(q, p), 0.0);
  }
}

// --- heads ----------------------------------------------------------------------

TEST(Heads, ZeroHeadsGiveStandardGaussians) {
  ContextVae m(tiny_model());
  m.zero_heads();
  const std::vector<double> h(6, 0.4), b(6, -0.2), z(3, 1.0);
  for (const auto& g : {m.prior(h), m.posterior(b, h)}) {
    EXPECT_EQ(g.mean, std::vector<double>(3, 0.0));
    EXPECT_EQ(g.log_std, std::vector<double>(3, 0.0));
  }
  const auto d = m.decode(z, h);
  EXPECT_EQ(d.mean, std::vector<double>(2, 0.0));
  EXPECT_EQ(d.log_std, std::vector<double>(2, 0.0));
}

TEST(Heads, LogStdIsClamped) {
  auto cfg = tiny_model();
  cfg.log_std_min = -0.01;
  cfg.log_std_max = 0.01;
  ContextVae m(cfg);
  for (auto& blk : {m.params().index_of("prior.head.1.bias")}) m.params()[blk].value.assign(6, 50.0);
  const auto p = m.prior(std::vector<double>(6, 0.0));
  for (double s : p.log_std) EXPECT_EQ(s, 0.01);
}

TEST(Heads, DecoderStepIsDeterministicAndSized) {
  ContextVae m(tiny_model());
  const std::vector<double> h(6, 0.1), z(3, -0.5);
  const auto a = m.decoder_step(h, z, {0.3, 0.1});
  EXPECT_EQ(a, m.decoder_step(h, z, {0.3, 0.1}));
  EXPECT_EQ(a.size(), 6u);
  EXPECT_NE(a, m.decoder_step(h, z, {-3.0, 4.0}));
}

// --- ELBO -------------------------------------------------------------------------

TEST(Elbo, ZeroHeadsReduceToStandardNormalLikelihood) {
  const auto data = tiny_dataset();
  ASSERT_FALSE(data.empty());
  ContextVae m(tiny_model());
  m.zero_heads();
  const auto& s = data[0];
  nn::Graph g(m.params());
  const auto terms = m.elbo(g, s.window, s.future, 1.0, standard_eps(s, 3, 1));
  double expect = 0.0;
  for (const Vec2 d : s.future.displacements)
    expect += std::log(2.0 * std::numbers::pi) + 0.5 * (d.x * d.x + d.y * d.y);
  expect /= s.future.H();
  EXPECT_NEAR(g.scalar(terms.loss), expect, 1e-12);
  EXPECT_NEAR(terms.reconstruction, -expect, 1e-12);
  EXPECT_EQ(terms.kl, 0.0);
}

TEST(Elbo, TiedPriorAndPosteriorHaveZeroKl) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  auto& ps = m.params();
  const int D = 6;
  const auto& pw = ps[ps.index_of("prior.head.0.weight")];
  auto& qw = ps[ps.index_of("posterior.head.0.weight")];
  const int rows = pw.shape[0];
  // Posterior input is [b ; h]: ignore b, reuse the prior weights on h.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < 2 * D; ++c)
      qw.value[r * 2 * D + c] = c < D ? 0.0 : pw.value[r * D + (c - D)];
  for (const char* part : {"0.bias", "1.weight", "1.bias"})
    ps[ps.index_of(std::string("posterior.head.") + part)].value =
        ps[ps.index_of(std::string("prior.head.") + part)].value;
  const auto& s = data[0];
  nn::Graph g(ps);
  const auto terms = m.elbo(g, s.window, s.future, 1.0, standard_eps(s, 3, 2));
  EXPECT_NEAR(terms.kl, 0.0, 1e-12);
}

TEST(Elbo, ZeroKlWeightLeavesPriorUntouched) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  const auto& s = data[1];
  for (double beta : {0.0, 1.0}) {
    nn::Gradients grads(m.params());
    nn::Graph g(m.params(), &grads);
    const auto terms = m.elbo(g, s.window, s.future, beta, standard_eps(s, 3, 3));
    g.backward(terms.loss);
    double prior_norm = 0.0;
    for (std::size_t b = 0; b < m.params().size(); ++b)
      if (m.params()[b].name.rfind("prior.", 0) == 0)
        for (double v : grads[b]) prior_norm += v * v;
    if (beta == 0.0)
      EXPECT_EQ(prior_norm, 0.0);
    else
      EXPECT_GT(prior_norm, 0.0);
  }
}

TEST(Elbo, RejectsBadNoise) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  nn::Graph g(m.params());
  EXPECT_THROW(m.elbo(g, data[0].window, data[0].future, 1.0, std::vector<double>(2, 0.0)),
               InvalidInput);
}

TEST(Elbo, OneMapPassPerWindow) {
  auto cfg = tiny_model();
  cfg.map.channels = {2, 2};
  ContextVae m(cfg);
  auto s = tiny_dataset()[0];
  s.window.raster = std::make_shared<const semantic_map::RasterMap>();
  const auto before = semantic_map::map_encoder_pass_count();
  nn::Graph g(m.params());
  m.elbo(g, s.window, s.future, 1.0, standard_eps(s, 3, 4));
  EXPECT_EQ(semantic_map::map_encoder_pass_count() - before, 1u);
}

TEST(Elbo, AnalyticGradientsMatchFiniteDifferences) {
  auto cfg = tiny_model();
  cfg.encoder.hidden = 4;
  cfg.latent = 4;
  const auto data = tiny_dataset(2, /*H=*/2, /*T=*/2);
  for (const auto& mode : {encoder::EncoderMode{}, encoder::EncoderMode::parse("pool+indie")}) {
    cfg.mode = mode;
    ContextVae m(cfg);
    const auto& s = data[0];
    const auto errs = check_elbo_gradients(m, s, 1.0, standard_eps(s, 4, 5), 1e-5, 6, 17);
    ASSERT_FALSE(errs.empty());
    for (const auto& e : errs) {
      EXPECT_GT(e.checked, 0u) << e.group;
      EXPECT_LT(e.relative_error, 1e-3) << mode.name() << " " << e.group;
    }
  }
}

TEST(Elbo, MapEncoderGradientsOnARealRaster) {
  auto cfg = tiny_model();
  cfg.encoder.hidden = 4;
  cfg.latent = 4;
  cfg.map.channels = {2, 2};
  auto s = tiny_dataset(2, /*H=*/2, /*T=*/2)[0];
  const auto scene = data::generate_scenarios(data::SyntheticConfig{}, 1)[0];
  const auto& a = scene.scene.frames[0].agents[0].state;
  s.window.raster = std::make_shared<const semantic_map::RasterMap>(
      semantic_map::rasterize(scene.scene.vector_map, geometry::LocalFrame(a.position, a.heading)));
  ContextVae m(cfg);
  // Zero conv biases put blank patches exactly on the ReLU kink, where central
  // differences are not a derivative; shift them off it.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.02, 0.1);
  for (std::size_t b = 0; b < m.params().size(); ++b)
    if (m.params()[b].name.find("conv") != std::string::npos &&
        m.params()[b].name.find("bias") != std::string::npos)
      for (double& v : m.params()[b].value) v = (rng() & 1 ? 1 : -1) * u(rng);
  for (const auto& e : check_elbo_gradients(m, s, 1.0, standard_eps(s, 4, 5), 1e-5, 8, 17))
    EXPECT_LT(e.relative_error, 1e-3) << e.group;
}

// --- sampling ---------------------------------------------------------------------

TEST(Sampling, DeterministicPerSeedAndShaped) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  const auto a = m.sample_predictions(data[0].window, 5, 7, 123);
  const auto b = m.sample_predictions(data[0].window, 5, 7, 123);
  const auto c = m.sample_predictions(data[0].window, 5, 7, 124);
  EXPECT_EQ(a.k(), 5);
  EXPECT_EQ(a.H(), 7);
  EXPECT_EQ(a.trajectories, b.trajectories);
  EXPECT_NE(a.trajectories, c.trajectories);
  ASSERT_EQ(a.displacement_gaussians.size(), 5u);
  EXPECT_EQ(a.displacement_gaussians[0].size(), 7u);
}

TEST(Sampling, NearDeterministicConfigCollapsesToMean) {
  auto cfg = tiny_model();
  cfg.log_std_min = cfg.log_std_max = -10.0;
  ContextVae m(cfg);
  m.zero_heads();
  const auto data = tiny_dataset();
  const auto& w = data[0].window;
  const auto p = m.sample_predictions(w, 4, 5, 9);
  const Vec2 last = w.frame.to_world(w.states.back().position);
  for (const auto& traj : p.trajectories)
    for (const Vec2 x : traj) {
      EXPECT_NEAR(x.x, last.x, 1e-3);
      EXPECT_NEAR(x.y, last.y, 1e-3);
    }
}

TEST(Sampling, RejectsEmptyRequests) {
  ContextVae m(tiny_model());
  const auto data = tiny_dataset();
  const auto& w = data[0].window;
  EXPECT_THROW(m.sample_predictions(w, 0, 5, 1), InvalidInput);
  EXPECT_THROW(m.sample_predictions(w, 2, 0, 1), InvalidInput);
}

// --- construction -------------------------------------------------------------------

TEST(Construction, SharedWeightsAgreeAcrossModes) {
  auto cfg = tiny_model(21);
  ContextVae full(cfg);
  cfg.mode = encoder::EncoderMode::parse("no-map");
  ContextVae nomap(cfg);
  for (const char* name : {"prior.head.0.weight", "decoder.gru.w_hh", "s_attn.key.0.weight"}) {
    EXPECT_EQ(full.params()[full.params().index_of(name)].value,
              nomap.params()[nomap.params().index_of(name)].value)
        << name;
  }
}

TEST(Construction, ConfigJsonRoundTrip) {
  auto cfg = tiny_model(8);
  cfg.mode = encoder::EncoderMode::parse("pool+indie");
  cfg.encoder.scaled_dot = true;
  const auto back = model_config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(back), to_json(cfg));
  EXPECT_EQ(back.mode, cfg.mode);
}

// --- training -------------------------------------------------------------------------

TrainConfig quick_train(int epochs) {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = 4;
  t.adam.learning_rate = 1e-2;
  t.seed = 3;
  return t;
}

TEST(Training, SmokeRunLogsEveryStep) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  const auto log = train(m, data, quick_train(3));
  const std::size_t per_epoch = (data.size() + 3) / 4;
  EXPECT_EQ(log.steps.size(), 3 * per_epoch);
  ASSERT_EQ(log.epoch_loss.size(), 3u);
  for (const auto& r : log.steps) EXPECT_TRUE(std::isfinite(r.loss));
  EXPECT_LT(log.epoch_loss.back(), log.epoch_loss.front());
}

TEST(Training, ZeroLearningRateKeepsParameters) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  const auto before = m.params();
  auto cfg = quick_train(1);
  cfg.adam.learning_rate = 0.0;
  train(m, data, cfg);
  for (std::size_t b = 0; b < before.size(); ++b) EXPECT_EQ(m.params()[b].value, before[b].value);
}

TEST(Training, DeterministicForFixedSeed) {
  const auto data = tiny_dataset();
  ContextVae a(tiny_model()), b(tiny_model());
  train(a, data, quick_train(2));
  train(b, data, quick_train(2));
  for (std::size_t i = 0; i < a.params().size(); ++i)
    EXPECT_EQ(a.params()[i].value, b.params()[i].value);
}

TEST(Training, NonFiniteGradientAbortsWithDump) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  m.params()[m.params().index_of("decoder.head.1.bias")].value[0] = std::nan("");
  auto cfg = quick_train(1);
  cfg.nan_dump_path = temp_path("nan.json");
  std::remove(cfg.nan_dump_path.c_str());
  EXPECT_THROW(train(m, data, cfg), NumericalError);
  std::ifstream in(cfg.nan_dump_path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("step"), 0);
  EXPECT_FALSE(j.at("batch").empty());
}

TEST(Training, InvalidConfigThrows) {
  ContextVae m(tiny_model());
  auto cfg = quick_train(1);
  cfg.batch_size = 0;
  EXPECT_THROW(train(m, tiny_dataset(), cfg), ConfigError);
  EXPECT_THROW(train(m, {}, quick_train(1)), InvalidInput);
}

TEST(Training, ConfigJsonRoundTrip) {
  auto cfg = quick_train(7);
  cfg.kl_weight = 0.25;
  cfg.checkpoint_path = "x.ckpt";
  EXPECT_EQ(to_json(train_config_from_json(to_json(cfg))), to_json(cfg));
}

// --- checkpoints ------------------------------------------------------------------------

TEST(Checkpoint, RoundTripPreservesModelAndPredictions) {
  const auto data = tiny_dataset();
  ContextVae m(tiny_model());
  TrainState st;
  train(m, data, quick_train(1), &st);
  const auto path = temp_path("rt.ckpt");
  save_checkpoint(path, m, &st, {{"note", "hello"}});
  const auto ck = load_checkpoint(path);
  EXPECT_EQ(ck.step, st.step);
  EXPECT_EQ(ck.epoch, 1);
  EXPECT_TRUE(ck.has_optimizer);
  EXPECT_EQ(ck.extra.at("note"), "hello");
  const auto back = model_from_checkpoint(ck);
  ASSERT_EQ(back.params().size(), m.params().size());
  for (std::size_t b = 0; b < m.params().size(); ++b) {
    EXPECT_EQ(back.params()[b].name, m.params()[b].name);
    EXPECT_EQ(back.params()[b].value, m.params()[b].value);
  }
  EXPECT_EQ(back.sample_predictions(data[0].window, 3, 4, 5).trajectories,
            m.sample_predictions(data[0].window, 3, 4, 5).trajectories);
}

TEST(Checkpoint, ResumedRunMatchesUninterruptedRun) {
  const auto data = tiny_dataset();
  ContextVae straight(tiny_model());
  train(straight, data, quick_train(2));

  ContextVae first(tiny_model());
  auto cfg = quick_train(1);
  cfg.checkpoint_path = temp_path("resume.ckpt");
  train(first, data, cfg);
  const auto ck = load_checkpoint(cfg.checkpoint_path);
  auto resumed = model_from_checkpoint(ck);
  auto st = train_state_from_checkpoint(ck, resumed, cfg.adam);
  cfg.checkpoint_path.clear();
  train(resumed, data, cfg, &st);
  EXPECT_EQ(st.epoch, 2);
  for (std::size_t b = 0; b < straight.params().size(); ++b)
    EXPECT_EQ(resumed.params()[b].value, straight.params()[b].value) << straight.params()[b].name;
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  const auto path = temp_path("bad.ckpt");
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT";
  }
  EXPECT_THROW(load_checkpoint(path), ParseError);
  EXPECT_THROW(load_checkpoint(temp_path("missing.ckpt")), IoError);

  ContextVae m(tiny_model());
  save_checkpoint(path, m, nullptr);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 9);
  EXPECT_THROW(load_checkpoint(path), ParseError);
}

}  // namespace
}  // namespace contextvae::vae
