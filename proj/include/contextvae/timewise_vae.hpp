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

#include "contextvae/nn/adam.hpp"
#include "contextvae/nn/graph.hpp"
#include "contextvae/nn/layers.hpp"
#include "contextvae/observation_encoder.hpp"
#include "contextvae/window.hpp"

// The generative backbone: a forward chain h (prior + decoder), a backward
// chain b over the ground-truth future (posterior), and one latent per
// predicted frame.

namespace contextvae::vae {

struct ModelConfig {
  encoder::EncoderMode mode;
  encoder::EncoderConfig encoder;
  semantic_map::MapEncoderConfig map;
  int latent = 32;       // Z
  int zd_embed = 64;     // output of the (z, d) embedding
  int head_width = 128;  // hidden width of the Gaussian heads
  double log_std_min = -10.0;
  double log_std_max = 5.0;
  double displacement_scale = 2.0;  // d is divided by this before embedding
  std::uint64_t seed = 1;

  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);

struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> log_std;
  std::size_t dim() const { return mean.size(); }
};

// Closed-form KL(q || p) summed over dimensions; throws on size mismatch.
double kl_diagonal_gaussian(const DiagonalGaussian& q, const DiagonalGaussian& p);
double gaussian_log_density(const DiagonalGaussian& g, std::span<const double> x);

struct GaussianVars {
  nn::Var mean;
  nn::Var log_std;
};

struct ElboTerms {
  nn::Var loss;
  double reconstruction = 0.0;  // mean per-step log-likelihood
  double kl = 0.0;              // mean per-step KL
};

struct PredictionSet {
  std::vector<std::vector<Vec2>> trajectories;  // k x H, world frame
  std::vector<std::vector<DiagonalGaussian>> displacement_gaussians;  // k x H, local frame
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(trajectories.size()); }
  int H() const { return trajectories.empty() ? 0 : static_cast<int>(trajectories[0].size()); }
};

class ContextVae {
 public:
  ContextVae() = default;
  explicit ContextVae(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const encoder::ObservationEncoder& encoder() const { return encoder_; }
  int latent_dim() const { return config_.latent; }
  int hidden_dim() const { return config_.encoder.hidden; }

  GaussianVars prior(nn::Graph& g, nn::Var h) const;
  GaussianVars posterior(nn::Graph& g, nn::Var b, nn::Var h) const;
  GaussianVars decode(nn::Graph& g, nn::Var z, nn::Var h) const;
  nn::Var decoder_step(nn::Graph& g, nn::Var h, nn::Var z, nn::Var d) const;
  // b^{T+1}, ..., b^{T+H}, computed from the last future frame backwards.
  std::vector<nn::Var> backward_encode(nn::Graph& g, const FutureTruth& future) const;

  // Timewise negative ELBO with teacher forcing. `eps` holds H x Z standard
  // normal draws for the reparameterized latents.
  ElboTerms elbo(nn::Graph& g, const ObservationWindow& w, const FutureTruth& future,
                 double kl_weight, std::span<const double> eps) const;

  // Graph-free evaluations for inspection and tests.
  DiagonalGaussian prior(std::span<const double> h) const;
  DiagonalGaussian posterior(std::span<const double> b, std::span<const double> h) const;
  DiagonalGaussian decode(std::span<const double> z, std::span<const double> h) const;
  std::vector<double> decoder_step(std::span<const double> h, std::span<const double> z,
                                   Vec2 d) const;

  // k trajectories of H steps with latents drawn from the prior.
  PredictionSet sample_predictions(const ObservationWindow& w, int k, int H,
                                   std::uint64_t seed) const;

  // Zero weights and biases of the three Gaussian heads (tests and
  // degenerate configurations).
  void zero_heads();
  // Parameter-block prefixes belonging to each head.
  static constexpr const char* kPriorHead = "prior";
  static constexpr const char* kPosteriorHead = "posterior";
  static constexpr const char* kDecoderHead = "decoder";

 private:
  GaussianVars split(nn::Graph& g, nn::Var out, int dim) const;

  ModelConfig config_;
  nn::ParameterSet params_;
  encoder::ObservationEncoder encoder_;
  nn::Mlp prior_head_;
  nn::Mlp posterior_head_;
  nn::Mlp decoder_head_;
  nn::Mlp zd_embed_;
  nn::GruCell forward_cell_;
  nn::GruCell backward_cell_;
};

// --- training ---------------------------------------------------------------

struct TrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double kl_weight = 1.0;
  int elbo_samples = 1;  // latent draws per step of the expectation
  nn::AdamConfig adam{.learning_rate = 1e-3, .clip_norm = 5.0};
  std::uint64_t seed = 1;
  std::string checkpoint_path;  // written after every epoch when non-empty
  std::string nan_dump_path;    // offending batch description on NaN abort
  double time_budget_seconds = 0.0;  // stop after the epoch that exceeds it; <= 0 disables
  // Stored under "run" in every checkpoint; not part of the JSON form.
  nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct StepRecord {
  long step = 0;
  int epoch = 0;
  double loss = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
  double grad_norm = 0.0;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<double> epoch_loss;
  double seconds = 0.0;
};

struct TrainState {
  nn::Adam optimizer;
  long step = 0;
  int epoch = 0;
};

using StepCallback = std::function<void(const StepRecord&)>;

// Minibatch Adam on the negative ELBO. Throws NumericalError on a non-finite
// loss or gradient after writing the batch description to nan_dump_path.
TrainLog train(ContextVae& model, const std::vector<Sample>& data, const TrainConfig& config,
               TrainState* state = nullptr, const StepCallback& on_step = {});

// --- checkpoints ------------------------------------------------------------

// Binary layout (little-endian):
//   "CVAECKPT" | u32 version | i64 step | i32 epoch | u64 n | n bytes config JSON
//   | u32 blocks | per block: u32 name_len, name, u32 rank, rank x i32 dims,
//     u64 count, count x f64
//   | u8 has_optimizer | [i64 t, per block: count x f64 m, count x f64 v]
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig model;
  nlohmann::json extra;  // resolved run config echoed for provenance
  nn::ParameterSet params;
  long step = 0;
  int epoch = 0;
  bool has_optimizer = false;
  long optimizer_steps = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

void save_checkpoint(const std::string& path, const ContextVae& model, const TrainState* state,
                     const nlohmann::json& extra = nlohmann::json::object());
Checkpoint load_checkpoint(const std::string& path);
// Rebuilds the model from a checkpoint; throws ParseError on layout mismatch.
ContextVae model_from_checkpoint(const Checkpoint& ckpt);
TrainState train_state_from_checkpoint(const Checkpoint& ckpt, const ContextVae& model,
                                       const nn::AdamConfig& adam);

// --- gradient check ---------------------------------------------------------

struct GroupGradientError {
  std::string group;
  std::size_t checked = 0;
  double relative_error = 0.0;  // ||analytic - fd|| / max(||analytic||, ||fd||)
  double analytic_norm = 0.0;
};

// Central differences of the ELBO for up to `per_block` elements of every
// parameter block, aggregated per group.
std::vector<GroupGradientError> check_elbo_gradients(ContextVae& model, const Sample& sample,
                                                     double kl_weight,
                                                     std::span<const double> eps, double step,
                                                     std::size_t per_block, std::uint64_t seed);

}  // namespace contextvae::vae
