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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "contextvae/error.hpp"

namespace contextvae::vae {

using nlohmann::json;
using nn::Graph;
using nn::Var;

// --- configuration ------------------------------------------------------------

void ModelConfig::validate() const {
  mode.validate();
  if (latent <= 0 || zd_embed <= 0 || head_width <= 0)
    throw ConfigError("model: latent, zd_embed and head_width must be positive");
  if (!(log_std_min <= log_std_max)) throw ConfigError("model: log_std_min > log_std_max");
  if (!(displacement_scale > 0.0)) throw ConfigError("model: displacement_scale must be > 0");
}

json to_json(const ModelConfig& c) {
  const char* pool =
      c.map.pool == semantic_map::MapEncoderConfig::Pool::kFlatten ? "flatten" : "average";
  return {
      {"mode", c.mode.name()},
      {"hidden", c.encoder.hidden},
      {"attn_dim", c.encoder.attn_dim},
      {"embed_width", c.encoder.embed_width},
      {"map_dim", c.encoder.map_dim},
      {"scaled_dot", c.encoder.scaled_dot},
      {"position_scale", c.encoder.position_scale},
      {"velocity_scale", c.encoder.velocity_scale},
      {"accel_scale", c.encoder.accel_scale},
      {"map_channels", c.map.channels},
      {"map_first_kernel", c.map.first_kernel},
      {"map_first_stride", c.map.first_stride},
      {"map_kernel", c.map.kernel},
      {"map_stride", c.map.stride},
      {"map_pool", pool},
      {"latent", c.latent},
      {"zd_embed", c.zd_embed},
      {"head_width", c.head_width},
      {"log_std_min", c.log_std_min},
      {"log_std_max", c.log_std_max},
      {"displacement_scale", c.displacement_scale},
      {"seed", c.seed},
  };
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace

ModelConfig model_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  ModelConfig c;
  if (j.contains("mode")) c.mode = encoder::EncoderMode::parse(j.at("mode").get<std::string>());
  read_opt(j, "hidden", c.encoder.hidden);
  read_opt(j, "attn_dim", c.encoder.attn_dim);
  read_opt(j, "embed_width", c.encoder.embed_width);
  read_opt(j, "map_dim", c.encoder.map_dim);
  read_opt(j, "scaled_dot", c.encoder.scaled_dot);
  read_opt(j, "position_scale", c.encoder.position_scale);
  read_opt(j, "velocity_scale", c.encoder.velocity_scale);
  read_opt(j, "accel_scale", c.encoder.accel_scale);
  read_opt(j, "map_channels", c.map.channels);
  read_opt(j, "map_first_kernel", c.map.first_kernel);
  read_opt(j, "map_first_stride", c.map.first_stride);
  read_opt(j, "map_kernel", c.map.kernel);
  read_opt(j, "map_stride", c.map.stride);
  std::string pool = "average";
  read_opt(j, "map_pool", pool);
  if (pool == "average") c.map.pool = semantic_map::MapEncoderConfig::Pool::kGlobalAverage;
  else if (pool == "flatten") c.map.pool = semantic_map::MapEncoderConfig::Pool::kFlatten;
  else throw ConfigError("map_pool must be 'average' or 'flatten'");
  read_opt(j, "latent", c.latent);
  read_opt(j, "zd_embed", c.zd_embed);
  read_opt(j, "head_width", c.head_width);
  read_opt(j, "log_std_min", c.log_std_min);
  read_opt(j, "log_std_max", c.log_std_max);
  read_opt(j, "displacement_scale", c.displacement_scale);
  read_opt(j, "seed", c.seed);
  c.map.feature_dim = c.encoder.map_dim;
  c.validate();
  return c;
}

json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"kl_weight", c.kl_weight},
          {"elbo_samples", c.elbo_samples},
          {"learning_rate", c.adam.learning_rate},
          {"beta1", c.adam.beta1},
          {"beta2", c.adam.beta2},
          {"clip_norm", c.adam.clip_norm},
          {"seed", c.seed},
          {"time_budget_seconds", c.time_budget_seconds}};
}

TrainConfig train_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("train config must be a JSON object");
  TrainConfig c;
  read_opt(j, "epochs", c.epochs);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "kl_weight", c.kl_weight);
  read_opt(j, "elbo_samples", c.elbo_samples);
  read_opt(j, "learning_rate", c.adam.learning_rate);
  read_opt(j, "beta1", c.adam.beta1);
  read_opt(j, "beta2", c.adam.beta2);
  read_opt(j, "clip_norm", c.adam.clip_norm);
  read_opt(j, "seed", c.seed);
  read_opt(j, "time_budget_seconds", c.time_budget_seconds);
  if (c.epochs < 0 || c.batch_size < 1 || c.elbo_samples < 1)
    throw ConfigError("train: epochs >= 0, batch_size >= 1 and elbo_samples >= 1 required");
  if (!(c.kl_weight >= 0.0)) throw ConfigError("train: kl_weight must be >= 0");
  return c;
}

// --- Gaussians ----------------------------------------------------------------

double kl_diagonal_gaussian(const DiagonalGaussian& q, const DiagonalGaussian& p) {
  if (q.mean.size() != q.log_std.size() || p.mean.size() != p.log_std.size() ||
      q.dim() != p.dim())
    throw InvalidInput("kl_diagonal_gaussian: dimension mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    const double vq = std::exp(2 * q.log_std[i]);
    const double vp = std::exp(2 * p.log_std[i]);
    const double dm = q.mean[i] - p.mean[i];
    kl += p.log_std[i] - q.log_std[i] + (vq + dm * dm) / (2 * vp) - 0.5;
  }
  return kl;
}

double gaussian_log_density(const DiagonalGaussian& g, std::span<const double> x) {
  if (x.size() != g.dim() || g.log_std.size() != g.dim())
    throw InvalidInput("gaussian_log_density: dimension mismatch");
  double lp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = (x[i] - g.mean[i]) * std::exp(-g.log_std[i]);
    lp += -0.5 * std::log(2 * std::numbers::pi) - g.log_std[i] - 0.5 * z * z;
  }
  return lp;
}

// --- model --------------------------------------------------------------------

ContextVae::ContextVae(const ModelConfig& config) : config_(config) {
  config_.map.feature_dim = config_.encoder.map_dim;
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  const int d = config_.encoder.hidden, z = config_.latent, w = config_.head_width;
  // Heads first, encoder (and its map CNN) last: equal seeds then give equal
  // weights to every block the ablation modes share.
  prior_head_ = nn::Mlp::create(params_, "prior.head", d, w, 2 * z, rng);
  posterior_head_ = nn::Mlp::create(params_, "posterior.head", 2 * d, w, 2 * z, rng);
  backward_cell_ = nn::GruCell::create(params_, "posterior.gru",
                                       encoder::kSelfInputDim + config_.encoder.attn_dim, d, rng);
  decoder_head_ = nn::Mlp::create(params_, "decoder.head", z + d, w, 4, rng);
  zd_embed_ = nn::Mlp::create(params_, "decoder.zd", z + 2, config_.zd_embed, config_.zd_embed, rng);
  forward_cell_ = nn::GruCell::create(params_, "decoder.gru", config_.zd_embed, d, rng);
  encoder_ = encoder::ObservationEncoder::create(params_, config_.encoder, config_.mode,
                                                 config_.map, rng);
}

void ContextVae::zero_heads() {
  for (const auto* m : {&prior_head_, &posterior_head_, &decoder_head_})
    for (int b : {m->hidden.weight, m->hidden.bias, m->output.weight, m->output.bias})
      nn::init_zero(params_[b]);
}

GaussianVars ContextVae::split(Graph& g, Var out, int dim) const {
  return {g.slice(out, 0, dim),
          g.clamp(g.slice(out, dim, dim), config_.log_std_min, config_.log_std_max)};
}

GaussianVars ContextVae::prior(Graph& g, Var h) const {
  return split(g, prior_head_(g, h), config_.latent);
}

GaussianVars ContextVae::posterior(Graph& g, Var b, Var h) const {
  return split(g, posterior_head_(g, g.concat({b, h})), config_.latent);
}

GaussianVars ContextVae::decode(Graph& g, Var z, Var h) const {
  return split(g, decoder_head_(g, g.concat({z, h})), 2);
}

Var ContextVae::decoder_step(Graph& g, Var h, Var z, Var d) const {
  const Var x = zd_embed_(g, g.concat({z, g.scale(d, 1.0 / config_.displacement_scale)}));
  return forward_cell_(g, x, h);
}

std::vector<Var> ContextVae::backward_encode(Graph& g, const FutureTruth& f) const {
  const std::size_t n = f.states.size();
  if (n == 0 || f.neighbors.size() != n)
    throw InvalidInput("backward_encode: future states and neighbor lists required per frame");
  std::vector<Var> out(n);
  Var b = g.zeros(static_cast<std::size_t>(config_.encoder.hidden));
  for (std::size_t t = n; t-- > 0;) {
    const Var o = encoder_.frame_input(g, b, f.states[t], f.neighbors[t]);
    b = backward_cell_(g, o, b);
    out[t] = b;
  }
  return out;
}

ElboTerms ContextVae::elbo(Graph& g, const ObservationWindow& w, const FutureTruth& future,
                           double kl_weight, std::span<const double> eps) const {
  const int H = future.H();
  const int Z = config_.latent;
  if (H < 1) throw InvalidInput("elbo: empty future");
  if (static_cast<int>(future.states.size()) != H || static_cast<int>(future.neighbors.size()) != H)
    throw InvalidInput("elbo: horizon mismatch between displacements, states and neighbors");
  if (eps.size() != static_cast<std::size_t>(H) * Z)
    throw InvalidInput("elbo: expected H x Z noise values");

  Var h = encoder_.encode(g, w);
  const auto bs = backward_encode(g, future);
  std::vector<Var> lps, kls;
  for (int t = 0; t < H; ++t) {
    const auto p = prior(g, h);
    const auto q = posterior(g, bs[t], h);
    const Var e = g.constant(std::vector<double>(eps.begin() + t * Z, eps.begin() + (t + 1) * Z));
    const Var z = g.add(q.mean, g.mul(g.exp(q.log_std), e));
    const auto dec = decode(g, z, h);
    const Vec2 dv = future.displacements[t];
    const Var d = g.constant({dv.x, dv.y});
    lps.push_back(g.gaussian_log_prob(dec.mean, dec.log_std, d));
    kls.push_back(g.kl_diag_gaussian(q.mean, q.log_std, p.mean, p.log_std));
    h = decoder_step(g, h, z, d);
  }
  const Var lp = g.sum(g.concat(lps));
  const Var kl = g.sum(g.concat(kls));
  const Var objective = kl_weight == 0.0 ? lp : g.sub(lp, g.scale(kl, kl_weight));
  ElboTerms terms;
  terms.loss = g.scale(objective, -1.0 / H);
  terms.reconstruction = g.scalar(lp) / H;
  terms.kl = g.scalar(kl) / H;
  return terms;
}

namespace {

DiagonalGaussian read(const Graph& g, const GaussianVars& v) {
  const auto m = g.value(v.mean);
  const auto s = g.value(v.log_std);
  return {{m.begin(), m.end()}, {s.begin(), s.end()}};
}

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

DiagonalGaussian ContextVae::prior(std::span<const double> h) const {
  Graph g(params_);
  return read(g, prior(g, g.constant(vec(h))));
}

DiagonalGaussian ContextVae::posterior(std::span<const double> b, std::span<const double> h) const {
  Graph g(params_);
  return read(g, posterior(g, g.constant(vec(b)), g.constant(vec(h))));
}

DiagonalGaussian ContextVae::decode(std::span<const double> z, std::span<const double> h) const {
  Graph g(params_);
  return read(g, decode(g, g.constant(vec(z)), g.constant(vec(h))));
}

std::vector<double> ContextVae::decoder_step(std::span<const double> h, std::span<const double> z,
                                             Vec2 d) const {
  Graph g(params_);
  return vec(g.value(decoder_step(g, g.constant(vec(h)), g.constant(vec(z)), g.constant({d.x, d.y}))));
}

PredictionSet ContextVae::sample_predictions(const ObservationWindow& w, int k, int H,
                                             std::uint64_t seed) const {
  if (k < 1 || H < 1) throw InvalidInput("sample_predictions: k and H must be >= 1");
  Graph g(params_);
  const Var h0 = encoder_.encode(g, w);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PredictionSet out;
  out.seed = seed;
  out.trajectories.resize(k);
  out.displacement_gaussians.resize(k);
  const Vec2 start = w.states.back().position;
  for (int i = 0; i < k; ++i) {
    Var h = h0;
    Vec2 pos = start;
    for (int t = 0; t < H; ++t) {
      const auto p = read(g, prior(g, h));
      std::vector<double> z(p.dim());
      for (std::size_t j = 0; j < z.size(); ++j) z[j] = p.mean[j] + std::exp(p.log_std[j]) * normal(rng);
      const Var zv = g.constant(z);
      auto dec = read(g, decode(g, zv, h));
      const Vec2 d{dec.mean[0] + std::exp(dec.log_std[0]) * normal(rng),
                   dec.mean[1] + std::exp(dec.log_std[1]) * normal(rng)};
      pos += d;
      out.trajectories[i].push_back(w.frame.to_world(pos));
      out.displacement_gaussians[i].push_back(std::move(dec));
      h = decoder_step(g, h, zv, g.constant({d.x, d.y}));
    }
  }
  return out;
}

// --- training -----------------------------------------------------------------

namespace {

void write_nan_dump(const std::string& path, const TrainState& st, double loss,
                    const std::vector<Sample>& data, std::span<const std::size_t> batch) {
  if (path.empty()) return;
  json j{{"step", st.step}, {"epoch", st.epoch}, {"loss", std::isfinite(loss) ? json(loss) : json("nan")}};
  json items = json::array();
  for (std::size_t idx : batch) {
    const auto& w = data[idx].window;
    items.push_back({{"index", idx},
                     {"scene_id", w.scene_id},
                     {"target_id", w.target_id},
                     {"first_frame", w.first_frame},
                     {"T", w.T()},
                     {"H", data[idx].future.H()}});
  }
  j["batch"] = std::move(items);
  std::ofstream(path) << j.dump(2) << '\n';
}

}  // namespace

TrainLog train(ContextVae& model, const std::vector<Sample>& data, const TrainConfig& config,
               TrainState* state, const StepCallback& on_step) {
  if (config.batch_size < 1 || config.elbo_samples < 1 || config.epochs < 0)
    throw ConfigError("train: invalid epochs/batch_size/elbo_samples");
  if (data.empty() && config.epochs > 0) throw InvalidInput("train: empty dataset");
  TrainState local;
  TrainState& st = state != nullptr ? *state : local;
  auto& params = model.params();
  if (st.optimizer.first_moment().size() != params.size())
    st.optimizer = nn::Adam(params, config.adam);

  const auto t0 = std::chrono::steady_clock::now();
  TrainLog log;
  const int Z = model.latent_dim();
  nn::Gradients grads(params);
  std::vector<std::size_t> order(data.size());
  std::vector<double> eps;
  for (int e = 0; e < config.epochs; ++e) {
    // Per-epoch stream so a resumed run sees the same shuffles.
    std::mt19937_64 rng(config.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(st.epoch));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> batch(order.data() + start, end - start);
      grads.zero();
      StepRecord rec;
      const double scale = 1.0 / (static_cast<double>(batch.size()) * config.elbo_samples);
      for (std::size_t idx : batch) {
        const Sample& s = data[idx];
        for (int m = 0; m < config.elbo_samples; ++m) {
          eps.resize(static_cast<std::size_t>(s.future.H()) * Z);
          for (double& v : eps) v = normal(rng);
          Graph g(params, &grads);
          const auto terms = model.elbo(g, s.window, s.future, config.kl_weight, eps);
          const Var loss = g.scale(terms.loss, scale);
          rec.loss += g.scalar(loss);
          rec.reconstruction += terms.reconstruction * scale;
          rec.kl += terms.kl * scale;
          g.backward(loss);
        }
      }
      if (!std::isfinite(rec.loss) || !grads.all_finite()) {
        write_nan_dump(config.nan_dump_path, st, rec.loss, data, batch);
        throw NumericalError("train: non-finite loss or gradient at step " +
                             std::to_string(st.step) +
                             (config.nan_dump_path.empty() ? "" : "; batch written to " +
                                                                      config.nan_dump_path));
      }
      rec.grad_norm = st.optimizer.step(params, grads);
      rec.step = ++st.step;
      rec.epoch = st.epoch;
      log.steps.push_back(rec);
      if (on_step) on_step(rec);
      epoch_sum += rec.loss;
      ++batches;
    }
    ++st.epoch;
    log.epoch_loss.push_back(batches > 0 ? epoch_sum / batches : 0.0);
    if (!config.checkpoint_path.empty())
      save_checkpoint(config.checkpoint_path, model, &st,
                      {{"train", to_json(config)}, {"run", config.provenance}});
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (config.time_budget_seconds > 0.0 && elapsed > config.time_budget_seconds) break;
  }
  log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return log;
}

// --- checkpoints ----------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'V', 'A', 'E', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw ParseError("checkpoint " + path + ": truncated file");
  return v;
}

void get_doubles(std::istream& in, std::vector<double>& v, const std::string& path) {
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
    throw ParseError("checkpoint " + path + ": truncated parameter data");
}

}  // namespace

void save_checkpoint(const std::string& path, const ContextVae& model, const TrainState* state,
                     const json& extra) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + path);
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kCheckpointVersion);
    put<std::int64_t>(out, state != nullptr ? state->step : 0);
    put<std::int32_t>(out, state != nullptr ? state->epoch : 0);
    const std::string cfg = json{{"model", to_json(model.config())}, {"extra", extra}}.dump();
    put<std::uint64_t>(out, cfg.size());
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    const auto& ps = model.params();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ps.size()));
    for (const auto& b : ps.blocks()) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(b.name.size()));
      out.write(b.name.data(), static_cast<std::streamsize>(b.name.size()));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(b.shape.size()));
      for (int d : b.shape) put<std::int32_t>(out, d);
      put<std::uint64_t>(out, b.value.size());
      put_doubles(out, b.value);
    }
    const bool opt = state != nullptr && state->optimizer.first_moment().size() == ps.size();
    put<std::uint8_t>(out, opt ? 1 : 0);
    if (opt) {
      put<std::int64_t>(out, state->optimizer.steps());
      for (std::size_t i = 0; i < ps.size(); ++i) {
        put_doubles(out, state->optimizer.first_moment()[i]);
        put_doubles(out, state->optimizer.second_moment()[i]);
      }
    }
    if (!out) throw IoError("failed writing checkpoint " + path);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot move checkpoint into " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw ParseError("checkpoint " + path + ": bad magic");
  const auto version = get<std::uint32_t>(in, path);
  if (version != kCheckpointVersion)
    throw ParseError("checkpoint " + path + ": unsupported version " + std::to_string(version));
  Checkpoint c;
  c.step = get<std::int64_t>(in, path);
  c.epoch = get<std::int32_t>(in, path);
  const auto n = get<std::uint64_t>(in, path);
  if (n > (1u << 26)) throw ParseError("checkpoint " + path + ": implausible config length");
  std::string cfg(n, '\0');
  if (!in.read(cfg.data(), static_cast<std::streamsize>(n)))
    throw ParseError("checkpoint " + path + ": truncated config");
  try {
    const json j = json::parse(cfg);
    c.model = model_config_from_json(j.at("model"));
    c.extra = j.value("extra", json::object());
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": bad config JSON: " + e.what());
  }
  const auto blocks = get<std::uint32_t>(in, path);
  for (std::uint32_t i = 0; i < blocks; ++i) {
    const auto len = get<std::uint32_t>(in, path);
    if (len > 4096) throw ParseError("checkpoint " + path + ": implausible block name");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw ParseError("checkpoint " + path + ": truncated name");
    const auto rank = get<std::uint32_t>(in, path);
    if (rank > 8) throw ParseError("checkpoint " + path + ": implausible rank for " + name);
    std::vector<int> shape(rank);
    std::size_t expect = 1;
    for (auto& d : shape) {
      d = get<std::int32_t>(in, path);
      if (d < 0) throw ParseError("checkpoint " + path + ": negative dimension in " + name);
      expect *= static_cast<std::size_t>(d);
    }
    const auto count = get<std::uint64_t>(in, path);
    if (count != expect) throw ParseError("checkpoint " + path + ": size mismatch in " + name);
    const int b = c.params.add(name, shape);
    get_doubles(in, c.params[b].value, path);
  }
  c.has_optimizer = get<std::uint8_t>(in, path) != 0;
  if (c.has_optimizer) {
    c.optimizer_steps = get<std::int64_t>(in, path);
    c.m.resize(c.params.size());
    c.v.resize(c.params.size());
    for (std::size_t i = 0; i < c.params.size(); ++i) {
      c.m[i].resize(c.params[i].value.size());
      c.v[i].resize(c.params[i].value.size());
      get_doubles(in, c.m[i], path);
      get_doubles(in, c.v[i], path);
    }
  }
  return c;
}

ContextVae model_from_checkpoint(const Checkpoint& ckpt) {
  ContextVae model(ckpt.model);
  auto& ps = model.params();
  if (ps.size() != ckpt.params.size())
    throw ParseError("checkpoint: parameter block count does not match the model config");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].name != ckpt.params[i].name || ps[i].shape != ckpt.params[i].shape)
      throw ParseError("checkpoint: block " + ckpt.params[i].name + " does not match " + ps[i].name);
    ps[i].value = ckpt.params[i].value;
  }
  return model;
}

TrainState train_state_from_checkpoint(const Checkpoint& ckpt, const ContextVae& model,
                                       const nn::AdamConfig& adam) {
  TrainState st;
  st.step = ckpt.step;
  st.epoch = ckpt.epoch;
  st.optimizer = nn::Adam(model.params(), adam);
  if (ckpt.has_optimizer) {
    st.optimizer.first_moment() = ckpt.m;
    st.optimizer.second_moment() = ckpt.v;
    st.optimizer.set_steps(ckpt.optimizer_steps);
  }
  return st;
}

// --- gradient check -------------------------------------------------------------

std::vector<GroupGradientError> check_elbo_gradients(ContextVae& model, const Sample& sample,
                                                     double kl_weight,
                                                     std::span<const double> eps, double step,
                                                     std::size_t per_block, std::uint64_t seed) {
  auto& ps = model.params();
  nn::Gradients grads(ps);
  {
    Graph g(ps, &grads);
    const auto terms = model.elbo(g, sample.window, sample.future, kl_weight, eps);
    g.backward(terms.loss);
  }
  auto loss_at = [&] {
    Graph g(ps);
    return g.scalar(model.elbo(g, sample.window, sample.future, kl_weight, eps).loss);
  };

  struct Acc {
    std::size_t n = 0;
    double diff2 = 0.0, a2 = 0.0, f2 = 0.0;
  };
  std::vector<std::string> names;
  std::vector<Acc> acc;
  std::mt19937_64 rng(seed);
  for (std::size_t b = 0; b < ps.size(); ++b) {
    const std::string group = nn::group_of(ps[b].name);
    auto it = std::find(names.begin(), names.end(), group);
    if (it == names.end()) {
      names.push_back(group);
      acc.emplace_back();
      it = names.end() - 1;
    }
    Acc& a = acc[static_cast<std::size_t>(it - names.begin())];
    std::vector<std::size_t> idx(ps[b].value.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    if (idx.size() > per_block) idx.resize(per_block);
    for (std::size_t i : idx) {
      double& w = ps[b].value[i];
      const double keep = w;
      w = keep + step;
      const double up = loss_at();
      w = keep - step;
      const double down = loss_at();
      w = keep;
      const double fd = (up - down) / (2 * step);
      const double an = grads[b][i];
      a.n++;
      a.diff2 += (an - fd) * (an - fd);
      a.a2 += an * an;
      a.f2 += fd * fd;
    }
  }
  std::vector<GroupGradientError> out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double denom = std::max({std::sqrt(acc[i].a2), std::sqrt(acc[i].f2), 1e-12});
    out.push_back({names[i], acc[i].n, std::sqrt(acc[i].diff2) / denom, std::sqrt(acc[i].a2)});
  }
  return out;
}

}  // namespace contextvae::vae
