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

#include "contextvae/observation_encoder.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "contextvae/error.hpp"

namespace contextvae::encoder {

using geometry::NeighborView;
using nn::Graph;
using nn::Var;

void EncoderMode::validate() const {
  if (use_m_attn && map_mode != MapMode::kIntegrated)
    throw ConfigError("encoder mode: M-ATTN requires the integrated map mode");
}

std::string EncoderMode::name() const {
  std::string s = use_s_attn ? "s-attn" : "pool";
  switch (map_mode) {
    case MapMode::kNone: s += "+none"; break;
    case MapMode::kIndie: s += "+indie"; break;
    case MapMode::kIntegrated: s += "+integrated"; break;
  }
  if (use_m_attn) s += "+m-attn";
  return s;
}

EncoderMode EncoderMode::parse(const std::string& text) {
  if (text == "full") return {};
  if (text == "no-map") return {true, MapMode::kNone, false};
  EncoderMode m{false, MapMode::kNone, false};
  bool seen_social = false, seen_map = false;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, '+')) {
    if (tok == "s-attn" || tok == "pool") {
      m.use_s_attn = tok == "s-attn";
      seen_social = true;
    } else if (tok == "none" || tok == "indie" || tok == "integrated") {
      m.map_mode = tok == "none" ? MapMode::kNone
                   : tok == "indie" ? MapMode::kIndie
                                    : MapMode::kIntegrated;
      seen_map = true;
    } else if (tok == "m-attn") {
      m.use_m_attn = true;
    } else {
      throw ConfigError("encoder mode: unknown token '" + tok + "' in '" + text + "'");
    }
  }
  if (!seen_social || !seen_map)
    throw ConfigError("encoder mode '" + text + "' must name s-attn|pool and none|indie|integrated");
  m.validate();
  return m;
}

ObservationEncoder ObservationEncoder::create(nn::ParameterSet& ps, const EncoderConfig& config,
                                              const EncoderMode& mode,
                                              const semantic_map::MapEncoderConfig& map_config,
                                              std::mt19937_64& rng) {
  mode.validate();
  if (config.hidden <= 0 || config.attn_dim <= 0 || config.embed_width <= 0 || config.map_dim <= 0)
    throw ConfigError("encoder dimensions must be positive");
  ObservationEncoder e;
  e.config_ = config;
  e.mode_ = mode;
  const int a = config.attn_dim, w = config.embed_width, d = config.hidden;
  // Every block is created whatever the mode so that equal seeds give equal
  // weights across ablations.
  e.f_map_query_ = nn::Linear::create(ps, "m_attn.query", config.map_dim, a, rng);
  e.f_key1_ = nn::Mlp::create(ps, "m_attn.key", kNeighborInputDim, w, a, rng);
  e.f_val1_ = nn::Mlp::create(ps, "m_attn.value", kNeighborInputDim, w, a, rng);
  e.f_query_ = nn::Linear::create(ps, "s_attn.query", d, a, rng);
  e.f_key_ = nn::Mlp::create(ps, "s_attn.key", kSocialKeyDim, w, a, rng);
  e.f_val_ = nn::Mlp::create(ps, "s_attn.value", kNeighborInputDim, w, a, rng);
  e.init_proj_ = nn::Linear::create(ps, "encoder.init", config.map_dim + a, d, rng);
  e.indie_proj_ = nn::Linear::create(ps, "encoder.indie", d + config.map_dim, d, rng);
  e.cell_ = nn::GruCell::create(ps, "encoder.gru", kSelfInputDim + a, d, rng);
  if (mode.uses_map() && !map_config.channels.empty()) {
    auto mc = map_config;
    mc.feature_dim = config.map_dim;
    e.map_encoder_ = semantic_map::MapEncoder::create(ps, mc, rng);
    e.has_map_encoder_ = true;
  }
  return e;
}

Var ObservationEncoder::map_features(Graph& g, const ObservationWindow& w) const {
  if (!mode_.uses_map()) return {};
  if (w.raster && has_map_encoder_) return map_encoder_.forward(g, *w.raster).features;
  if (static_cast<int>(w.map_features.size()) != config_.map_dim)
    throw InvalidInput("encoder: window carries neither a raster nor " +
                       std::to_string(config_.map_dim) + " map features");
  return g.constant(w.map_features);
}

Var ObservationEncoder::self_input(Graph& g, const AgentState& s) const {
  return g.constant({s.velocity.x / config_.velocity_scale, s.velocity.y / config_.velocity_scale,
                     s.acceleration.x / config_.accel_scale,
                     s.acceleration.y / config_.accel_scale});
}

Var ObservationEncoder::neighbor_rows(Graph& g, const std::vector<NeighborView>& n) const {
  std::vector<double> v;
  v.reserve(n.size() * kNeighborInputDim);
  for (const auto& nb : n) {
    v.push_back(nb.rel_position.x / config_.position_scale);
    v.push_back(nb.rel_position.y / config_.position_scale);
    v.push_back(nb.rel_velocity.x / config_.velocity_scale);
    v.push_back(nb.rel_velocity.y / config_.velocity_scale);
  }
  return g.constant(std::move(v), {static_cast<int>(n.size()), kNeighborInputDim});
}

Var ObservationEncoder::key_rows(Graph& g, const std::vector<NeighborView>& n) const {
  std::vector<double> v;
  v.reserve(n.size() * kSocialKeyDim);
  for (const auto& nb : n) {
    v.push_back(nb.social.distance / config_.position_scale);
    v.push_back(nb.social.bearing / std::numbers::pi);
    v.push_back(nb.social.min_predicted_distance / config_.position_scale);
  }
  return g.constant(std::move(v), {static_cast<int>(n.size()), kSocialKeyDim});
}

Var ObservationEncoder::attend(Graph& g, Var query, Var keys, Var values,
                               const std::vector<NeighborView>& n, FrameAttention* record) const {
  Var scores = g.matvec(keys, query);
  if (config_.scaled_dot) scores = g.scale(scores, 1.0 / std::sqrt(config_.attn_dim));
  const Var w = g.softmax(scores);
  if (record != nullptr) {
    const auto wv = g.value(w);
    record->weights.assign(wv.begin(), wv.end());
    record->neighbor_ids.clear();
    for (const auto& nb : n) record->neighbor_ids.push_back(nb.agent_id);
  }
  return g.vecmat(w, values);
}

Var ObservationEncoder::map_attention(Graph& g, Var map_features, const std::vector<NeighborView>& n,
                                      FrameAttention* record) const {
  if (n.empty()) {
    if (record != nullptr) *record = FrameAttention{record->frame, {}, {}};
    return g.zeros(config_.attn_dim);
  }
  const Var rows = neighbor_rows(g, n);
  return attend(g, f_map_query_(g, map_features), f_key1_.rows(g, rows), f_val1_.rows(g, rows), n,
                record);
}

Var ObservationEncoder::social_attention(Graph& g, Var query, const std::vector<NeighborView>& n,
                                         FrameAttention* record) const {
  if (n.empty()) {
    if (record != nullptr) *record = FrameAttention{record->frame, {}, {}};
    return g.zeros(config_.attn_dim);
  }
  return attend(g, f_query_(g, query), f_key_.rows(g, key_rows(g, n)),
                f_val_.rows(g, neighbor_rows(g, n)), n, record);
}

Var ObservationEncoder::pool_first_frame(Graph& g, const std::vector<NeighborView>& n) const {
  if (n.empty()) return g.zeros(config_.attn_dim);
  return g.sum_rows(f_val1_.rows(g, neighbor_rows(g, n)));
}

Var ObservationEncoder::pool_social(Graph& g, const std::vector<NeighborView>& n) const {
  if (n.empty()) return g.zeros(config_.attn_dim);
  return g.sum_rows(f_val_.rows(g, neighbor_rows(g, n)));
}

Var ObservationEncoder::init_hidden(Graph& g, const ObservationWindow& w, Var map_features,
                                    AttentionRecord* record) const {
  w.validate();
  const auto& first = w.neighbors.front();
  FrameAttention* rec = record != nullptr ? &record->map : nullptr;
  if (rec != nullptr) *rec = FrameAttention{0, {}, {}};
  Var m, context;
  if (mode_.map_mode == MapMode::kIntegrated) {
    if (!map_features.valid()) throw InvalidInput("encoder: integrated mode needs map features");
    m = map_features;
    context = mode_.use_m_attn ? map_attention(g, m, first, rec) : pool_first_frame(g, first);
  } else {
    // The map slot stays empty; the same projection sees pooled neighbors.
    m = g.zeros(config_.map_dim);
    context = pool_first_frame(g, first);
  }
  if (rec != nullptr && rec->neighbor_ids.empty())
    for (const auto& nb : first) rec->neighbor_ids.push_back(nb.agent_id);
  return g.tanh(init_proj_(g, g.concat({m, context})));
}

Var ObservationEncoder::frame_input(Graph& g, Var query, const AgentState& self,
                                    const std::vector<NeighborView>& n,
                                    FrameAttention* record) const {
  Var context;
  if (mode_.use_s_attn) {
    context = social_attention(g, query, n, record);
  } else {
    context = pool_social(g, n);
    if (record != nullptr) {
      record->weights.clear();
      record->neighbor_ids.clear();
      for (const auto& nb : n) record->neighbor_ids.push_back(nb.agent_id);
    }
  }
  return g.concat({self_input(g, self), context});
}

Var ObservationEncoder::encode_step(Graph& g, Var q, const AgentState& self,
                                    const std::vector<NeighborView>& n,
                                    FrameAttention* record) const {
  return cell_(g, frame_input(g, q, self, n, record), q);
}

Var ObservationEncoder::encode(Graph& g, const ObservationWindow& w, AttentionRecord* record) const {
  return encode(g, w, map_features(g, w), record);
}

Var ObservationEncoder::encode(Graph& g, const ObservationWindow& w, Var map_features,
                               AttentionRecord* record) const {
  Var q = init_hidden(g, w, map_features, record);
  if (record != nullptr) record->social.assign(w.states.size(), FrameAttention{});
  for (std::size_t t = 0; t < w.states.size(); ++t) {
    FrameAttention* rec = nullptr;
    if (record != nullptr) {
      rec = &record->social[t];
      rec->frame = static_cast<int>(t);
    }
    q = encode_step(g, q, w.states[t], w.neighbors[t], rec);
  }
  if (mode_.map_mode == MapMode::kIndie) {
    if (!map_features.valid()) throw InvalidInput("encoder: indie mode needs map features");
    q = g.tanh(indie_proj_(g, g.concat({q, map_features})));
  }
  return q;
}

std::vector<double> encode_observation(const ObservationEncoder& enc, const nn::ParameterSet& ps,
                                       const ObservationWindow& w, AttentionRecord* record) {
  Graph g(ps);
  const auto v = g.value(enc.encode(g, w, record));
  return {v.begin(), v.end()};
}

}  // namespace contextvae::encoder
