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

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "contextvae/nn/graph.hpp"
#include "contextvae/nn/layers.hpp"
#include "contextvae/semantic_map.hpp"
#include "contextvae/window.hpp"

// Encodes an observation window into the decoder's initial hidden state:
// map attention (or pooling) seeds the recurrence, social attention (or
// pooling) feeds every step.

namespace contextvae::encoder {

enum class MapMode { kNone, kIndie, kIntegrated };

struct EncoderMode {
  bool use_s_attn = true;
  MapMode map_mode = MapMode::kIntegrated;
  bool use_m_attn = true;

  // M-ATTN only makes sense when the map is integrated; throws ConfigError.
  void validate() const;
  // "s-attn+integrated+m-attn", "pool+none", ...
  std::string name() const;
  // Accepts name() output plus the shorthands "full" and "no-map".
  static EncoderMode parse(const std::string& text);
  bool uses_map() const { return map_mode != MapMode::kNone; }
  bool operator==(const EncoderMode&) const = default;
};

struct EncoderConfig {
  int hidden = 256;      // D
  int attn_dim = 64;     // embedding size of queries, keys and values
  int embed_width = 64;  // hidden width of the embedding MLPs
  int map_dim = 256;     // F
  bool scaled_dot = false;
  // Inputs are divided by these before entering any network.
  double position_scale = 10.0;
  double velocity_scale = 10.0;
  double accel_scale = 10.0;
};

inline constexpr int kSelfInputDim = 4;      // velocity, acceleration
inline constexpr int kNeighborInputDim = 4;  // relative position, relative velocity
inline constexpr int kSocialKeyDim = 3;      // distance, bearing, min predicted distance

struct FrameAttention {
  int frame = 0;
  std::vector<int> neighbor_ids;
  std::vector<double> weights;  // empty when the frame used pooling
};

// Attention weights of one encoding, for visualization.
struct AttentionRecord {
  FrameAttention map;
  std::vector<FrameAttention> social;
};

class ObservationEncoder {
 public:
  ObservationEncoder() = default;
  static ObservationEncoder create(nn::ParameterSet& ps, const EncoderConfig& config,
                                   const EncoderMode& mode,
                                   const semantic_map::MapEncoderConfig& map_config,
                                   std::mt19937_64& rng);

  const EncoderConfig& config() const { return config_; }
  const EncoderMode& mode() const { return mode_; }
  const semantic_map::MapEncoder& map_encoder() const { return map_encoder_; }

  // Map features of the window: one map-encoder pass when a raster is
  // attached, a constant otherwise; invalid Var in no-map mode.
  nn::Var map_features(nn::Graph& g, const ObservationWindow& w) const;

  nn::Var map_attention(nn::Graph& g, nn::Var map_features,
                        const std::vector<geometry::NeighborView>& neighbors,
                        FrameAttention* record = nullptr) const;
  nn::Var social_attention(nn::Graph& g, nn::Var query,
                           const std::vector<geometry::NeighborView>& neighbors,
                           FrameAttention* record = nullptr) const;
  // Sum of value embeddings; the non-attention alternative to each.
  nn::Var pool_first_frame(nn::Graph& g, const std::vector<geometry::NeighborView>& neighbors) const;
  nn::Var pool_social(nn::Graph& g, const std::vector<geometry::NeighborView>& neighbors) const;

  nn::Var init_hidden(nn::Graph& g, const ObservationWindow& w, nn::Var map_features,
                      AttentionRecord* record = nullptr) const;
  // Per-frame observation: self state concatenated with the social context
  // queried by `query`.
  nn::Var frame_input(nn::Graph& g, nn::Var query, const AgentState& self,
                      const std::vector<geometry::NeighborView>& neighbors,
                      FrameAttention* record = nullptr) const;
  nn::Var encode_step(nn::Graph& g, nn::Var q, const AgentState& self,
                      const std::vector<geometry::NeighborView>& neighbors,
                      FrameAttention* record = nullptr) const;
  // Decoder initial state (q^T, or its projection with the map in indie mode).
  nn::Var encode(nn::Graph& g, const ObservationWindow& w, AttentionRecord* record = nullptr) const;
  nn::Var encode(nn::Graph& g, const ObservationWindow& w, nn::Var map_features,
                 AttentionRecord* record = nullptr) const;

  nn::Var self_input(nn::Graph& g, const AgentState& self) const;

 private:
  nn::Var neighbor_rows(nn::Graph& g, const std::vector<geometry::NeighborView>& n) const;
  nn::Var key_rows(nn::Graph& g, const std::vector<geometry::NeighborView>& n) const;
  nn::Var attend(nn::Graph& g, nn::Var query, nn::Var keys, nn::Var values,
                 const std::vector<geometry::NeighborView>& n, FrameAttention* record) const;

  EncoderConfig config_;
  EncoderMode mode_;
  semantic_map::MapEncoder map_encoder_;
  bool has_map_encoder_ = false;
  // First-frame (map) attention.
  nn::Linear f_map_query_;
  nn::Mlp f_key1_;
  nn::Mlp f_val1_;
  // Per-step social attention.
  nn::Linear f_query_;
  nn::Mlp f_key_;
  nn::Mlp f_val_;
  nn::Linear init_proj_;   // [M ; context] -> D
  nn::Linear indie_proj_;  // [q ; M] -> D
  nn::GruCell cell_;
};

// Graph-free conveniences returning plain vectors.
std::vector<double> encode_observation(const ObservationEncoder& enc, const nn::ParameterSet& ps,
                                       const ObservationWindow& w, AttentionRecord* record = nullptr);

}  // namespace contextvae::encoder
