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

#include <random>
#include <string>

#include "contextvae/nn/graph.hpp"
#include "contextvae/nn/parameters.hpp"

namespace contextvae::nn {

// Layers are plain handles into a ParameterSet. Weights start uniform in
// +-1/sqrt(fan_in), except convolutions, which use He-uniform with zero bias.

struct Linear {
  int weight = -1;
  int bias = -1;
  int in = 0;
  int out = 0;

  static Linear create(ParameterSet& ps, const std::string& name, int in, int out,
                       std::mt19937_64& rng);
  Var operator()(Graph& g, Var x) const;
  // Applies the map to every row of an [n x in] matrix.
  Var rows(Graph& g, Var x) const;
};

// Two-layer perceptron with a ReLU between the layers.
struct Mlp {
  Linear hidden;
  Linear output;

  static Mlp create(ParameterSet& ps, const std::string& name, int in, int width, int out,
                    std::mt19937_64& rng);
  Var operator()(Graph& g, Var x) const;
  Var rows(Graph& g, Var x) const;
  int in() const { return hidden.in; }
  int out() const { return output.out; }
};

// Gated recurrent unit:
//   r = sigmoid(W_ir x + b_ir + W_hr h + b_hr)
//   u = sigmoid(W_iu x + b_iu + W_hu h + b_hu)
//   n = tanh(W_in x + b_in + r * (W_hn h + b_hn))
//   h' = n + u * (h - n)
struct GruCell {
  int w_ih = -1;
  int w_hh = -1;
  int b_ih = -1;
  int b_hh = -1;
  int in = 0;
  int hidden = 0;

  static GruCell create(ParameterSet& ps, const std::string& name, int in, int hidden,
                        std::mt19937_64& rng);
  Var operator()(Graph& g, Var x, Var h) const;
};

struct Conv2d {
  int weight = -1;
  int bias = -1;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int stride = 1;
  int pad = 0;

  static Conv2d create(ParameterSet& ps, const std::string& name, int in_channels,
                       int out_channels, int kernel, int stride, int pad, std::mt19937_64& rng);
  Var operator()(Graph& g, Var x) const;
  int output_extent(int input_extent) const { return (input_extent + 2 * pad - kernel) / stride + 1; }
};

}  // namespace contextvae::nn
