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

#include "contextvae/nn/layers.hpp"

#include <cmath>

namespace contextvae::nn {

Linear Linear::create(ParameterSet& ps, const std::string& name, int in, int out,
                      std::mt19937_64& rng) {
  Linear l;
  l.in = in;
  l.out = out;
  l.weight = ps.add(name + ".weight", {out, in});
  l.bias = ps.add(name + ".bias", {out});
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  init_uniform(ps[l.weight], bound, rng);
  init_uniform(ps[l.bias], bound, rng);
  return l;
}

Var Linear::operator()(Graph& g, Var x) const { return g.linear(g.param(weight), g.param(bias), x); }

Var Linear::rows(Graph& g, Var x) const { return g.linear_rows(g.param(weight), g.param(bias), x); }

Mlp Mlp::create(ParameterSet& ps, const std::string& name, int in, int width, int out,
                std::mt19937_64& rng) {
  Mlp m;
  m.hidden = Linear::create(ps, name + ".0", in, width, rng);
  m.output = Linear::create(ps, name + ".1", width, out, rng);
  return m;
}

Var Mlp::operator()(Graph& g, Var x) const { return output(g, g.relu(hidden(g, x))); }

Var Mlp::rows(Graph& g, Var x) const { return output.rows(g, g.relu(hidden.rows(g, x))); }

GruCell GruCell::create(ParameterSet& ps, const std::string& name, int in, int hidden,
                        std::mt19937_64& rng) {
  GruCell c;
  c.in = in;
  c.hidden = hidden;
  c.w_ih = ps.add(name + ".w_ih", {3 * hidden, in});
  c.w_hh = ps.add(name + ".w_hh", {3 * hidden, hidden});
  c.b_ih = ps.add(name + ".b_ih", {3 * hidden});
  c.b_hh = ps.add(name + ".b_hh", {3 * hidden});
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (int b : {c.w_ih, c.w_hh, c.b_ih, c.b_hh}) init_uniform(ps[b], bound, rng);
  return c;
}

Var GruCell::operator()(Graph& g, Var x, Var h) const {
  const std::size_t d = static_cast<std::size_t>(hidden);
  const Var gx = g.linear(g.param(w_ih), g.param(b_ih), x);
  const Var gh = g.linear(g.param(w_hh), g.param(b_hh), h);
  const Var r = g.sigmoid(g.add(g.slice(gx, 0, d), g.slice(gh, 0, d)));
  const Var u = g.sigmoid(g.add(g.slice(gx, d, d), g.slice(gh, d, d)));
  const Var n = g.tanh(g.add(g.slice(gx, 2 * d, d), g.mul(r, g.slice(gh, 2 * d, d))));
  return g.add(n, g.mul(u, g.sub(h, n)));
}

Conv2d Conv2d::create(ParameterSet& ps, const std::string& name, int in_channels, int out_channels,
                      int kernel, int stride, int pad, std::mt19937_64& rng) {
  Conv2d c;
  c.in_channels = in_channels;
  c.out_channels = out_channels;
  c.kernel = kernel;
  c.stride = stride;
  c.pad = pad;
  c.weight = ps.add(name + ".weight", {out_channels, in_channels, kernel, kernel});
  c.bias = ps.add(name + ".bias", {out_channels});
  // He-uniform: every conv feeds a ReLU, and the smaller default bound shrinks
  // activations stage by stage until thin map features vanish.
  const double fan_in = static_cast<double>(in_channels * kernel * kernel);
  init_uniform(ps[c.weight], std::sqrt(6.0 / fan_in), rng);
  init_zero(ps[c.bias]);
  return c;
}

Var Conv2d::operator()(Graph& g, Var x) const {
  return g.conv2d(x, g.param(weight), g.param(bias), stride, pad);
}

}  // namespace contextvae::nn
