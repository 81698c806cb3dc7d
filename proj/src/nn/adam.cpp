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

#include "contextvae/nn/adam.hpp"

#include <cmath>

#include "contextvae/error.hpp"

namespace contextvae::nn {

Adam::Adam(const ParameterSet& params, AdamConfig config) : config_(config) {
  if (!(config.learning_rate >= 0.0)) throw ConfigError("adam: learning_rate must be >= 0");
  if (config.beta1 < 0.0 || config.beta1 >= 1.0 || config.beta2 < 0.0 || config.beta2 >= 1.0)
    throw ConfigError("adam: betas must lie in [0, 1)");
  m_.resize(params.size());
  v_.resize(params.size());
  for (std::size_t b = 0; b < params.size(); ++b) {
    m_[b].assign(params[b].value.size(), 0.0);
    v_[b].assign(params[b].value.size(), 0.0);
  }
}

double Adam::step(ParameterSet& params, Gradients& grads) {
  if (grads.size() != params.size() || m_.size() != params.size())
    throw InvalidInput("adam: gradient layout does not match parameters");
  const double norm = grads.global_norm();
  if (config_.clip_norm > 0.0 && norm > config_.clip_norm) grads.scale(config_.clip_norm / norm);

  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  const double b1 = config_.beta1, b2 = config_.beta2;
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& w = params[b].value;
    const auto& g = grads[b];
    auto& m = m_[b];
    auto& v = v_[b];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      w[i] -= config_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config_.epsilon);
    }
  }
  return norm;
}

}  // namespace contextvae::nn
