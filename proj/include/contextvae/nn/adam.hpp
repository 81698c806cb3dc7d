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

#include <vector>

#include "contextvae/nn/parameters.hpp"

namespace contextvae::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // global-norm clipping; <= 0 disables
};

class Adam {
 public:
  Adam() = default;
  Adam(const ParameterSet& params, AdamConfig config);

  // Clips `grads` in place, updates `params`, and returns the pre-clip norm.
  double step(ParameterSet& params, Gradients& grads);

  const AdamConfig& config() const { return config_; }
  long steps() const { return t_; }

  // Moment buffers, exposed for checkpointing.
  std::vector<std::vector<double>>& first_moment() { return m_; }
  std::vector<std::vector<double>>& second_moment() { return v_; }
  const std::vector<std::vector<double>>& first_moment() const { return m_; }
  const std::vector<std::vector<double>>& second_moment() const { return v_; }
  void set_steps(long t) { t_ = t; }

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace contextvae::nn
