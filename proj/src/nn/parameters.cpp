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

#include "contextvae/nn/parameters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "contextvae/error.hpp"

namespace contextvae::nn {

int ParameterSet::add(std::string name, std::vector<int> shape) {
  if (index_of(name) >= 0) throw ConfigError("duplicate parameter block: " + name);
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ConfigError("parameter block " + name + " has a non-positive dimension");
    n *= static_cast<std::size_t>(d);
  }
  blocks_.push_back(Block{std::move(name), std::move(shape), std::vector<double>(n, 0.0)});
  return static_cast<int>(blocks_.size() - 1);
}

int ParameterSet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < blocks_.size(); ++i)
    if (blocks_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::size_t ParameterSet::total_elements() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.value.size();
  return n;
}

std::vector<std::string> ParameterSet::groups() const {
  std::vector<std::string> out;
  for (const auto& b : blocks_) {
    std::string g = group_of(b.name);
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
  }
  return out;
}

bool ParameterSet::all_finite() const {
  for (const auto& b : blocks_)
    for (double v : b.value)
      if (!std::isfinite(v)) return false;
  return true;
}

bool ParameterSet::operator==(const ParameterSet& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& a = blocks_[i];
    const auto& b = other.blocks_[i];
    if (a.name != b.name || a.shape != b.shape || a.value != b.value) return false;
  }
  return true;
}

std::string group_of(const std::string& block_name) {
  const auto dot = block_name.find('.');
  return dot == std::string::npos ? block_name : block_name.substr(0, dot);
}

Gradients::Gradients(const ParameterSet& params) {
  data_.reserve(params.size());
  for (const auto& b : params.blocks()) data_.emplace_back(b.value.size(), 0.0);
}

void Gradients::zero() {
  for (auto& d : data_) std::fill(d.begin(), d.end(), 0.0);
}

void Gradients::add(const Gradients& other) {
  if (other.data_.size() != data_.size()) throw InvalidInput("Gradients::add: size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i)
    for (std::size_t j = 0; j < data_[i].size(); ++j) data_[i][j] += other.data_[i][j];
}

void Gradients::scale(double s) {
  for (auto& d : data_)
    for (double& v : d) v *= s;
}

double Gradients::global_norm() const {
  double s = 0.0;
  for (const auto& d : data_)
    for (double v : d) s += v * v;
  return std::sqrt(s);
}

bool Gradients::all_finite() const {
  for (const auto& d : data_)
    for (double v : d)
      if (!std::isfinite(v)) return false;
  return true;
}

void init_uniform(ParameterSet::Block& block, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : block.value) v = dist(rng);
}

void init_zero(ParameterSet::Block& block) { std::fill(block.value.begin(), block.value.end(), 0.0); }

}  // namespace contextvae::nn
