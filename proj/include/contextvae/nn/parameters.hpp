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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace contextvae::nn {

// Named, shaped blocks of learnable weights. Blocks are addressed by index;
// the name prefix before the first '.' is the block's group (e.g.
// "map_encoder.conv1.weight" belongs to "map_encoder").
class ParameterSet {
 public:
  struct Block {
    std::string name;
    std::vector<int> shape;
    std::vector<double> value;
  };

  int add(std::string name, std::vector<int> shape);
  int index_of(const std::string& name) const;  // -1 if absent

  std::size_t size() const { return blocks_.size(); }
  Block& operator[](std::size_t i) { return blocks_[i]; }
  const Block& operator[](std::size_t i) const { return blocks_[i]; }
  std::span<const Block> blocks() const { return blocks_; }

  std::size_t total_elements() const;
  std::vector<std::string> groups() const;
  bool all_finite() const;

  bool operator==(const ParameterSet& other) const;

 private:
  std::vector<Block> blocks_;
};

std::string group_of(const std::string& block_name);

// Gradient buffers shaped like a ParameterSet.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ParameterSet& params);

  std::size_t size() const { return data_.size(); }
  std::vector<double>& operator[](std::size_t i) { return data_[i]; }
  const std::vector<double>& operator[](std::size_t i) const { return data_[i]; }

  void zero();
  void add(const Gradients& other);
  void scale(double s);
  double global_norm() const;
  bool all_finite() const;

 private:
  std::vector<std::vector<double>> data_;
};

// Initializers draw from the given engine in block order.
void init_uniform(ParameterSet::Block& block, double bound, std::mt19937_64& rng);
void init_zero(ParameterSet::Block& block);

}  // namespace contextvae::nn
