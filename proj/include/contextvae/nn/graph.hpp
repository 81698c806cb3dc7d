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
#include <functional>
#include <span>
#include <vector>

#include "contextvae/nn/parameters.hpp"
#include "contextvae/simd/kernels.hpp"

// Tape-based reverse-mode differentiation over dense double vectors. A Graph
// records one forward evaluation; backward() walks the tape in reverse and
// accumulates parameter gradients straight into the Gradients sink.

namespace contextvae::nn {

struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

class Graph {
 public:
  // Without a gradient sink, parameters behave as constants.
  explicit Graph(const ParameterSet& params, Gradients* grads = nullptr);

  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(std::vector<double> values, std::vector<int> shape = {});
  Var scalar_constant(double v) { return constant({v}); }
  Var zeros(std::size_t n) { return constant(std::vector<double>(n, 0.0)); }
  // One node per block per graph; repeated calls return the same Var.
  Var param(int block);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  Var add_scalar(Var a, double s);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var relu(Var a);
  Var exp(Var a);
  // Gradient passes only where lo <= a <= hi.
  Var clamp(Var a, double lo, double hi);

  Var concat(std::span<const Var> parts);
  Var concat(std::initializer_list<Var> parts) {
    return concat(std::span<const Var>(parts.begin(), parts.size()));
  }
  Var slice(Var a, std::size_t offset, std::size_t length);
  Var reshape(Var a, std::vector<int> shape);
  // Each part has the same size k; result is [n x k].
  Var stack_rows(std::span<const Var> rows);

  Var sum(Var a);
  Var dot(Var a, Var b);

  // y = W x + b with W [out x in]; bias may be an invalid Var.
  Var linear(Var weight, Var bias, Var x);
  // Row-wise linear map: rows [n x in] -> [n x out].
  Var linear_rows(Var weight, Var bias, Var rows);
  // m [n x k] times v [k] -> [n].
  Var matvec(Var m, Var v);
  // w [n] times m [n x k] -> [k].
  Var vecmat(Var w, Var m);
  Var sum_rows(Var m);
  Var softmax(Var a);

  // x [C x H x W], weight [O x C x K x K], bias [O] -> [O x H' x W'].
  Var conv2d(Var x, Var weight, Var bias, int stride, int pad);
  // [C x H x W] -> [C].
  Var spatial_mean(Var x);

  // Sum over dimensions of the diagonal Gaussian log-density of x.
  Var gaussian_log_prob(Var mean, Var log_std, Var x);
  // Closed-form KL(q || p) between diagonal Gaussians, summed over dimensions.
  Var kl_diag_gaussian(Var q_mean, Var q_log_std, Var p_mean, Var p_log_std);

  std::span<const double> value(Var v) const;
  double scalar(Var v) const;
  const std::vector<int>& shape(Var v) const;
  std::size_t size(Var v) const;

  // Seeds d(loss)/d(loss) = 1; loss must have exactly one element.
  void backward(Var loss);
  // Empty when the node does not participate in the gradient.
  std::span<const double> grad(Var v) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::vector<double> own_value;
    const double* ext_value = nullptr;
    std::size_t size = 0;
    std::vector<int> shape;
    bool needs_grad = false;
    std::vector<double> own_grad;
    double* ext_grad = nullptr;
    std::function<void(Graph&, int)> back;
  };

  int push(std::vector<double> value, std::vector<int> shape, bool needs_grad,
           std::function<void(Graph&, int)> back);
  const double* val(int id) const;
  bool needs(int id) const { return nodes_[id].needs_grad; }
  // Gradient accumulator of a node, allocated on first use; nullptr when the
  // node does not need a gradient.
  double* acc(int id);
  const double* gout(int id) const;
  void check_same_size(Var a, Var b, const char* op) const;

  const ParameterSet& params_;
  Gradients* grads_;
  const simd::KernelTable& k_;
  std::vector<Node> nodes_;
  std::vector<int> param_nodes_;
};

}  // namespace contextvae::nn
