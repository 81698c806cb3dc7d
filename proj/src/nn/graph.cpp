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

#include "contextvae/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "contextvae/error.hpp"

namespace contextvae::nn {
namespace {

std::size_t product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // 0.5 * log(2 pi)

}  // namespace

Graph::Graph(const ParameterSet& params, Gradients* grads)
    : params_(params), grads_(grads), k_(simd::kernels()), param_nodes_(params.size(), -1) {
  if (grads_ != nullptr && grads_->size() != params_.size())
    throw InvalidInput("Graph: gradient sink does not match parameter set");
  nodes_.reserve(256);
}

int Graph::push(std::vector<double> value, std::vector<int> shape, bool needs_grad,
                std::function<void(Graph&, int)> back) {
  Node n;
  n.size = value.size();
  n.own_value = std::move(value);
  n.shape = shape.empty() ? std::vector<int>{static_cast<int>(n.size)} : std::move(shape);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size() - 1);
}

const double* Graph::val(int id) const {
  const Node& n = nodes_[id];
  return n.ext_value != nullptr ? n.ext_value : n.own_value.data();
}

double* Graph::acc(int id) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return nullptr;
  if (n.ext_grad != nullptr) return n.ext_grad;
  if (n.own_grad.empty()) n.own_grad.assign(n.size, 0.0);
  return n.own_grad.data();
}

const double* Graph::gout(int id) const {
  const Node& n = nodes_[id];
  return n.ext_grad != nullptr ? n.ext_grad : n.own_grad.data();
}

void Graph::check_same_size(Var a, Var b, const char* op) const {
  if (size(a) != size(b))
    throw InvalidInput(std::string("Graph::") + op + ": size mismatch " +
                       std::to_string(size(a)) + " vs " + std::to_string(size(b)));
}

Var Graph::constant(std::vector<double> values, std::vector<int> shape) {
  if (!shape.empty() && product(shape) != values.size())
    throw InvalidInput("Graph::constant: shape does not match value count");
  return Var{push(std::move(values), std::move(shape), false, nullptr)};
}

Var Graph::param(int block) {
  if (block < 0 || static_cast<std::size_t>(block) >= params_.size())
    throw InvalidInput("Graph::param: bad block index");
  if (param_nodes_[block] >= 0) return Var{param_nodes_[block]};
  const auto& b = params_[block];
  Node n;
  n.ext_value = b.value.data();
  n.size = b.value.size();
  n.shape = b.shape;
  n.needs_grad = grads_ != nullptr;
  if (grads_ != nullptr) n.ext_grad = (*grads_)[block].data();
  nodes_.push_back(std::move(n));
  param_nodes_[block] = static_cast<int>(nodes_.size() - 1);
  return Var{param_nodes_[block]};
}

Var Graph::add(Var a, Var b) {
  check_same_size(a, b, "add");
  const std::size_t n = size(a);
  std::vector<double> y(n);
  const double* x0 = val(a.id);
  const double* x1 = val(b.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + x1[i];
  return Var{push(std::move(y), shape(a), needs(a.id) || needs(b.id), [a, b, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    if (double* ga = g.acc(a.id))
      for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i];
    if (double* gb = g.acc(b.id))
      for (std::size_t i = 0; i < n; ++i) gb[i] += gy[i];
  })};
}

Var Graph::sub(Var a, Var b) {
  check_same_size(a, b, "sub");
  const std::size_t n = size(a);
  std::vector<double> y(n);
  const double* x0 = val(a.id);
  const double* x1 = val(b.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] - x1[i];
  return Var{push(std::move(y), shape(a), needs(a.id) || needs(b.id), [a, b, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    if (double* ga = g.acc(a.id))
      for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i];
    if (double* gb = g.acc(b.id))
      for (std::size_t i = 0; i < n; ++i) gb[i] -= gy[i];
  })};
}

Var Graph::mul(Var a, Var b) {
  check_same_size(a, b, "mul");
  const std::size_t n = size(a);
  std::vector<double> y(n);
  const double* x0 = val(a.id);
  const double* x1 = val(b.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] * x1[i];
  return Var{push(std::move(y), shape(a), needs(a.id) || needs(b.id), [a, b, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* x0 = g.val(a.id);
    const double* x1 = g.val(b.id);
    if (double* ga = g.acc(a.id))
      for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i] * x1[i];
    if (double* gb = g.acc(b.id))
      for (std::size_t i = 0; i < n; ++i) gb[i] += gy[i] * x0[i];
  })};
}

Var Graph::scale(Var a, double s) {
  const std::size_t n = size(a);
  std::vector<double> y(val(a.id), val(a.id) + n);
  for (double& v : y) v *= s;
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n, s](Graph& g, int self) {
    const double* gy = g.gout(self);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += s * gy[i];
  })};
}

Var Graph::add_scalar(Var a, double s) {
  const std::size_t n = size(a);
  std::vector<double> y(val(a.id), val(a.id) + n);
  for (double& v : y) v += s;
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i];
  })};
}

Var Graph::sigmoid(Var a) {
  const std::size_t n = size(a);
  const double* x = val(a.id);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* y = g.val(self);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i] * y[i] * (1.0 - y[i]);
  })};
}

Var Graph::tanh(Var a) {
  const std::size_t n = size(a);
  const double* x = val(a.id);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* y = g.val(self);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i] * (1.0 - y[i] * y[i]);
  })};
}

Var Graph::relu(Var a) {
  const std::size_t n = size(a);
  const double* x = val(a.id);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* x = g.val(a.id);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] > 0.0) ga[i] += gy[i];
  })};
}

Var Graph::exp(Var a) {
  const std::size_t n = size(a);
  const double* x = val(a.id);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(x[i]);
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* y = g.val(self);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i] * y[i];
  })};
}

Var Graph::clamp(Var a, double lo, double hi) {
  const std::size_t n = size(a);
  const double* x = val(a.id);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::clamp(x[i], lo, hi);
  return Var{push(std::move(y), shape(a), needs(a.id), [a, n, lo, hi](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* x = g.val(a.id);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] >= lo && x[i] <= hi) ga[i] += gy[i];
  })};
}

Var Graph::concat(std::span<const Var> parts) {
  std::vector<double> y;
  bool any = false;
  for (Var p : parts) {
    const double* x = val(p.id);
    y.insert(y.end(), x, x + size(p));
    any = any || needs(p.id);
  }
  std::vector<Var> ids(parts.begin(), parts.end());
  return Var{push(std::move(y), {}, any, [ids](Graph& g, int self) {
    const double* gy = g.gout(self);
    std::size_t off = 0;
    for (Var p : ids) {
      const std::size_t n = g.size(p);
      if (double* gp = g.acc(p.id))
        for (std::size_t i = 0; i < n; ++i) gp[i] += gy[off + i];
      off += n;
    }
  })};
}

Var Graph::slice(Var a, std::size_t offset, std::size_t length) {
  if (offset + length > size(a)) throw InvalidInput("Graph::slice: out of range");
  const double* x = val(a.id) + offset;
  std::vector<double> y(x, x + length);
  return Var{push(std::move(y), {}, needs(a.id), [a, offset, length](Graph& g, int self) {
    const double* gy = g.gout(self);
    double* ga = g.acc(a.id) + offset;
    for (std::size_t i = 0; i < length; ++i) ga[i] += gy[i];
  })};
}

Var Graph::reshape(Var a, std::vector<int> new_shape) {
  const std::size_t n = size(a);
  if (product(new_shape) != n) throw InvalidInput("Graph::reshape: element count mismatch");
  std::vector<double> y(val(a.id), val(a.id) + n);
  return Var{push(std::move(y), std::move(new_shape), needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += gy[i];
  })};
}

Var Graph::stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw InvalidInput("Graph::stack_rows: no rows");
  const std::size_t k = size(rows[0]);
  std::vector<double> y;
  y.reserve(rows.size() * k);
  bool any = false;
  for (Var r : rows) {
    if (size(r) != k) throw InvalidInput("Graph::stack_rows: ragged rows");
    y.insert(y.end(), val(r.id), val(r.id) + k);
    any = any || needs(r.id);
  }
  std::vector<Var> ids(rows.begin(), rows.end());
  return Var{push(std::move(y), {static_cast<int>(rows.size()), static_cast<int>(k)}, any,
                  [ids, k](Graph& g, int self) {
                    const double* gy = g.gout(self);
                    for (std::size_t r = 0; r < ids.size(); ++r)
                      if (double* gr = g.acc(ids[r].id))
                        for (std::size_t i = 0; i < k; ++i) gr[i] += gy[r * k + i];
                  })};
}

Var Graph::sum(Var a) {
  const std::size_t n = size(a);
  const double* x = val(a.id);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return Var{push({s}, {}, needs(a.id), [a, n](Graph& g, int self) {
    const double gy = g.gout(self)[0];
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += gy;
  })};
}

Var Graph::dot(Var a, Var b) {
  check_same_size(a, b, "dot");
  const std::size_t n = size(a);
  const double s = k_.dot(val(a.id), val(b.id), n);
  return Var{push({s}, {}, needs(a.id) || needs(b.id), [a, b, n](Graph& g, int self) {
    const double gy = g.gout(self)[0];
    if (double* ga = g.acc(a.id)) g.k_.axpy(gy, g.val(b.id), ga, n);
    if (double* gb = g.acc(b.id)) g.k_.axpy(gy, g.val(a.id), gb, n);
  })};
}

Var Graph::linear(Var weight, Var bias, Var x) {
  const auto& ws = shape(weight);
  if (ws.size() != 2) throw InvalidInput("Graph::linear: weight must be 2-D");
  const std::size_t out = ws[0];
  const std::size_t in = ws[1];
  if (size(x) != in)
    throw InvalidInput("Graph::linear: input size " + std::to_string(size(x)) + " != " +
                       std::to_string(in));
  if (bias.valid() && size(bias) != out) throw InvalidInput("Graph::linear: bias size mismatch");
  std::vector<double> y(out, 0.0);
  if (bias.valid()) std::copy(val(bias.id), val(bias.id) + out, y.begin());
  k_.gemv(val(weight.id), val(x.id), y.data(), out, in);
  const bool ng = needs(weight.id) || needs(x.id) || (bias.valid() && needs(bias.id));
  return Var{push(std::move(y), {}, ng, [weight, bias, x, out, in](Graph& g, int self) {
    const double* gy = g.gout(self);
    if (double* gw = g.acc(weight.id)) g.k_.ger(gy, g.val(x.id), gw, out, in);
    if (bias.valid())
      if (double* gb = g.acc(bias.id))
        for (std::size_t i = 0; i < out; ++i) gb[i] += gy[i];
    if (double* gx = g.acc(x.id)) g.k_.gemv_t(g.val(weight.id), gy, gx, out, in);
  })};
}

Var Graph::linear_rows(Var weight, Var bias, Var rows) {
  const auto& ws = shape(weight);
  const auto& rs = shape(rows);
  if (ws.size() != 2 || rs.size() != 2) throw InvalidInput("Graph::linear_rows: expects 2-D");
  const std::size_t out = ws[0];
  const std::size_t in = ws[1];
  const std::size_t n = rs[0];
  if (static_cast<std::size_t>(rs[1]) != in) throw InvalidInput("Graph::linear_rows: width mismatch");
  std::vector<double> y(n * out, 0.0);
  if (bias.valid()) {
    if (size(bias) != out) throw InvalidInput("Graph::linear_rows: bias size mismatch");
    for (std::size_t r = 0; r < n; ++r) std::copy(val(bias.id), val(bias.id) + out, y.begin() + r * out);
  }
  k_.gemm_nt(val(rows.id), val(weight.id), y.data(), n, out, in);
  const bool ng = needs(weight.id) || needs(rows.id) || (bias.valid() && needs(bias.id));
  return Var{push(std::move(y), {static_cast<int>(n), static_cast<int>(out)}, ng,
                  [weight, bias, rows, out, in, n](Graph& g, int self) {
                    const double* gy = g.gout(self);
                    if (double* gw = g.acc(weight.id)) g.k_.gemm_tn(gy, g.val(rows.id), gw, out, in, n);
                    if (bias.valid())
                      if (double* gb = g.acc(bias.id))
                        for (std::size_t r = 0; r < n; ++r)
                          for (std::size_t i = 0; i < out; ++i) gb[i] += gy[r * out + i];
                    if (double* gx = g.acc(rows.id)) g.k_.gemm_nn(gy, g.val(weight.id), gx, n, in, out);
                  })};
}

Var Graph::matvec(Var m, Var v) {
  const auto& ms = shape(m);
  if (ms.size() != 2 || static_cast<std::size_t>(ms[1]) != size(v))
    throw InvalidInput("Graph::matvec: shape mismatch");
  const std::size_t n = ms[0];
  const std::size_t k = ms[1];
  std::vector<double> y(n, 0.0);
  k_.gemv(val(m.id), val(v.id), y.data(), n, k);
  return Var{push(std::move(y), {}, needs(m.id) || needs(v.id), [m, v, n, k](Graph& g, int self) {
    const double* gy = g.gout(self);
    if (double* gm = g.acc(m.id)) g.k_.ger(gy, g.val(v.id), gm, n, k);
    if (double* gv = g.acc(v.id)) g.k_.gemv_t(g.val(m.id), gy, gv, n, k);
  })};
}

Var Graph::vecmat(Var w, Var m) {
  const auto& ms = shape(m);
  if (ms.size() != 2 || static_cast<std::size_t>(ms[0]) != size(w))
    throw InvalidInput("Graph::vecmat: shape mismatch");
  const std::size_t n = ms[0];
  const std::size_t k = ms[1];
  std::vector<double> y(k, 0.0);
  k_.gemv_t(val(m.id), val(w.id), y.data(), n, k);
  return Var{push(std::move(y), {}, needs(m.id) || needs(w.id), [w, m, n, k](Graph& g, int self) {
    const double* gy = g.gout(self);
    if (double* gw = g.acc(w.id)) g.k_.gemv(g.val(m.id), gy, gw, n, k);
    if (double* gm = g.acc(m.id)) g.k_.ger(g.val(w.id), gy, gm, n, k);
  })};
}

Var Graph::sum_rows(Var m) {
  const auto& ms = shape(m);
  if (ms.size() != 2) throw InvalidInput("Graph::sum_rows: expects 2-D");
  const std::size_t n = ms[0];
  const std::size_t k = ms[1];
  const double* x = val(m.id);
  std::vector<double> y(k, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t i = 0; i < k; ++i) y[i] += x[r * k + i];
  return Var{push(std::move(y), {}, needs(m.id), [m, n, k](Graph& g, int self) {
    const double* gy = g.gout(self);
    double* gm = g.acc(m.id);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < k; ++i) gm[r * k + i] += gy[i];
  })};
}

Var Graph::softmax(Var a) {
  const std::size_t n = size(a);
  if (n == 0) throw InvalidInput("Graph::softmax: empty input");
  const double* x = val(a.id);
  const double mx = *std::max_element(x, x + n);
  std::vector<double> y(n);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (y[i] = std::exp(x[i] - mx));
  for (double& v : y) v /= s;
  return Var{push(std::move(y), {}, needs(a.id), [a, n](Graph& g, int self) {
    const double* gy = g.gout(self);
    const double* y = g.val(self);
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) inner += gy[i] * y[i];
    double* ga = g.acc(a.id);
    for (std::size_t i = 0; i < n; ++i) ga[i] += y[i] * (gy[i] - inner);
  })};
}

namespace {

struct ConvGeometry {
  std::size_t c, h, w, o, kk, ho, wo;
  int stride, pad;
  std::size_t patch() const { return c * kk * kk; }
  std::size_t pixels() const { return ho * wo; }
};

void im2col(const double* x, const ConvGeometry& s, double* cols) {
  const std::size_t p = s.pixels();
  for (std::size_t ci = 0; ci < s.c; ++ci)
    for (std::size_t ki = 0; ki < s.kk; ++ki)
      for (std::size_t kj = 0; kj < s.kk; ++kj) {
        double* row = cols + ((ci * s.kk + ki) * s.kk + kj) * p;
        for (std::size_t oh = 0; oh < s.ho; ++oh) {
          const long ih = static_cast<long>(oh) * s.stride - s.pad + static_cast<long>(ki);
          double* out = row + oh * s.wo;
          if (ih < 0 || ih >= static_cast<long>(s.h)) {
            std::fill(out, out + s.wo, 0.0);
            continue;
          }
          const double* in = x + (ci * s.h + ih) * s.w;
          for (std::size_t ow = 0; ow < s.wo; ++ow) {
            const long iw = static_cast<long>(ow) * s.stride - s.pad + static_cast<long>(kj);
            out[ow] = (iw < 0 || iw >= static_cast<long>(s.w)) ? 0.0 : in[iw];
          }
        }
      }
}

void col2im(const double* cols, const ConvGeometry& s, double* dx) {
  const std::size_t p = s.pixels();
  for (std::size_t ci = 0; ci < s.c; ++ci)
    for (std::size_t ki = 0; ki < s.kk; ++ki)
      for (std::size_t kj = 0; kj < s.kk; ++kj) {
        const double* row = cols + ((ci * s.kk + ki) * s.kk + kj) * p;
        for (std::size_t oh = 0; oh < s.ho; ++oh) {
          const long ih = static_cast<long>(oh) * s.stride - s.pad + static_cast<long>(ki);
          if (ih < 0 || ih >= static_cast<long>(s.h)) continue;
          double* out = dx + (ci * s.h + ih) * s.w;
          for (std::size_t ow = 0; ow < s.wo; ++ow) {
            const long iw = static_cast<long>(ow) * s.stride - s.pad + static_cast<long>(kj);
            if (iw >= 0 && iw < static_cast<long>(s.w)) out[iw] += row[oh * s.wo + ow];
          }
        }
      }
}

}  // namespace

Var Graph::conv2d(Var x, Var weight, Var bias, int stride, int pad) {
  const auto& xs = shape(x);
  const auto& ws = shape(weight);
  if (xs.size() != 3 || ws.size() != 4 || ws[1] != xs[0] || ws[2] != ws[3])
    throw InvalidInput("Graph::conv2d: expects x [C,H,W] and weight [O,C,K,K]");
  if (stride < 1 || pad < 0) throw InvalidInput("Graph::conv2d: bad stride or padding");
  ConvGeometry s{};
  s.c = xs[0];
  s.h = xs[1];
  s.w = xs[2];
  s.o = ws[0];
  s.kk = ws[2];
  s.stride = stride;
  s.pad = pad;
  const long ho = (static_cast<long>(s.h) + 2 * pad - static_cast<long>(s.kk)) / stride + 1;
  const long wo = (static_cast<long>(s.w) + 2 * pad - static_cast<long>(s.kk)) / stride + 1;
  if (ho <= 0 || wo <= 0) throw InvalidInput("Graph::conv2d: kernel larger than input");
  s.ho = ho;
  s.wo = wo;
  if (bias.valid() && size(bias) != s.o) throw InvalidInput("Graph::conv2d: bias size mismatch");

  std::vector<double> cols(s.patch() * s.pixels());
  im2col(val(x.id), s, cols.data());
  std::vector<double> y(s.o * s.pixels(), 0.0);
  if (bias.valid())
    for (std::size_t oc = 0; oc < s.o; ++oc)
      std::fill(y.begin() + oc * s.pixels(), y.begin() + (oc + 1) * s.pixels(), val(bias.id)[oc]);
  k_.gemm_nn(val(weight.id), cols.data(), y.data(), s.o, s.pixels(), s.patch());

  const bool ng = needs(x.id) || needs(weight.id) || (bias.valid() && needs(bias.id));
  if (!ng) cols.clear();
  return Var{push(std::move(y), {static_cast<int>(s.o), static_cast<int>(s.ho), static_cast<int>(s.wo)},
                  ng, [x, weight, bias, s, cols = std::move(cols)](Graph& g, int self) {
                    const double* gy = g.gout(self);
                    const std::size_t p = s.pixels();
                    if (double* gw = g.acc(weight.id))
                      g.k_.gemm_nt(gy, cols.data(), gw, s.o, s.patch(), p);
                    if (bias.valid())
                      if (double* gb = g.acc(bias.id))
                        for (std::size_t oc = 0; oc < s.o; ++oc)
                          for (std::size_t i = 0; i < p; ++i) gb[oc] += gy[oc * p + i];
                    if (double* gx = g.acc(x.id)) {
                      std::vector<double> dcols(s.patch() * p, 0.0);
                      g.k_.gemm_tn(g.val(weight.id), gy, dcols.data(), s.patch(), p, s.o);
                      col2im(dcols.data(), s, gx);
                    }
                  })};
}

Var Graph::spatial_mean(Var x) {
  const auto& xs = shape(x);
  if (xs.size() != 3) throw InvalidInput("Graph::spatial_mean: expects [C,H,W]");
  const std::size_t c = xs[0];
  const std::size_t p = static_cast<std::size_t>(xs[1]) * xs[2];
  const double* v = val(x.id);
  std::vector<double> y(c, 0.0);
  for (std::size_t ci = 0; ci < c; ++ci) {
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i) s += v[ci * p + i];
    y[ci] = s / static_cast<double>(p);
  }
  return Var{push(std::move(y), {}, needs(x.id), [x, c, p](Graph& g, int self) {
    const double* gy = g.gout(self);
    double* gx = g.acc(x.id);
    for (std::size_t ci = 0; ci < c; ++ci) {
      const double d = gy[ci] / static_cast<double>(p);
      for (std::size_t i = 0; i < p; ++i) gx[ci * p + i] += d;
    }
  })};
}

Var Graph::gaussian_log_prob(Var mean, Var log_std, Var x) {
  check_same_size(mean, log_std, "gaussian_log_prob");
  check_same_size(mean, x, "gaussian_log_prob");
  const std::size_t n = size(mean);
  const double* mu = val(mean.id);
  const double* ls = val(log_std.id);
  const double* xv = val(x.id);
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = (xv[i] - mu[i]) * std::exp(-ls[i]);
    lp += -0.5 * z * z - ls[i] - kHalfLogTwoPi;
  }
  const bool ng = needs(mean.id) || needs(log_std.id) || needs(x.id);
  return Var{push({lp}, {}, ng, [mean, log_std, x, n](Graph& g, int self) {
    const double gy = g.gout(self)[0];
    const double* mu = g.val(mean.id);
    const double* ls = g.val(log_std.id);
    const double* xv = g.val(x.id);
    double* gm = g.acc(mean.id);
    double* gl = g.acc(log_std.id);
    double* gx = g.acc(x.id);
    for (std::size_t i = 0; i < n; ++i) {
      const double inv_var = std::exp(-2.0 * ls[i]);
      const double diff = xv[i] - mu[i];
      if (gm) gm[i] += gy * diff * inv_var;
      if (gx) gx[i] -= gy * diff * inv_var;
      if (gl) gl[i] += gy * (diff * diff * inv_var - 1.0);
    }
  })};
}

Var Graph::kl_diag_gaussian(Var q_mean, Var q_log_std, Var p_mean, Var p_log_std) {
  check_same_size(q_mean, q_log_std, "kl_diag_gaussian");
  check_same_size(q_mean, p_mean, "kl_diag_gaussian");
  check_same_size(q_mean, p_log_std, "kl_diag_gaussian");
  const std::size_t n = size(q_mean);
  const double* mq = val(q_mean.id);
  const double* lq = val(q_log_std.id);
  const double* mp = val(p_mean.id);
  const double* lp = val(p_log_std.id);
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double var_ratio = std::exp(2.0 * (lq[i] - lp[i]));
    const double d = mq[i] - mp[i];
    kl += lp[i] - lq[i] + 0.5 * (var_ratio + d * d * std::exp(-2.0 * lp[i])) - 0.5;
  }
  const bool ng = needs(q_mean.id) || needs(q_log_std.id) || needs(p_mean.id) || needs(p_log_std.id);
  return Var{push({kl}, {}, ng, [q_mean, q_log_std, p_mean, p_log_std, n](Graph& g, int self) {
    const double gy = g.gout(self)[0];
    const double* mq = g.val(q_mean.id);
    const double* lq = g.val(q_log_std.id);
    const double* mp = g.val(p_mean.id);
    const double* lp = g.val(p_log_std.id);
    double* gmq = g.acc(q_mean.id);
    double* glq = g.acc(q_log_std.id);
    double* gmp = g.acc(p_mean.id);
    double* glp = g.acc(p_log_std.id);
    for (std::size_t i = 0; i < n; ++i) {
      const double inv_vp = std::exp(-2.0 * lp[i]);
      const double var_ratio = std::exp(2.0 * (lq[i] - lp[i]));
      const double d = mq[i] - mp[i];
      if (gmq) gmq[i] += gy * d * inv_vp;
      if (gmp) gmp[i] -= gy * d * inv_vp;
      if (glq) glq[i] += gy * (var_ratio - 1.0);
      if (glp) glp[i] += gy * (1.0 - var_ratio - d * d * inv_vp);
    }
  })};
}

std::span<const double> Graph::value(Var v) const { return {val(v.id), nodes_[v.id].size}; }

double Graph::scalar(Var v) const {
  if (nodes_[v.id].size != 1) throw InvalidInput("Graph::scalar: node is not a scalar");
  return val(v.id)[0];
}

const std::vector<int>& Graph::shape(Var v) const { return nodes_[v.id].shape; }

std::size_t Graph::size(Var v) const { return nodes_[v.id].size; }

void Graph::backward(Var loss) {
  if (size(loss) != 1) throw InvalidInput("Graph::backward: loss must be a scalar");
  double* seed = acc(loss.id);
  if (seed == nullptr) return;
  seed[0] += 1.0;
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad || !n.back) continue;
    if (n.ext_grad == nullptr && n.own_grad.empty()) continue;
    n.back(*this, i);
  }
}

std::span<const double> Graph::grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.ext_grad != nullptr) return {n.ext_grad, n.size};
  return {n.own_grad.data(), n.own_grad.size()};
}

}  // namespace contextvae::nn
