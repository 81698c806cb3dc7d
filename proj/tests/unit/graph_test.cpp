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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "contextvae/error.hpp"
#include "contextvae/nn/layers.hpp"

namespace contextvae::nn {
namespace {

using Builder = std::function<Var(Graph&, const std::vector<Var>&)>;

// Each input becomes a parameter block so that the graph routes its gradient
// into a Gradients sink; the output is reduced against fixed random weights.
struct FdCase {
  std::vector<std::vector<int>> shapes;
  Builder build;
  double lo = -1.0;
  double hi = 1.0;
};

double evaluate(const ParameterSet& ps, const FdCase& c, const std::vector<double>& probe,
                Gradients* grads) {
  Graph g(ps, grads);
  std::vector<Var> in;
  for (std::size_t i = 0; i < c.shapes.size(); ++i) in.push_back(g.param(static_cast<int>(i)));
  const Var out = c.build(g, in);
  std::vector<double> w(probe.begin(), probe.begin() + static_cast<long>(g.size(out)));
  const Var loss = g.dot(out, g.constant(std::move(w)));
  if (grads != nullptr) g.backward(loss);
  return g.scalar(loss);
}

void check_gradients(const FdCase& c, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(c.lo, c.hi);
  ParameterSet ps;
  for (std::size_t i = 0; i < c.shapes.size(); ++i) {
    const int b = ps.add("in." + std::to_string(i), c.shapes[i]);
    for (auto& v : ps[b].value) v = u(rng);
  }
  std::vector<double> probe(1 << 16);
  std::normal_distribution<double> n(0, 1);
  for (auto& v : probe) v = n(rng);

  Gradients grads(ps);
  evaluate(ps, c, probe, &grads);

  const double h = 1e-6;
  for (std::size_t b = 0; b < ps.size(); ++b) {
    for (std::size_t i = 0; i < ps[b].value.size(); ++i) {
      const double keep = ps[b].value[i];
      ps[b].value[i] = keep + h;
      const double up = evaluate(ps, c, probe, nullptr);
      ps[b].value[i] = keep - h;
      const double down = evaluate(ps, c, probe, nullptr);
      ps[b].value[i] = keep;
      const double fd = (up - down) / (2 * h);
      EXPECT_NEAR(grads[b][i], fd, 1e-6 * std::max(1.0, std::abs(fd)))
          << "input " << b << " element " << i;
    }
  }
}

TEST(GraphGradients, Elementwise) {
  check_gradients({{{7}, {7}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.add(g.mul(x[0], x[1]), g.sub(g.scale(x[0], 3.0), x[1]));
                   }});
  check_gradients({{{9}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.concat({g.sigmoid(x[0]), g.tanh(x[0]), g.exp(x[0]),
                                      g.add_scalar(x[0], 2.0)});
                   }});
}

TEST(GraphGradients, ReluAndClampAwayFromKinks) {
  // Inputs kept off the kinks so central differences are valid.
  FdCase c{{{8}}, [](Graph& g, const std::vector<Var>& x) {
             return g.concat({g.relu(g.add_scalar(x[0], 0.05)), g.clamp(x[0], -0.6, 0.55)});
           }};
  c.lo = 0.1;
  c.hi = 0.5;
  check_gradients(c);
  c.lo = -0.5;
  c.hi = -0.1;
  check_gradients(c);
}

TEST(GraphGradients, StructuralOps) {
  check_gradients({{{6}, {4}}, [](Graph& g, const std::vector<Var>& x) {
                     const Var cat = g.concat({x[0], x[1], x[0]});
                     const Var s = g.slice(cat, 3, 5);
                     return g.concat({s, g.sum(x[0]), g.dot(x[0], x[0]), g.softmax(x[1])});
                   }});
  check_gradients({{{3}, {3}, {3}}, [](Graph& g, const std::vector<Var>& x) {
                     const Var m = g.stack_rows(std::vector<Var>{x[0], x[1], x[2]});
                     return g.concat({g.sum_rows(m), g.reshape(m, {9})});
                   }});
}

TEST(GraphGradients, LinearMaps) {
  check_gradients({{{4, 5}, {4}, {5}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.concat({g.linear(x[0], x[1], x[2]), g.linear(x[0], Var{}, x[2])});
                   }});
  check_gradients({{{4, 3}, {4}, {6, 3}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.linear_rows(x[0], x[1], x[2]);
                   }});
  check_gradients({{{5, 3}, {3}, {5}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.concat({g.matvec(x[0], x[1]), g.vecmat(x[2], x[0])});
                   }});
}

TEST(GraphGradients, Convolution) {
  check_gradients({{{2, 7, 6}, {3, 2, 3, 3}, {3}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.conv2d(x[0], x[1], x[2], 2, 1);
                   }});
  check_gradients({{{3, 8, 8}, {2, 3, 4, 4}, {2}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.spatial_mean(g.conv2d(x[0], x[1], x[2], 4, 0));
                   }});
}

TEST(GraphGradients, GaussianTerms) {
  check_gradients({{{5}, {5}, {5}, {5}, {5}}, [](Graph& g, const std::vector<Var>& x) {
                     return g.concat({g.gaussian_log_prob(x[0], x[1], x[2]),
                                      g.kl_diag_gaussian(x[0], x[1], x[3], x[4])});
                   }});
}

TEST(GraphGradients, GruCellThroughTwoSteps) {
  ParameterSet probe_ps;
  std::mt19937_64 rng(3);
  const auto cell = GruCell::create(probe_ps, "gru", 3, 4, rng);
  // Re-express the cell's blocks as FD inputs in the same order.
  FdCase c;
  for (std::size_t b = 0; b < probe_ps.size(); ++b) c.shapes.push_back(probe_ps[b].shape);
  c.shapes.push_back({3});
  c.shapes.push_back({4});
  c.build = [cell](Graph& g, const std::vector<Var>& x) {
    const Var h1 = cell(g, x[4], x[5]);
    return cell(g, g.tanh(x[4]), h1);
  };
  check_gradients(c);
}

TEST(GraphValues, ConvMatchesDirectLoop) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  const int C = 2, H = 9, W = 7, O = 3, K = 3, S = 2, P = 1;
  std::vector<double> x(C * H * W), w(O * C * K * K), b(O);
  for (auto* v : {&x, &w, &b})
    for (auto& e : *v) e = u(rng);
  ParameterSet ps;
  Graph g(ps);
  const Var y = g.conv2d(g.constant(x, {C, H, W}), g.constant(w, {O, C, K, K}), g.constant(b), S, P);
  const int Ho = (H + 2 * P - K) / S + 1, Wo = (W + 2 * P - K) / S + 1;
  ASSERT_EQ(g.shape(y), (std::vector<int>{O, Ho, Wo}));
  const auto out = g.value(y);
  for (int o = 0; o < O; ++o)
    for (int r = 0; r < Ho; ++r)
      for (int q = 0; q < Wo; ++q) {
        double acc = b[o];
        for (int c = 0; c < C; ++c)
          for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j) {
              const int rr = r * S - P + i, cc = q * S - P + j;
              if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
              acc += w[((o * C + c) * K + i) * K + j] * x[(c * H + rr) * W + cc];
            }
        EXPECT_NEAR(out[(o * Ho + r) * Wo + q], acc, 1e-12);
      }
}

TEST(GraphValues, SoftmaxIsStableAndNormalized) {
  ParameterSet ps;
  Graph g(ps);
  const auto s = g.value(g.softmax(g.constant({1000.0, 1000.0, -1000.0})));
  EXPECT_NEAR(s[0], 0.5, 1e-12);
  EXPECT_NEAR(s[1], 0.5, 1e-12);
  EXPECT_NEAR(s[2], 0.0, 1e-12);
}

TEST(GraphValues, KlMatchesNumericalIntegration) {
  // KL(N(0.3, 0.5^2) || N(-0.2, 1.2^2)) by midpoint quadrature.
  const double mq = 0.3, sq = 0.5, mp = -0.2, sp = 1.2;
  auto logn = [](double x, double m, double s) {
    return -0.5 * std::log(2 * M_PI) - std::log(s) - 0.5 * (x - m) * (x - m) / (s * s);
  };
  double kl = 0.0;
  const double dx = 1e-4;
  for (double x = -8; x < 8; x += dx) {
    const double lq = logn(x + dx / 2, mq, sq);
    kl += std::exp(lq) * (lq - logn(x + dx / 2, mp, sp)) * dx;
  }
  ParameterSet ps;
  Graph g(ps);
  const Var v = g.kl_diag_gaussian(g.constant({mq}), g.constant({std::log(sq)}), g.constant({mp}),
                                   g.constant({std::log(sp)}));
  EXPECT_NEAR(g.scalar(v), kl, 1e-8);
  const Var same = g.kl_diag_gaussian(g.constant({mq}), g.constant({std::log(sq)}),
                                      g.constant({mq}), g.constant({std::log(sq)}));
  EXPECT_NEAR(g.scalar(same), 0.0, 1e-15);
}

TEST(GraphValues, GaussianLogProbMatchesFormula) {
  ParameterSet ps;
  Graph g(ps);
  const Var v = g.gaussian_log_prob(g.constant({1.0, -2.0}), g.constant({0.0, std::log(2.0)}),
                                    g.constant({1.5, 0.0}));
  const double expect = (-0.5 * std::log(2 * M_PI) - 0.125) +
                        (-0.5 * std::log(2 * M_PI) - std::log(2.0) - 0.5);
  EXPECT_NEAR(g.scalar(v), expect, 1e-14);
}

TEST(GraphValues, GruMatchesHandComputation) {
  ParameterSet ps;
  std::mt19937_64 rng(4);
  const auto cell = GruCell::create(ps, "gru", 2, 3, rng);
  const std::vector<double> x{0.4, -0.7}, h{0.1, 0.2, -0.3};
  Graph g(ps);
  const auto got = g.value(cell(g, g.constant(x), g.constant(h)));
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const auto& wi = ps[cell.w_ih].value;
  const auto& wh = ps[cell.w_hh].value;
  const auto& bi = ps[cell.b_ih].value;
  const auto& bh = ps[cell.b_hh].value;
  for (int j = 0; j < 3; ++j) {
    double a[3], c[3];
    for (int gate = 0; gate < 3; ++gate) {
      const int row = gate * 3 + j;
      a[gate] = bi[row];
      c[gate] = bh[row];
      for (int i = 0; i < 2; ++i) a[gate] += wi[row * 2 + i] * x[i];
      for (int i = 0; i < 3; ++i) c[gate] += wh[row * 3 + i] * h[i];
    }
    const double r = sig(a[0] + c[0]), u = sig(a[1] + c[1]);
    const double n = std::tanh(a[2] + r * c[2]);
    EXPECT_NEAR(got[j], n + u * (h[j] - n), 1e-14);
  }
}

TEST(Graph, ParamNodeIsSharedAndConstantWithoutSink) {
  ParameterSet ps;
  ps.add("a.w", {2});
  Graph g(ps);
  EXPECT_EQ(g.param(0).id, g.param(0).id);
  const Var loss = g.sum(g.param(0));
  g.backward(loss);
  EXPECT_TRUE(g.grad(g.param(0)).empty());
}

TEST(Graph, SizeMismatchThrows) {
  ParameterSet ps;
  Graph g(ps);
  EXPECT_THROW(g.add(g.zeros(2), g.zeros(3)), InvalidInput);
}

}  // namespace
}  // namespace contextvae::nn
