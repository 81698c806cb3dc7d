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

#include "contextvae/simd/kernels.hpp"

namespace contextvae::simd::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, const double* x, double* y, std::size_t rows,
          std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] += dot(w + r * cols, x, cols);
}

void gemv_t(const double* w, const double* y, double* x, std::size_t rows,
            std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(y[r], w + r * cols, x, cols);
}

void ger(const double* y, const double* x, double* w, std::size_t rows,
         std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy(y[r], x, w + r * cols, cols);
}

void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) axpy(a[i * k + p], b + p * n, c + i * n, n);
}

void gemm_nt(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k) {
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += dot(a + i * k, b + j * k, k);
}

void gemm_tn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k) {
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t i = 0; i < m; ++i) axpy(a[p * m + i], b + p * n, c + i * n, n);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, dot,     axpy,    gemv,   gemv_t,
                                 ger,          gemm_nn, gemm_nt, gemm_tn};
  return table;
}

}  // namespace contextvae::simd::detail
