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

#if defined(__x86_64__)
#include <immintrin.h>

namespace contextvae::simd::detail {
namespace {

constexpr std::size_t kLanes = 8;
using Vec = __m512d;

inline Vec load(const double* p) { return _mm512_loadu_pd(p); }
inline void store(double* p, Vec v) { _mm512_storeu_pd(p, v); }
inline Vec splat(double x) { return _mm512_set1_pd(x); }
inline Vec fmadd(Vec a, Vec b, Vec c) { return _mm512_fmadd_pd(a, b, c); }
inline Vec zero() { return _mm512_setzero_pd(); }
inline double hsum(Vec v) { return _mm512_reduce_add_pd(v); }
inline Vec add(Vec a, Vec b) { return _mm512_add_pd(a, b); }

double dot(const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  Vec acc0 = zero(), acc1 = zero(), acc2 = zero(), acc3 = zero();
  for (; i + 4 * kLanes <= n; i += 4 * kLanes) {
    acc0 = fmadd(load(a + i), load(b + i), acc0);
    acc1 = fmadd(load(a + i + kLanes), load(b + i + kLanes), acc1);
    acc2 = fmadd(load(a + i + 2 * kLanes), load(b + i + 2 * kLanes), acc2);
    acc3 = fmadd(load(a + i + 3 * kLanes), load(b + i + 3 * kLanes), acc3);
  }
  for (; i + kLanes <= n; i += kLanes) acc0 = fmadd(load(a + i), load(b + i), acc0);
  double s = hsum(add(add(acc0, acc1), add(acc2, acc3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const Vec va = splat(alpha);
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    store(y + i, fmadd(va, load(x + i), load(y + i)));
    store(y + i + kLanes, fmadd(va, load(x + i + kLanes), load(y + i + kLanes)));
  }
  for (; i + kLanes <= n; i += kLanes) store(y + i, fmadd(va, load(x + i), load(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
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

// 4 x (2 * kLanes) register tile; remaining rows and columns fall back to
// axpy / scalar updates.
void gemm_nn(const double* a, const double* b, double* c, std::size_t m,
             std::size_t n, std::size_t k) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 2 * kLanes;
  std::size_t i = 0;
  for (; i + kRows <= m; i += kRows) {
    std::size_t j = 0;
    for (; j + kCols <= n; j += kCols) {
      Vec acc[kRows][2];
      for (std::size_t r = 0; r < kRows; ++r) {
        acc[r][0] = load(c + (i + r) * n + j);
        acc[r][1] = load(c + (i + r) * n + j + kLanes);
      }
      for (std::size_t p = 0; p < k; ++p) {
        const Vec b0 = load(b + p * n + j);
        const Vec b1 = load(b + p * n + j + kLanes);
        for (std::size_t r = 0; r < kRows; ++r) {
          const Vec av = splat(a[(i + r) * k + p]);
          acc[r][0] = fmadd(av, b0, acc[r][0]);
          acc[r][1] = fmadd(av, b1, acc[r][1]);
        }
      }
      for (std::size_t r = 0; r < kRows; ++r) {
        store(c + (i + r) * n + j, acc[r][0]);
        store(c + (i + r) * n + j + kLanes, acc[r][1]);
      }
    }
    if (j < n) {
      for (std::size_t r = 0; r < kRows; ++r)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = a[(i + r) * k + p];
          for (std::size_t jj = j; jj < n; ++jj) c[(i + r) * n + jj] += av * b[p * n + jj];
        }
    }
  }
  for (; i < m; ++i)
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

const KernelTable* avx512_table() {
  static const KernelTable table{Isa::kAvx512, dot,     axpy,    gemv,   gemv_t,
                                 ger,     gemm_nn, gemm_nt, gemm_tn};
  return &table;
}

}  // namespace contextvae::simd::detail

#else

namespace contextvae::simd::detail {
const KernelTable* avx512_table() { return nullptr; }
}  // namespace contextvae::simd::detail

#endif
