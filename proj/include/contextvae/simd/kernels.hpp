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
#include <string_view>
#include <vector>

// Dense double-precision kernels used by the autodiff graph and the map
// encoder. Every instruction set provides the same table; the reference
// scalar table defines the semantics and the vector tables must agree with it
// up to floating-point reassociation.

namespace contextvae::simd {

enum class Isa { kScalar, kAvx2, kAvx512 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[r] += sum_c w[r, c] * x[c], w row-major rows x cols
  void (*gemv)(const double* w, const double* x, double* y, std::size_t rows,
               std::size_t cols);
  // x[c] += sum_r w[r, c] * y[r]
  void (*gemv_t)(const double* w, const double* y, double* x, std::size_t rows,
                 std::size_t cols);
  // w[r, c] += y[r] * x[c]
  void (*ger)(const double* y, const double* x, double* w, std::size_t rows,
              std::size_t cols);
  // c[m x n] += a[m x k] * b[k x n]
  void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k);
  // c[m x n] += a[m x k] * b[n x k]^T
  void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k);
  // c[m x n] += a[k x m]^T * b[k x n]
  void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t n, std::size_t k);
};

// Table for the best instruction set the CPU supports, chosen once. The
// CONTEXTVAE_ISA environment variable ("scalar", "avx2", "avx512") caps the
// choice.
const KernelTable& kernels();

// nullptr when the CPU or the build lacks the instruction set.
const KernelTable* kernels_for(Isa isa);

std::vector<Isa> available_isas();

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();
const KernelTable* avx512_table();
}  // namespace detail

}  // namespace contextvae::simd
