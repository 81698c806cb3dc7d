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

#include <cstdlib>
#include <string>

#include "contextvae/simd/kernels.hpp"

namespace contextvae::simd {
namespace {

bool cpu_has(Isa isa) {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    case Isa::kAvx512:
      return __builtin_cpu_supports("avx512f");
  }
  return false;
#else
  return isa == Isa::kScalar;
#endif
}

int rank(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return 0;
    case Isa::kAvx2:
      return 1;
    case Isa::kAvx512:
      return 2;
  }
  return 0;
}

const KernelTable& select() {
  int cap = rank(Isa::kAvx512);
  if (const char* env = std::getenv("CONTEXTVAE_ISA")) {
    const std::string v(env);
    if (v == "scalar") cap = rank(Isa::kScalar);
    if (v == "avx2") cap = rank(Isa::kAvx2);
  }
  for (Isa isa : {Isa::kAvx512, Isa::kAvx2}) {
    if (rank(isa) > cap) continue;
    if (const KernelTable* t = kernels_for(isa)) return *t;
  }
  return detail::scalar_table();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kAvx512:
      return "avx512";
  }
  return "unknown";
}

const KernelTable* kernels_for(Isa isa) {
  if (!cpu_has(isa)) return nullptr;
  switch (isa) {
    case Isa::kScalar:
      return &detail::scalar_table();
    case Isa::kAvx2:
      return detail::avx2_table();
    case Isa::kAvx512:
      return detail::avx512_table();
  }
  return nullptr;
}

const KernelTable& kernels() {
  static const KernelTable& table = select();
  return table;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::kScalar, Isa::kAvx2, Isa::kAvx512})
    if (kernels_for(isa) != nullptr) out.push_back(isa);
  return out;
}

}  // namespace contextvae::simd
