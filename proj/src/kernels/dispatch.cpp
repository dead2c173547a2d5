// Copyright 2026 The vetdeid Authors.
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

#include <atomic>
#include <cstdlib>
#include <string>

#include "vetdeid/error.hpp"
#include "vetdeid/kernels.hpp"

namespace vetdeid::kernels {
namespace {

Backend Detect() {
#if defined(VETDEID_HAVE_NEON)
  return Backend::kNeon;
#elif defined(VETDEID_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2")) return Backend::kAvx2;
  return Backend::kScalar;
#else
  return Backend::kScalar;
#endif
}

Backend FromEnvironment() {
  const Backend detected = Detect();
  const char* env = std::getenv("VETDEID_SIMD");
  if (env == nullptr) return detected;
  const std::string want(env);
  if (want == "scalar") return Backend::kScalar;
  if (want == "avx2" && Supported(Backend::kAvx2)) return Backend::kAvx2;
  if (want == "neon" && Supported(Backend::kNeon)) return Backend::kNeon;
  return detected;
}

std::atomic<Backend>& Active() {
  static std::atomic<Backend> active{FromEnvironment()};
  return active;
}

}  // namespace

std::string_view BackendName(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "?";
}

bool Supported(Backend b) {
  switch (b) {
    case Backend::kScalar: return true;
    case Backend::kAvx2: return Detect() == Backend::kAvx2;
    case Backend::kNeon: return Detect() == Backend::kNeon;
  }
  return false;
}

Backend ActiveBackend() { return Active().load(std::memory_order_relaxed); }

void SetBackend(Backend b) {
  if (!Supported(b)) {
    throw Error(ErrorCode::kConfig, "SIMD backend '" +
                                        std::string(BackendName(b)) +
                                        "' not supported on this CPU");
  }
  Active().store(b, std::memory_order_relaxed);
}

std::uint64_t SparseDot(SparseView a, SparseView b) {
  switch (ActiveBackend()) {
#if defined(VETDEID_HAVE_AVX2)
    case Backend::kAvx2: return avx2::SparseDot(a, b);
#endif
#if defined(VETDEID_HAVE_NEON)
    case Backend::kNeon: return neon::SparseDot(a, b);
#endif
    default: return scalar::SparseDot(a, b);
  }
}

BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq) {
  switch (ActiveBackend()) {
#if defined(VETDEID_HAVE_AVX2)
    case Backend::kAvx2: return avx2::BestCosine(dots, norms_sq, query_norm_sq);
#endif
#if defined(VETDEID_HAVE_NEON)
    case Backend::kNeon: return neon::BestCosine(dots, norms_sq, query_norm_sq);
#endif
    default: return scalar::BestCosine(dots, norms_sq, query_norm_sq);
  }
}

}  // namespace vetdeid::kernels
