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

// Numeric inner loops of near-duplicate screening.
//
// Each kernel has a scalar reference in kernels::scalar and vector variants
// (AVX2 on x86-64, NEON on AArch64). The top-level functions dispatch to the
// best backend the CPU supports; VETDEID_SIMD=scalar|avx2|neon|auto in the
// environment overrides the choice at first use. All variants return
// bit-identical results: dot products are exact integers and the cosine uses
// only correctly rounded IEEE operations (mul, sqrt, div, min).

#ifndef VETDEID_KERNELS_HPP_
#define VETDEID_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace vetdeid::kernels {

// Sparse term-frequency vector: strictly increasing feature ids with
// positive counts, stored as parallel arrays.
struct SparseView {
  std::span<const std::uint32_t> ids;
  std::span<const std::uint32_t> counts;
};

struct BestMatch {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t index = kNone;
  double cosine = 0.0;
};

// cosine = dot / sqrt(query_norm_sq * norm_sq), 0 when the product is 0,
// clamped to at most 1.
inline double CosineFromDot(double dot, double query_norm_sq, double norm_sq) {
  const double p = query_norm_sq * norm_sq;
  if (p == 0.0) return 0.0;
  const double c = dot / __builtin_sqrt(p);
  return c < 1.0 ? c : 1.0;
}

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view BackendName(Backend b);
bool Supported(Backend b);
Backend ActiveBackend();
// Throws Error(kConfig) when the backend is not available on this CPU.
void SetBackend(Backend b);

std::uint64_t SparseDot(SparseView a, SparseView b);
// Highest cosine over candidates; ties resolve to the lowest index.
BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq);

namespace scalar {
std::uint64_t SparseDot(SparseView a, SparseView b);
BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq);
}  // namespace scalar

#if defined(VETDEID_HAVE_AVX2)
namespace avx2 {
std::uint64_t SparseDot(SparseView a, SparseView b);
BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq);
}  // namespace avx2
#endif

#if defined(VETDEID_HAVE_NEON)
namespace neon {
std::uint64_t SparseDot(SparseView a, SparseView b);
BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq);
}  // namespace neon
#endif

}  // namespace vetdeid::kernels

#endif  // VETDEID_KERNELS_HPP_
