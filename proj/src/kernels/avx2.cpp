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

// Compiled with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include "vetdeid/kernels.hpp"

namespace vetdeid::kernels::avx2 {
namespace {

// Merge tail shared with the scalar reference.
std::uint64_t MergeTail(SparseView a, SparseView b, std::size_t i,
                        std::size_t j) {
  std::uint64_t dot = 0;
  while (i < a.ids.size() && j < b.ids.size()) {
    if (a.ids[i] < b.ids[j]) {
      ++i;
    } else if (b.ids[j] < a.ids[i]) {
      ++j;
    } else {
      dot += static_cast<std::uint64_t>(a.counts[i]) * b.counts[j];
      ++i;
      ++j;
    }
  }
  return dot;
}

inline __m256i Load(const std::uint32_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

}  // namespace

// Block intersection: each 8-id block of `a` is compared against all eight
// rotations of the current `b` block; matched count products are widened to
// 64 bits before accumulation. The block holding the smaller maximum id
// advances, so every matching pair meets exactly once.
std::uint64_t SparseDot(SparseView a, SparseView b) {
  const std::size_t na = a.ids.size();
  const std::size_t nb = b.ids.size();
  std::size_t i = 0;
  std::size_t j = 0;
  const __m256i rot1 = _mm256_setr_epi32(1, 2, 3, 4, 5, 6, 7, 0);
  __m256i acc = _mm256_setzero_si256();
  while (i + 8 <= na && j + 8 <= nb) {
    const __m256i va = Load(a.ids.data() + i);
    const __m256i ca = Load(a.counts.data() + i);
    const __m256i ca_odd = _mm256_srli_epi64(ca, 32);
    __m256i vb = Load(b.ids.data() + j);
    __m256i cb = Load(b.counts.data() + j);
    for (int r = 0; r < 8; ++r) {
      const __m256i eq = _mm256_cmpeq_epi32(va, vb);
      const __m256i m = _mm256_and_si256(eq, cb);
      acc = _mm256_add_epi64(acc, _mm256_mul_epu32(ca, m));
      acc = _mm256_add_epi64(
          acc, _mm256_mul_epu32(ca_odd, _mm256_srli_epi64(m, 32)));
      vb = _mm256_permutevar8x32_epi32(vb, rot1);
      cb = _mm256_permutevar8x32_epi32(cb, rot1);
    }
    const std::uint32_t amax = a.ids[i + 7];
    const std::uint32_t bmax = b.ids[j + 7];
    if (amax <= bmax) i += 8;
    if (bmax <= amax) j += 8;
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3] + MergeTail(a, b, i, j);
}

BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq) {
  const std::size_t n = dots.size();
  BestMatch best;
  if (n == 0) return best;

  double best_value = -1.0;
  std::size_t best_index = BestMatch::kNone;
  std::size_t i = 0;
  if (n >= 4) {
    const __m256d q = _mm256_set1_pd(query_norm_sq);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d four = _mm256_set1_pd(4.0);
    __m256d lane_best = _mm256_set1_pd(-1.0);
    __m256d lane_index = _mm256_set1_pd(-1.0);
    __m256d index = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    for (; i + 4 <= n; i += 4) {
      const __m256d d = _mm256_loadu_pd(dots.data() + i);
      const __m256d p = _mm256_mul_pd(q, _mm256_loadu_pd(norms_sq.data() + i));
      __m256d c = _mm256_div_pd(d, _mm256_sqrt_pd(p));
      c = _mm256_blendv_pd(c, zero, _mm256_cmp_pd(p, zero, _CMP_EQ_OQ));
      c = _mm256_min_pd(c, one);
      const __m256d gt = _mm256_cmp_pd(c, lane_best, _CMP_GT_OQ);
      lane_best = _mm256_blendv_pd(lane_best, c, gt);
      lane_index = _mm256_blendv_pd(lane_index, index, gt);
      index = _mm256_add_pd(index, four);
    }
    alignas(32) double values[4];
    alignas(32) double indices[4];
    _mm256_store_pd(values, lane_best);
    _mm256_store_pd(indices, lane_index);
    for (int l = 0; l < 4; ++l) {
      const auto idx = static_cast<std::size_t>(indices[l]);
      if (values[l] > best_value ||
          (values[l] == best_value && idx < best_index)) {
        best_value = values[l];
        best_index = idx;
      }
    }
  }
  for (; i < n; ++i) {
    const double c = CosineFromDot(dots[i], query_norm_sq, norms_sq[i]);
    if (c > best_value) {
      best_value = c;
      best_index = i;
    }
  }
  best.index = best_index;
  best.cosine = best_value;
  return best;
}

}  // namespace vetdeid::kernels::avx2
