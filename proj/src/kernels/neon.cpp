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

// AArch64 variants. NEON is architecturally mandatory on AArch64, so these
// are selected unconditionally there.

#include <arm_neon.h>

#include "vetdeid/kernels.hpp"

namespace vetdeid::kernels::neon {
namespace {

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

inline uint64x2_t Accumulate(uint64x2_t acc, uint32x4_t va, uint32x4_t ca,
                             uint32x4_t vb, uint32x4_t cb) {
  const uint32x4_t m = vandq_u32(vceqq_u32(va, vb), cb);
  acc = vaddq_u64(acc, vmull_u32(vget_low_u32(ca), vget_low_u32(m)));
  return vaddq_u64(acc, vmull_high_u32(ca, m));
}

}  // namespace

// 4-wide block intersection; see the AVX2 variant for the advance rule.
std::uint64_t SparseDot(SparseView a, SparseView b) {
  const std::size_t na = a.ids.size();
  const std::size_t nb = b.ids.size();
  std::size_t i = 0;
  std::size_t j = 0;
  uint64x2_t acc = vdupq_n_u64(0);
  while (i + 4 <= na && j + 4 <= nb) {
    const uint32x4_t va = vld1q_u32(a.ids.data() + i);
    const uint32x4_t ca = vld1q_u32(a.counts.data() + i);
    const uint32x4_t vb = vld1q_u32(b.ids.data() + j);
    const uint32x4_t cb = vld1q_u32(b.counts.data() + j);
    acc = Accumulate(acc, va, ca, vb, cb);
    acc = Accumulate(acc, va, ca, vextq_u32(vb, vb, 1), vextq_u32(cb, cb, 1));
    acc = Accumulate(acc, va, ca, vextq_u32(vb, vb, 2), vextq_u32(cb, cb, 2));
    acc = Accumulate(acc, va, ca, vextq_u32(vb, vb, 3), vextq_u32(cb, cb, 3));
    const std::uint32_t amax = a.ids[i + 3];
    const std::uint32_t bmax = b.ids[j + 3];
    if (amax <= bmax) i += 4;
    if (bmax <= amax) j += 4;
  }
  return vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1) +
         MergeTail(a, b, i, j);
}

BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq) {
  const std::size_t n = dots.size();
  BestMatch best;
  if (n == 0) return best;

  double best_value = -1.0;
  std::size_t best_index = BestMatch::kNone;
  std::size_t i = 0;
  if (n >= 2) {
    const float64x2_t q = vdupq_n_f64(query_norm_sq);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t two = vdupq_n_f64(2.0);
    float64x2_t lane_best = vdupq_n_f64(-1.0);
    float64x2_t lane_index = vdupq_n_f64(-1.0);
    const double start[2] = {0.0, 1.0};
    float64x2_t index = vld1q_f64(start);
    for (; i + 2 <= n; i += 2) {
      const float64x2_t d = vld1q_f64(dots.data() + i);
      const float64x2_t p = vmulq_f64(q, vld1q_f64(norms_sq.data() + i));
      float64x2_t c = vdivq_f64(d, vsqrtq_f64(p));
      c = vbslq_f64(vceqq_f64(p, zero), zero, c);
      c = vminq_f64(c, one);
      const uint64x2_t gt = vcgtq_f64(c, lane_best);
      lane_best = vbslq_f64(gt, c, lane_best);
      lane_index = vbslq_f64(gt, index, lane_index);
      index = vaddq_f64(index, two);
    }
    double values[2];
    double indices[2];
    vst1q_f64(values, lane_best);
    vst1q_f64(indices, lane_index);
    for (int l = 0; l < 2; ++l) {
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

}  // namespace vetdeid::kernels::neon
