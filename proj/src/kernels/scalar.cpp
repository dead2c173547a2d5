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

#include "vetdeid/kernels.hpp"

namespace vetdeid::kernels::scalar {

std::uint64_t SparseDot(SparseView a, SparseView b) {
  std::uint64_t dot = 0;
  std::size_t i = 0;
  std::size_t j = 0;
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

BestMatch BestCosine(std::span<const double> dots,
                     std::span<const double> norms_sq, double query_norm_sq) {
  BestMatch best;
  double best_value = -1.0;
  for (std::size_t i = 0; i < dots.size(); ++i) {
    const double c = CosineFromDot(dots[i], query_norm_sq, norms_sq[i]);
    if (c > best_value) {
      best_value = c;
      best.index = i;
    }
  }
  if (best.index != BestMatch::kNone) best.cosine = best_value;
  return best;
}

}  // namespace vetdeid::kernels::scalar
