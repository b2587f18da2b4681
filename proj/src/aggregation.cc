// Copyright 2026 The fedwelfare Authors
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

#include "fedwelfare/aggregation.h"

#include <algorithm>
#include <cmath>

#include "fedwelfare/common.h"

namespace fedwelfare {

ParamVector weighted_mean(std::span<const ParamVector> models,
                          std::span<const double> weights) {
  if (models.empty()) throw ValidationError("nothing to aggregate");
  if (weights.size() != models.size()) {
    throw StructuralError("one weight per model required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("aggregation weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("aggregation weights must sum to 1");
  }
  for (const ParamVector& m : models) {
    if (!(m.layout() == models[0].layout())) {
      throw StructuralError("models have different layouts");
    }
  }

  // Accumulating offsets from the first model keeps identical inputs
  // bit-identical in the output.
  ParamVector out = models[0];
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double base = models[0][i];
    double delta = 0.0;
    double lo = base, hi = base;
    for (std::size_t k = 1; k < models.size(); ++k) {
      const double v = models[k][i];
      delta += weights[k] * (v - base);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    dst[i] = std::clamp(base + delta, lo, hi);
  }
  return out;
}

AggregationResult aggregate(std::span<const ParamVector> models,
                            std::span<const double> weights,
                            AggregationMode mode) {
  AggregationResult result{weighted_mean(models, weights), {}};
  result.per_client.reserve(models.size());
  for (const ParamVector& own : models) {
    result.per_client.push_back(result.global);
    if (mode == AggregationMode::kFedBn) {
      copy_local_spans(own, result.per_client.back());
    }
  }
  return result;
}

std::vector<double> size_weights(std::span<const double> sizes) {
  double total = 0.0;
  for (double s : sizes) total += s;
  std::vector<double> w(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    w[i] = total > 0.0 ? sizes[i] / total
                       : 1.0 / static_cast<double>(sizes.size());
  }
  return w;
}

}  // namespace fedwelfare
