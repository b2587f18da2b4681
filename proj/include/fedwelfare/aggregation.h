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

#ifndef FEDWELFARE_AGGREGATION_H_
#define FEDWELFARE_AGGREGATION_H_

#include <span>
#include <vector>

#include "fedwelfare/param_vector.h"

namespace fedwelfare {

enum class AggregationMode { kFedAvg, kFedBn };

// Weighted mean of every span. Weights must be non-negative and sum to 1
// within 1e-9; all models must share one layout.
ParamVector weighted_mean(std::span<const ParamVector> models,
                          std::span<const double> weights);

struct AggregationResult {
  // Weighted mean of all spans (local spans included, for reporting).
  ParamVector global;
  // Model dispatched back to each input client. Under FedBN the client's own
  // local spans are restored.
  std::vector<ParamVector> per_client;
};

AggregationResult aggregate(std::span<const ParamVector> models,
                            std::span<const double> weights,
                            AggregationMode mode);

// Sizes normalized to sum to one; uniform when every size is zero.
std::vector<double> size_weights(std::span<const double> sizes);

}  // namespace fedwelfare

#endif  // FEDWELFARE_AGGREGATION_H_
