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

#ifndef FEDWELFARE_CONTRIBUTION_H_
#define FEDWELFARE_CONTRIBUTION_H_

#include <functional>
#include <span>
#include <vector>

#include "fedwelfare/common.h"

namespace fedwelfare {

// Collective utility v(S) of a coalition. Coalitions are passed as client
// ids in ascending order; v of the empty coalition is defined as 0 and is
// never requested from the callback.
using CollectiveUtility = std::function<double(std::span<const ClientId>)>;

enum class ContributionKind { kQuantitative, kMarginal, kShapleyExact, kShapleyMc };

struct ContributionMethod {
  ContributionKind kind = ContributionKind::kMarginal;
  int mc_permutations = 1000;  // kShapleyMc only
};

// Exact Shapley values are computed for at most this many clients.
inline constexpr std::size_t kMaxShapleyClients = 20;

// q = s(n, t).
std::vector<double> quantitative_contributions(std::span<const long> samples);

// v(active) - v(active \ {n}) for one client.
double marginal_contribution(ClientId n, const CollectiveUtility& v,
                             std::span<const ClientId> active);

// Marginal contribution of every active client using N + 1 evaluations.
std::vector<double> marginal_contributions(const CollectiveUtility& v,
                                           std::span<const ClientId> active);

// Exact Shapley values; evaluates v once per subset of `active` (2^N).
// Throws ConfigError above kMaxShapleyClients.
std::vector<double> shapley_exact(const CollectiveUtility& v,
                                  std::span<const ClientId> active);

// Average marginal contribution over the given orderings. Each ordering is a
// permutation of positions 0..N-1 into `active`.
std::vector<double> shapley_over_orderings(
    const CollectiveUtility& v, std::span<const ClientId> active,
    std::span<const std::vector<int>> orderings);

// Permutation-sampling estimate of the Shapley values.
std::vector<double> shapley_mc(const CollectiveUtility& v,
                               std::span<const ClientId> active,
                               int permutations, Rng& rng);

// Dispatches on `method`. `samples` is only read for kQuantitative and `rng`
// only for kShapleyMc.
std::vector<double> contributions(const ContributionMethod& method,
                                  const CollectiveUtility& v,
                                  std::span<const ClientId> active,
                                  std::span<const long> samples, Rng& rng);

}  // namespace fedwelfare

#endif  // FEDWELFARE_CONTRIBUTION_H_
