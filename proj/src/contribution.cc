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

#include "fedwelfare/contribution.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>

namespace fedwelfare {
namespace {

void check_active(std::span<const ClientId> active, std::size_t limit) {
  if (active.size() > limit) {
    throw ConfigError("coalition of " + std::to_string(active.size()) +
                      " clients exceeds the limit of " + std::to_string(limit));
  }
  for (std::size_t i = 1; i < active.size(); ++i) {
    if (!(to_int(active[i - 1]) < to_int(active[i]))) {
      throw ValidationError("active clients must be unique and ascending");
    }
  }
}

// Memoized v over coalitions encoded as bitmasks of positions in `active`.
class MaskedUtility {
 public:
  MaskedUtility(const CollectiveUtility& v, std::span<const ClientId> active)
      : v_(v), active_(active) {}

  double operator()(std::uint64_t mask) {
    if (mask == 0) return 0.0;
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    members_.clear();
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (mask & (std::uint64_t{1} << i)) members_.push_back(active_[i]);
    }
    const double value = v_(members_);
    memo_.emplace(mask, value);
    return value;
  }

 private:
  const CollectiveUtility& v_;
  std::span<const ClientId> active_;
  std::unordered_map<std::uint64_t, double> memo_;
  std::vector<ClientId> members_;
};

}  // namespace

std::vector<double> quantitative_contributions(std::span<const long> samples) {
  std::vector<double> q;
  q.reserve(samples.size());
  for (long s : samples) {
    if (s < 0) throw ValidationError("negative sample count");
    q.push_back(static_cast<double>(s));
  }
  return q;
}

double marginal_contribution(ClientId n, const CollectiveUtility& v,
                             std::span<const ClientId> active) {
  check_active(active, 64);
  auto pos = std::find(active.begin(), active.end(), n);
  if (pos == active.end()) throw ValidationError("client is not active");
  std::vector<ClientId> without;
  without.reserve(active.size());
  for (ClientId c : active) {
    if (c != n) without.push_back(c);
  }
  const double with_value = v(active);
  return with_value - (without.empty() ? 0.0 : v(without));
}

std::vector<double> marginal_contributions(const CollectiveUtility& v,
                                           std::span<const ClientId> active) {
  check_active(active, 64);
  if (active.empty()) return {};
  const double full = v(active);
  std::vector<double> q;
  q.reserve(active.size());
  std::vector<ClientId> without;
  for (ClientId n : active) {
    without.clear();
    for (ClientId c : active) {
      if (c != n) without.push_back(c);
    }
    q.push_back(full - (without.empty() ? 0.0 : v(without)));
  }
  return q;
}

std::vector<double> shapley_exact(const CollectiveUtility& v,
                                  std::span<const ClientId> active) {
  check_active(active, kMaxShapleyClients);
  const std::size_t n = active.size();
  if (n == 0) return {};
  const std::uint64_t subsets = std::uint64_t{1} << n;
  std::vector<double> value(subsets, 0.0);
  std::vector<ClientId> members;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    members.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t{1} << i)) members.push_back(active[i]);
    }
    value[mask] = v(members);
  }

  // weight[k] = k! (n-k-1)! / n! = 1 / (n * C(n-1, k))
  std::vector<double> weight(n);
  double binom = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    weight[k] = 1.0 / (static_cast<double>(n) * binom);
    binom = binom * static_cast<double>(n - 1 - k) / static_cast<double>(k + 1);
  }

  std::vector<double> q(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(mask));
      q[i] += weight[size] * (value[mask | bit] - value[mask]);
    }
  }
  return q;
}

std::vector<double> shapley_over_orderings(
    const CollectiveUtility& v, std::span<const ClientId> active,
    std::span<const std::vector<int>> orderings) {
  check_active(active, 64);
  const std::size_t n = active.size();
  std::vector<double> q(n, 0.0);
  if (orderings.empty()) return q;
  MaskedUtility masked(v, active);
  for (const std::vector<int>& order : orderings) {
    if (order.size() != n) throw StructuralError("ordering has wrong length");
    std::uint64_t mask = 0;
    double previous = 0.0;
    for (int pos : order) {
      if (pos < 0 || static_cast<std::size_t>(pos) >= n ||
          (mask & (std::uint64_t{1} << pos))) {
        throw StructuralError("ordering is not a permutation");
      }
      const std::uint64_t bit = std::uint64_t{1} << pos;
      mask |= bit;
      const double current = masked(mask);
      q[static_cast<std::size_t>(pos)] += current - previous;
      previous = current;
    }
  }
  for (double& x : q) x /= static_cast<double>(orderings.size());
  return q;
}

std::vector<double> shapley_mc(const CollectiveUtility& v,
                               std::span<const ClientId> active,
                               int permutations, Rng& rng) {
  if (permutations < 1) throw ConfigError("need at least one permutation");
  std::vector<std::vector<int>> orderings(static_cast<std::size_t>(permutations));
  std::vector<int> order(active.size());
  std::iota(order.begin(), order.end(), 0);
  for (auto& o : orderings) {
    std::shuffle(order.begin(), order.end(), rng);
    o = order;
  }
  return shapley_over_orderings(v, active, orderings);
}

std::vector<double> contributions(const ContributionMethod& method,
                                  const CollectiveUtility& v,
                                  std::span<const ClientId> active,
                                  std::span<const long> samples, Rng& rng) {
  switch (method.kind) {
    case ContributionKind::kQuantitative:
      if (samples.size() != active.size()) {
        throw StructuralError("one sample count per active client required");
      }
      return quantitative_contributions(samples);
    case ContributionKind::kMarginal:
      return marginal_contributions(v, active);
    case ContributionKind::kShapleyExact:
      return shapley_exact(v, active);
    case ContributionKind::kShapleyMc:
      return shapley_mc(v, active, method.mc_permutations, rng);
  }
  throw ConfigError("unknown contribution method");
}

}  // namespace fedwelfare
