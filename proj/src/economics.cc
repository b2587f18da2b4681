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

#include "fedwelfare/economics.h"

#include <algorithm>

namespace fedwelfare {

void validate(const ClientEconParams& p) {
  if (!(p.revenue_per_accuracy >= 0.0 && p.data_cost >= 0.0 &&
        p.train_cost >= 0.0 && p.comm_cost >= 0.0)) {
    throw ConfigError("economic constants must be non-negative");
  }
}

double compute_utility(double revenue_per_accuracy, double eps_t,
                       double eps_prev) {
  if (!(eps_t >= 0.0 && eps_t <= 1.0 && eps_prev >= 0.0 && eps_prev <= 1.0)) {
    throw ValidationError("accuracy outside [0, 1]");
  }
  return revenue_per_accuracy * (eps_t - eps_prev);
}

double compute_cost(const ClientEconParams& p, long samples, long iterations) {
  if (samples < 0 || iterations < 0) {
    throw ValidationError("negative sample or iteration count");
  }
  return p.data_cost * static_cast<double>(samples) +
         p.train_cost * static_cast<double>(iterations) + p.comm_cost;
}

double compute_budget(std::span<const double> profits) {
  double budget = 0.0;
  for (double p : profits) budget += p;
  return budget;
}

Settlement money_transfer(std::span<const double> profits,
                          std::span<const double> contributions) {
  if (profits.size() != contributions.size()) {
    throw StructuralError("one contribution per profit required");
  }
  if (profits.empty()) throw ValidationError("money transfer needs a client");
  const double budget = compute_budget(profits);
  double total_q = 0.0;
  for (double q : contributions) total_q += std::max(q, 0.0);

  Settlement s;
  s.equal_split = !(total_q > 0.0);
  const auto n = profits.size();
  s.payoff.resize(n);
  s.transfer.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double share = s.equal_split
                             ? 1.0 / static_cast<double>(n)
                             : std::max(contributions[i], 0.0) / total_q;
    s.payoff[i] = share * budget;
    s.transfer[i] = s.payoff[i] - profits[i];
  }
  return s;
}

}  // namespace fedwelfare
