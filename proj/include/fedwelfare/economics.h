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

#ifndef FEDWELFARE_ECONOMICS_H_
#define FEDWELFARE_ECONOMICS_H_

#include <span>
#include <vector>

#include "fedwelfare/common.h"

namespace fedwelfare {

// Money is measured in abstract units; with revenue_per_accuracy = 1 one unit
// equals one unit of accuracy.
struct ClientEconParams {
  double revenue_per_accuracy = 1.0;  // u_n
  double data_cost = 2e-4;            // per collected sample
  double train_cost = 0.0;            // per local SGD iteration
  double comm_cost = 0.0;             // per round
};

void validate(const ClientEconParams& params);

// u_n * (eps_t - eps_prev). Negative when accuracy drops.
double compute_utility(double revenue_per_accuracy, double eps_t,
                       double eps_prev);

double compute_cost(const ClientEconParams& params, long samples,
                    long iterations);

// Net profit of the active set, B(t).
double compute_budget(std::span<const double> profits);

struct Settlement {
  std::vector<double> payoff;
  std::vector<double> transfer;  // mt
  // Set when every clamped contribution was zero and B(t) was split evenly.
  bool equal_split = false;
};

// Redistributes B(t) = sum(profits) in proportion to max(q, 0) and returns
// each client's payoff and money transfer (payoff - profit). Transfers sum
// to zero up to rounding.
Settlement money_transfer(std::span<const double> profits,
                          std::span<const double> contributions);

// One client's economics for one round.
struct RoundEconRecord {
  ClientId client{};
  double utility = 0.0;
  double cost = 0.0;
  double profit = 0.0;
  double q = 0.0;
  double payoff = 0.0;
  double mt = 0.0;
  bool active = false;  // member of A(t) after this round's selection
};

}  // namespace fedwelfare

#endif  // FEDWELFARE_ECONOMICS_H_
