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

#ifndef FEDWELFARE_SELECTION_H_
#define FEDWELFARE_SELECTION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fedwelfare/common.h"
#include "fedwelfare/economics.h"

namespace fedwelfare {

// Powerset search is limited to this many loss-making candidates.
inline constexpr std::size_t kMaxEliminationCandidates = 20;

// How A(t) is chosen from A(t-1).
enum class SelectionPolicy {
  kObjective,     // maximize welfare - mu * selection-fairness penalty
  kLeastLenient,  // keep exactly the clients with profit >= 0
  kMostLenient,   // never eliminate
};

// Per-client round inputs for the members of A(t-1), ascending by id.
struct ClientRoundInputs {
  ClientId client{};
  double utility = 0.0;
  double cost = 0.0;
  double q = 0.0;

  double profit() const { return utility - cost; }
};

struct SelectionDecision {
  std::vector<ClientId> retained;    // A(t)
  std::vector<ClientId> eliminated;  // A(t-1) \ A(t)
  double objective = 0.0;
  int candidates_considered = 0;
};

// Clients with utility < cost. Zero-profit clients are not candidates.
std::vector<ClientId> candidate_eliminations(
    std::span<const ClientRoundInputs> inputs);

// Bit i of an elimination mask refers to inputs[i].
using EliminationMask = std::uint64_t;

// sum of retained profits - mu * sum(q eliminated) / sum(q retained).
// The penalty is applied once. It is 0 when nothing is eliminated or mu is
// 0, and +infinity when the retained q sum is not positive. An empty
// retained set is only defined for mu == 0 (objective 0); otherwise this
// throws ValidationError.
double selection_objective(std::span<const ClientRoundInputs> inputs,
                           EliminationMask eliminated, double mu);

// Exhaustive search over subsets of candidate_eliminations(). Ties go to
// fewer eliminations, then to the lexicographically smallest id list.
SelectionDecision select_active_set(std::span<const ClientRoundInputs> inputs,
                                    double mu);

// Independent coding of the mu = 0 heuristic: retain profit >= 0.
SelectionDecision least_lenient_selection(
    std::span<const ClientRoundInputs> inputs);

SelectionDecision most_lenient_selection(
    std::span<const ClientRoundInputs> inputs);

struct RoundSettlement {
  SelectionDecision decision;
  std::vector<RoundEconRecord> records;  // one per member of A(t-1)
  double budget = 0.0;                   // B(t) over the retained set
  bool equal_split = false;
};

// Selects A(t) and settles money transfers among the retained clients.
// Eliminated clients keep their own profit as payoff with mt = 0.
RoundSettlement selection_round(std::span<const ClientRoundInputs> inputs,
                                double mu, SelectionPolicy policy);

// Settles a decision that was made elsewhere.
RoundSettlement settle(std::span<const ClientRoundInputs> inputs,
                       SelectionDecision decision);

}  // namespace fedwelfare

#endif  // FEDWELFARE_SELECTION_H_
