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

#ifndef FEDWELFARE_TOY_EXAMPLE_H_
#define FEDWELFARE_TOY_EXAMPLE_H_

#include <optional>
#include <span>
#include <vector>

#include "fedwelfare/config.h"

namespace fedwelfare {

// Three clients C1..C3 over two rounds with fixed utilities, costs and
// contributions. Everyone profits in round 1; C1 and C2 lose in round 2.
ScenarioConfig toy_example_config(double mu = 0.1);

// Outcome of one admissible elimination set for the round described by
// `inputs`, with metrics evaluated over `history` plus that round.
struct EliminationScenario {
  std::vector<ClientId> eliminated;
  double objective = 0.0;
  double tsw = 0.0;
  std::optional<double> tsfi;
};

// Every subset of the loss-making clients, in bitmask order over the
// candidates (so the empty set comes first).
std::vector<EliminationScenario> explore_eliminations(
    std::span<const RoundLedger> history,
    std::span<const ClientRoundInputs> inputs, double mu,
    TsfiSemantics semantics);

}  // namespace fedwelfare

#endif  // FEDWELFARE_TOY_EXAMPLE_H_
