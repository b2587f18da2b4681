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

#include "fedwelfare/toy_example.h"

#include <algorithm>
#include <utility>

namespace fedwelfare {

ScenarioConfig toy_example_config(double mu) {
  ScenarioConfig c;
  c.name = "toy-example";
  for (int id = 1; id <= 3; ++id) {
    ClientConfig cc;
    cc.id = client(id);
    c.clients.push_back(cc);
  }
  c.federation.rounds = 2;
  c.federation.backend = Backend::kInjected;
  c.mechanism.mu = mu;
  c.run.replications = 1;
  c.run.output_dir = "out/toy-example";
  c.injected_rounds = {
      {{client(1), 0.2, 0.1, 0.4},
       {client(2), 0.15, 0.1, 0.2},
       {client(3), 0.3, 0.05, 0.4}},
      {{client(1), 0.1, 0.15, 0.5},
       {client(2), 0.1, 0.15, 0.1},
       {client(3), 0.3, 0.15, 0.4}},
  };
  validate(c);
  return c;
}

std::vector<EliminationScenario> explore_eliminations(
    std::span<const RoundLedger> history,
    std::span<const ClientRoundInputs> inputs, double mu,
    TsfiSemantics semantics) {
  const std::vector<ClientId> candidates = candidate_eliminations(inputs);
  if (candidates.size() > kMaxEliminationCandidates) {
    throw ValidationError("too many loss-making clients to enumerate");
  }
  const int round = history.empty() ? 1 : history.back().round + 1;
  std::vector<EliminationScenario> out;
  for (EliminationMask subset = 0; subset < (EliminationMask{1} << candidates.size());
       ++subset) {
    SelectionDecision decision;
    EliminationMask mask = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const auto it = std::find(candidates.begin(), candidates.end(), inputs[i].client);
      const bool gone =
          it != candidates.end() && (subset >> (it - candidates.begin())) & 1U;
      if (gone) {
        mask |= EliminationMask{1} << i;
        decision.eliminated.push_back(inputs[i].client);
      } else {
        decision.retained.push_back(inputs[i].client);
      }
    }
    if (decision.retained.empty() && mu != 0.0) continue;
    decision.objective = selection_objective(inputs, mask, mu);

    std::vector<RoundLedger> ledger(history.begin(), history.end());
    EliminationScenario s;
    s.eliminated = decision.eliminated;
    s.objective = decision.objective;
    ledger.push_back({round, settle(inputs, std::move(decision)).records});
    s.tsw = total_social_welfare(ledger, round);
    s.tsfi = total_selection_fairness(ledger, round, semantics);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fedwelfare
