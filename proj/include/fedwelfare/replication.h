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

#ifndef FEDWELFARE_REPLICATION_H_
#define FEDWELFARE_REPLICATION_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fedwelfare/config.h"
#include "fedwelfare/data.h"
#include "fedwelfare/metrics.h"

namespace fedwelfare {

// Read-only material shared by every replication of a scenario: the
// synthetic task and per-client distortions (drawn once from the base seed,
// so client identities are stable across replications) and any IDX pools.
struct ScenarioContext {
  std::size_t features = 0;
  int classes = 0;
  SyntheticTask task;
  std::vector<SyntheticClient> synthetic;  // aligned with config.clients
  std::vector<std::shared_ptr<const LabeledDataset>> pools;  // idx clients
};

ScenarioContext prepare_scenario(const ScenarioConfig& config);

struct SelectionTraceRow {
  int round = 0;
  int candidates_considered = 0;
  std::vector<ClientId> eliminated;
  double objective = 0.0;
};

struct ReplicationResult {
  int replication = 0;
  std::vector<ClientId> clients;
  // Round in which each client left A(t); rounds + 1 when it never did.
  std::vector<int> elimination_round;
  std::vector<RoundLedger> ledger;
  std::vector<SelectionTraceRow> trace;
  MetricsSeries metrics;
  // Validation accuracy per round for the members of A(t-1), in ledger
  // order. Empty for the injected backend.
  std::vector<std::vector<double>> accuracy;
  std::optional<std::string> error;
};

// Runs rounds 1..T, stopping early once at most one client remains.
// Randomness comes from one stream seeded by replication_seed(base_seed,
// index) and is consumed per round in a fixed order: arrivals, data
// generation, accuracy noise or trainer seeds, then Monte-Carlo Shapley.
// Errors after validation are caught and reported in `error`.
ReplicationResult run_replication(const ScenarioConfig& config,
                                  const ScenarioContext& context, int index);

}  // namespace fedwelfare

#endif  // FEDWELFARE_REPLICATION_H_
