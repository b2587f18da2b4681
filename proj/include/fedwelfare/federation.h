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

#ifndef FEDWELFARE_FEDERATION_H_
#define FEDWELFARE_FEDERATION_H_

#include <functional>
#include <span>
#include <vector>

#include "fedwelfare/aggregation.h"
#include "fedwelfare/common.h"
#include "fedwelfare/dataset.h"
#include "fedwelfare/model.h"
#include "fedwelfare/param_vector.h"

namespace fedwelfare {

// Runs `step(iteration)` (1-based) up to `max_iterations` times. Each step
// returns per-client validation accuracies. Stops after an iteration in
// which every accuracy moved by less than `delta` since the previous one;
// the first iteration never stops. Returns the number of iterations run.
int run_until_stable(int max_iterations, double delta,
                     const std::function<std::vector<double>(int)>& step);

// One client's view of a data sharing round.
struct ClientSite {
  ClientId id{};
  const LabeledDataset* train = nullptr;
  const LabeledDataset* validation = nullptr;
  // Model the client starts the round from. Under FedBN its local spans are
  // the client's own normalization statistics.
  ParamVector model;
  Rng* rng = nullptr;
};

struct SharingRoundOptions {
  int max_iterations = 5;
  double early_stop_delta = 0.01;
  AggregationMode mode = AggregationMode::kFedAvg;
  TrainerConfig trainer;
};

struct SharingRoundResult {
  ParamVector global;
  std::vector<ParamVector> client_models;  // dispatched after the last iteration
  std::vector<ParamVector> local_models;   // last local updates, pre-aggregation
  std::vector<double> weights;             // aggregation weights used last
  std::vector<double> accuracy;            // per-client validation accuracy
  std::vector<long> iterations;            // SGD steps summed over the round
  int aggregation_iterations = 0;
};

// Validation accuracy, or 0 when the client holds no validation data.
double validation_accuracy(const ParamVector& model,
                           const LabeledDataset* validation);

// Repeats {local update, aggregate, evaluate} with early stopping.
// Aggregation weights are proportional to current training-set sizes.
SharingRoundResult run_sharing_round(std::span<const ClientSite> clients,
                                     const SharingRoundOptions& options);

// Collective utility of a coalition after a round: the train-size weighted
// mean of the coalition's last local models, scored on every site's
// validation set and averaged. Under FedBN each site scores it with its own
// local spans. `coalition` holds positions into `sites`.
double coalition_accuracy(const SharingRoundResult& round,
                          std::span<const ClientSite> sites,
                          std::span<const std::size_t> coalition,
                          AggregationMode mode);

}  // namespace fedwelfare

#endif  // FEDWELFARE_FEDERATION_H_
