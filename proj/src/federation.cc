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

#include "fedwelfare/federation.h"

#include <cmath>

namespace fedwelfare {

int run_until_stable(int max_iterations, double delta,
                     const std::function<std::vector<double>(int)>& step) {
  if (max_iterations < 1) throw ConfigError("need at least one iteration");
  std::vector<double> previous;
  for (int l = 1; l <= max_iterations; ++l) {
    std::vector<double> current = step(l);
    if (l > 1) {
      if (current.size() != previous.size()) {
        throw StructuralError("accuracy vector changed size between iterations");
      }
      bool stable = true;
      for (std::size_t i = 0; i < current.size(); ++i) {
        stable = stable && std::abs(current[i] - previous[i]) < delta;
      }
      if (stable) return l;
    }
    previous = std::move(current);
  }
  return max_iterations;
}

double validation_accuracy(const ParamVector& model,
                           const LabeledDataset* validation) {
  if (validation == nullptr || validation->empty()) return 0.0;
  return evaluate_accuracy(model, *validation);
}

SharingRoundResult run_sharing_round(std::span<const ClientSite> clients,
                                     const SharingRoundOptions& options) {
  if (clients.empty()) throw ValidationError("sharing round without clients");
  const std::size_t n = clients.size();
  SharingRoundResult out;
  out.iterations.assign(n, 0);
  out.client_models.reserve(n);
  for (const ClientSite& c : clients) out.client_models.push_back(c.model);

  std::vector<double> sizes(n);
  for (std::size_t i = 0; i < n; ++i) {
    sizes[i] = static_cast<double>(clients[i].train->rows());
  }
  out.weights = size_weights(sizes);

  out.aggregation_iterations = run_until_stable(
      options.max_iterations, options.early_stop_delta, [&](int) {
        out.local_models.clear();
        for (std::size_t i = 0; i < n; ++i) {
          LocalUpdateResult r = local_update(
              out.client_models[i], *clients[i].train, options.trainer,
              *clients[i].rng);
          out.iterations[i] += r.iterations;
          out.local_models.push_back(std::move(r.model));
        }
        AggregationResult agg =
            aggregate(out.local_models, out.weights, options.mode);
        out.global = std::move(agg.global);
        out.client_models = std::move(agg.per_client);
        out.accuracy.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          out.accuracy[i] =
              validation_accuracy(out.client_models[i], clients[i].validation);
        }
        return out.accuracy;
      });
  return out;
}

double coalition_accuracy(const SharingRoundResult& round,
                          std::span<const ClientSite> sites,
                          std::span<const std::size_t> coalition,
                          AggregationMode mode) {
  if (coalition.empty()) throw ValidationError("empty coalition");
  std::vector<ParamVector> chosen;
  std::vector<double> sizes;
  for (std::size_t k : coalition) {
    chosen.push_back(round.local_models.at(k));
    sizes.push_back(static_cast<double>(sites[k].train->rows()));
  }
  const ParamVector merged = weighted_mean(chosen, size_weights(sizes));
  double total = 0.0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    ParamVector evaluated = merged;
    if (mode == AggregationMode::kFedBn) {
      copy_local_spans(round.client_models[k], evaluated);
    }
    total += validation_accuracy(evaluated, sites[k].validation);
  }
  return total / static_cast<double>(sites.size());
}

}  // namespace fedwelfare
