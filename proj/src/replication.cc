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

#include "fedwelfare/replication.h"

#include <algorithm>
#include <cmath>
#include <exception>

#include "fedwelfare/federation.h"
#include "fedwelfare/idx.h"
#include "fedwelfare/model.h"

namespace fedwelfare {
namespace {

constexpr std::uint64_t kScenarioStreamSalt = 0x5CE4A810D47A5EEDULL;

// What one round produced for the members of A(t-1), in id order.
struct RoundObservation {
  std::vector<long> samples;
  std::vector<long> iterations;
  std::vector<double> eps;
  std::vector<double> eps_prev;
  std::vector<double> q;
};

class Replication {
 public:
  Replication(const ScenarioConfig& config, const ScenarioContext& context,
              int index)
      : config_(config),
        context_(context),
        rng_(replication_seed(config.run.base_seed,
                              static_cast<std::uint64_t>(index))) {
    const std::size_t n = config.clients.size();
    result_.replication = index;
    result_.elimination_round.assign(n, config.federation.rounds + 1);
    for (const ClientConfig& c : config.clients) result_.clients.push_back(c.id);
    active_.assign(n, true);
    eps_prev_.assign(n, 0.0);
    train_rows_.assign(n, 0);
    if (config.federation.backend == Backend::kTrainer) {
      global_ = init_classifier(context.features, context.classes, rng_);
      for (std::size_t i = 0; i < n; ++i) {
        train_.emplace_back(context.features, context.classes);
        validation_.emplace_back(context.features, context.classes);
        models_.push_back(global_);
      }
    }
  }

  ReplicationResult run() {
    try {
      int rounds = config_.federation.rounds;
      if (config_.federation.backend == Backend::kInjected) {
        rounds = std::min<int>(rounds,
                               static_cast<int>(config_.injected_rounds.size()));
      }
      for (int t = 1; t <= rounds; ++t) {
        if (!play_round(t)) break;
      }
    } catch (const std::exception& e) {
      result_.error = e.what();
    }
    result_.metrics = compute_metrics(result_.ledger, config_.mechanism.tsfi);
    return std::move(result_);
  }

 private:
  std::vector<std::size_t> active_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (active_[i]) out.push_back(i);
    }
    return out;
  }

  // Returns false when the federation terminates after this round.
  bool play_round(int t) {
    const std::vector<std::size_t> members = active_positions();
    std::vector<ClientRoundInputs> inputs;
    switch (config_.federation.backend) {
      case Backend::kTrainer:
        inputs = economics(members, trainer_round(t, members));
        break;
      case Backend::kOracle:
        inputs = economics(members, oracle_round(t, members));
        break;
      case Backend::kInjected:
        inputs = injected_round(t, members);
        break;
    }

    RoundSettlement settled =
        selection_round(inputs, config_.mechanism.mu, config_.mechanism.policy);
    result_.ledger.push_back({t, settled.records});
    result_.trace.push_back({t, settled.decision.candidates_considered,
                             settled.decision.eliminated,
                             settled.decision.objective});
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (!settled.records[k].active) {
        active_[members[k]] = false;
        result_.elimination_round[members[k]] = t;
      }
    }
    return settled.decision.retained.size() > 1;
  }

  std::vector<ClientRoundInputs> economics(
      const std::vector<std::size_t>& members, const RoundObservation& obs) {
    std::vector<ClientRoundInputs> inputs;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const ClientConfig& cc = config_.clients[members[k]];
      ClientRoundInputs in;
      in.client = cc.id;
      in.utility = compute_utility(cc.econ.revenue_per_accuracy, obs.eps[k],
                                   obs.eps_prev[k]);
      in.cost = compute_cost(cc.econ, obs.samples[k], obs.iterations[k]);
      in.q = obs.q[k];
      inputs.push_back(in);
      eps_prev_[members[k]] = obs.eps[k];
    }
    result_.accuracy.push_back(obs.eps);
    return inputs;
  }

  std::vector<long> draw_arrivals(const std::vector<std::size_t>& members) {
    std::vector<long> s;
    for (std::size_t i : members) {
      s.push_back(sample_arrivals(config_.clients[i].lambda, rng_));
    }
    return s;
  }

  RoundObservation trainer_round(int t, const std::vector<std::size_t>& members) {
    RoundObservation obs;
    obs.samples = draw_arrivals(members);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t i = members[k];
      const ClientConfig& cc = config_.clients[i];
      LabeledDataset batch =
          context_.pools[i]
              ? draw_from_pool(*context_.pools[i], obs.samples[k],
                               cc.label_noise, rng_)
              : generate_synthetic_data(context_.task, context_.synthetic[i],
                                        obs.samples[k], rng_);
      ArrivalSplit split = split_arrivals(batch);
      train_[i].append(split.train);
      validation_[i].append(split.validation);
    }
    if (t == 1) {
      for (std::size_t i : members) {
        eps_prev_[i] = validation_accuracy(global_, &validation_[i]);
      }
    }

    std::vector<Rng> client_rngs;
    client_rngs.reserve(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) client_rngs.emplace_back(rng_());
    std::vector<ClientSite> sites;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t i = members[k];
      sites.push_back({config_.clients[i].id, &train_[i], &validation_[i],
                       models_[i], &client_rngs[k]});
    }
    SharingRoundOptions options;
    options.max_iterations = config_.federation.max_aggregation_iters;
    options.early_stop_delta = config_.federation.early_stop_delta;
    options.mode = config_.federation.algorithm;
    options.trainer.epochs = config_.federation.epochs;
    options.trainer.batch_size = config_.federation.batch_size;
    options.trainer.learning_rate = config_.federation.learning_rate;
    options.trainer.norm_momentum = config_.federation.norm_momentum;
    SharingRoundResult round = run_sharing_round(sites, options);

    obs.eps = round.accuracy;
    obs.iterations = round.iterations;
    for (std::size_t i : members) obs.eps_prev.push_back(eps_prev_[i]);

    std::vector<ClientId> ids;
    for (std::size_t i : members) ids.push_back(config_.clients[i].id);
    const AggregationMode mode = config_.federation.algorithm;
    CollectiveUtility v = [&](std::span<const ClientId> coalition) {
      std::vector<std::size_t> positions;
      for (ClientId id : coalition) {
        positions.push_back(static_cast<std::size_t>(
            std::find(ids.begin(), ids.end(), id) - ids.begin()));
      }
      return coalition_accuracy(round, sites, positions, mode);
    };
    obs.q = contributions(config_.mechanism.contribution, v, ids, obs.samples,
                          rng_);

    for (std::size_t k = 0; k < members.size(); ++k) {
      models_[members[k]] = round.client_models[k];
    }
    global_ = round.global;
    return obs;
  }

  RoundObservation oracle_round(int t, const std::vector<std::size_t>& members) {
    RoundObservation obs;
    obs.samples = draw_arrivals(members);
    if (t == 1) {
      for (std::size_t i : members) {
        eps_prev_[i] = measured(i, oracle_accuracy(config_.clients[i].oracle, 0.0, rng_));
      }
    }
    std::normal_distribution<double> standard(0.0, 1.0);
    std::vector<double> z;
    for (std::size_t k = 0; k < members.size(); ++k) z.push_back(standard(rng_));

    std::vector<double> contribution(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
      const ClientConfig& cc = config_.clients[members[k]];
      contribution[k] = cc.oracle.quality * static_cast<double>(obs.samples[k]);
      const long new_train = obs.samples[k] - validation_share(obs.samples[k]);
      train_rows_[members[k]] += new_train;
    }

    std::vector<ClientId> ids;
    for (std::size_t i : members) ids.push_back(config_.clients[i].id);
    const double pooled = pooled_samples_;
    auto mean_accuracy = [&](double samples) {
      double total = 0.0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        total += measured(members[k], oracle_accuracy(config_.clients[members[k]].oracle,
                                                      samples, z[k]));
      }
      return total / static_cast<double>(members.size());
    };
    CollectiveUtility v = [&](std::span<const ClientId> coalition) {
      double samples = pooled;
      for (ClientId id : coalition) {
        const auto k = static_cast<std::size_t>(
            std::find(ids.begin(), ids.end(), id) - ids.begin());
        samples += contribution[k];
      }
      return mean_accuracy(samples);
    };

    double round_pool = pooled;
    for (double c : contribution) round_pool += c;
    const auto batch = static_cast<long>(config_.federation.batch_size);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const std::size_t i = members[k];
      obs.eps.push_back(
          measured(i, oracle_accuracy(config_.clients[i].oracle, round_pool, z[k])));
      obs.eps_prev.push_back(eps_prev_[i]);
      // Steps the trainer would take: L iterations x epochs x batches.
      obs.iterations.push_back(static_cast<long>(config_.federation.max_aggregation_iters) *
                               config_.federation.epochs *
                               ((train_rows_[i] + batch - 1) / batch));
    }
    obs.q = contributions(config_.mechanism.contribution, v, ids, obs.samples,
                          rng_);
    pooled_samples_ = round_pool;
    return obs;
  }

  // The oracle scores against the client's own, possibly corrupted, labels.
  double measured(std::size_t i, double accuracy) const {
    return measured_accuracy(accuracy, config_.clients[i].label_noise,
                             config_.task.classes);
  }

  std::vector<ClientRoundInputs> injected_round(
      int t, const std::vector<std::size_t>& members) {
    const auto& table = config_.injected_rounds[static_cast<std::size_t>(t - 1)];
    std::vector<ClientRoundInputs> inputs;
    for (std::size_t i : members) {
      auto it = std::find_if(table.begin(), table.end(), [&](const InjectedEntry& e) {
        return e.client == config_.clients[i].id;
      });
      inputs.push_back({it->client, it->utility, it->cost, it->q});
    }
    return inputs;
  }

  const ScenarioConfig& config_;
  const ScenarioContext& context_;
  Rng rng_;
  ReplicationResult result_;
  std::vector<bool> active_;
  std::vector<double> eps_prev_;
  std::vector<long> train_rows_;
  double pooled_samples_ = 0.0;
  ParamVector global_;
  std::vector<ParamVector> models_;
  std::vector<LabeledDataset> train_;
  std::vector<LabeledDataset> validation_;
};

}  // namespace

ScenarioContext prepare_scenario(const ScenarioConfig& config) {
  validate(config);
  ScenarioContext ctx;
  ctx.classes = config.task.classes;
  ctx.pools.resize(config.clients.size());
  bool any_synthetic = false;
  for (std::size_t i = 0; i < config.clients.size(); ++i) {
    if (const auto* idx = std::get_if<IdxSource>(&config.clients[i].data)) {
      ctx.pools[i] = std::make_shared<const LabeledDataset>(
          load_idx(idx->images, idx->labels, config.task.classes));
      if (ctx.features != 0 && ctx.features != ctx.pools[i]->num_features()) {
        throw ConfigError("IDX clients have different image sizes");
      }
      ctx.features = ctx.pools[i]->num_features();
    } else {
      any_synthetic = true;
    }
  }
  if (any_synthetic) {
    const auto d = static_cast<std::size_t>(config.task.features);
    if (ctx.features != 0 && ctx.features != d) {
      throw ConfigError("synthetic and IDX clients disagree on feature count");
    }
    ctx.features = d;
  }

  Rng scenario_rng(mix64(config.run.base_seed ^ kScenarioStreamSalt));
  ctx.task = make_synthetic_task(config.task.classes, ctx.features,
                                 config.task.separation, scenario_rng);
  for (const ClientConfig& cc : config.clients) {
    SyntheticClient sc;
    if (const auto* s = std::get_if<SyntheticSource>(&cc.data)) {
      sc.shift = random_shift(ctx.features, s->shift, scenario_rng);
      sc.scale = s->scale;
    }
    sc.label_noise = cc.label_noise;
    ctx.synthetic.push_back(std::move(sc));
  }
  return ctx;
}

ReplicationResult run_replication(const ScenarioConfig& config,
                                  const ScenarioContext& context, int index) {
  return Replication(config, context, index).run();
}

}  // namespace fedwelfare
