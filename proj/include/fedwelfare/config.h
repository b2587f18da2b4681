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

#ifndef FEDWELFARE_CONFIG_H_
#define FEDWELFARE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fedwelfare/accuracy_oracle.h"
#include "fedwelfare/aggregation.h"
#include "fedwelfare/common.h"
#include "fedwelfare/contribution.h"
#include "fedwelfare/economics.h"
#include "fedwelfare/metrics.h"
#include "fedwelfare/selection.h"

namespace fedwelfare {

// Where accuracies, utilities and contributions come from.
enum class Backend {
  kTrainer,   // softmax classifier trained on generated or loaded data
  kOracle,    // closed-form accuracy curve
  kInjected,  // per-round utility/cost/q tables given in the config
};

// Gaussian-blob client: samples are scale * (center + noise) + shift.
struct SyntheticSource {
  double shift = 0.0;  // length of the client's mean-shift vector
  double scale = 1.0;  // per-feature multiplicative distortion
};

// Client drawing samples from locally supplied MNIST-format files.
struct IdxSource {
  std::string images;
  std::string labels;
};

struct ClientConfig {
  ClientId id{};
  double lambda = 100.0;  // Poisson mean of new samples per round
  ClientEconParams econ;
  std::variant<SyntheticSource, IdxSource> data = SyntheticSource{};
  double label_noise = 0.0;  // per-sample label corruption probability
  AccuracyOracleParams oracle;
};

struct SyntheticTaskConfig {
  int classes = 10;
  int features = 16;
  double separation = 2.0;
};

struct FederationConfig {
  int rounds = 15;  // T
  int max_aggregation_iters = 5;
  double early_stop_delta = 0.01;
  int batch_size = 32;
  int epochs = 1;
  double learning_rate = 0.05;
  double norm_momentum = 1.0;
  AggregationMode algorithm = AggregationMode::kFedAvg;
  Backend backend = Backend::kOracle;
};

struct MechanismConfig {
  double mu = 0.1;
  SelectionPolicy policy = SelectionPolicy::kObjective;
  ContributionMethod contribution;
  TsfiSemantics tsfi = TsfiSemantics::kRetrospective;
};

struct RunConfig {
  std::uint64_t base_seed = 1;
  int replications = 100;
  std::string output_dir = "out";
};

struct InjectedEntry {
  ClientId client{};
  double utility = 0.0;
  double cost = 0.0;
  double q = 0.0;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::vector<ClientConfig> clients;  // ascending by id
  SyntheticTaskConfig task;
  FederationConfig federation;
  MechanismConfig mechanism;
  RunConfig run;
  std::vector<std::vector<InjectedEntry>> injected_rounds;
};

// Parses and validates. Unknown keys anywhere raise ConfigError.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

// Fully resolved form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ScenarioConfig& config);

void validate(const ScenarioConfig& config);

std::string to_string(Backend backend);
std::string to_string(AggregationMode mode);
std::string to_string(SelectionPolicy policy);
std::string to_string(ContributionKind kind);

}  // namespace fedwelfare

#endif  // FEDWELFARE_CONFIG_H_
