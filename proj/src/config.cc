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

#include "fedwelfare/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>

namespace fedwelfare {
namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
  }
}

AggregationMode parse_mode(const std::string& s) {
  if (s == "fedavg") return AggregationMode::kFedAvg;
  if (s == "fedbn") return AggregationMode::kFedBn;
  throw ConfigError("unknown algorithm '" + s + "'");
}

Backend parse_backend(const std::string& s) {
  if (s == "trainer") return Backend::kTrainer;
  if (s == "oracle") return Backend::kOracle;
  if (s == "injected") return Backend::kInjected;
  throw ConfigError("unknown backend '" + s + "'");
}

SelectionPolicy parse_policy(const std::string& s) {
  if (s == "objective") return SelectionPolicy::kObjective;
  if (s == "least-lenient") return SelectionPolicy::kLeastLenient;
  if (s == "most-lenient") return SelectionPolicy::kMostLenient;
  throw ConfigError("unknown selection policy '" + s + "'");
}

ContributionKind parse_kind(const std::string& s) {
  if (s == "quantitative") return ContributionKind::kQuantitative;
  if (s == "marginal") return ContributionKind::kMarginal;
  if (s == "shapley-exact") return ContributionKind::kShapleyExact;
  if (s == "shapley-mc") return ContributionKind::kShapleyMc;
  throw ConfigError("unknown contribution method '" + s + "'");
}

void read_oracle(const json& obj, AccuracyOracleParams& p, bool& has_quality,
                 const std::string& where) {
  check_keys(obj, {"a_max", "tau", "hetero", "quality", "noise_sd"}, where);
  read(obj, "a_max", p.a_max, where);
  read(obj, "tau", p.tau, where);
  read(obj, "hetero", p.hetero, where);
  read(obj, "noise_sd", p.noise_sd, where);
  if (obj.contains("quality")) {
    read(obj, "quality", p.quality, where);
    has_quality = true;
  }
}

void read_econ(const json& obj, ClientEconParams& p, const std::string& where) {
  check_keys(obj, {"revenue_per_accuracy", "data_cost", "train_cost", "comm_cost"},
             where);
  read(obj, "revenue_per_accuracy", p.revenue_per_accuracy, where);
  read(obj, "data_cost", p.data_cost, where);
  read(obj, "train_cost", p.train_cost, where);
  read(obj, "comm_cost", p.comm_cost, where);
}

}  // namespace

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::kTrainer: return "trainer";
    case Backend::kOracle: return "oracle";
    case Backend::kInjected: return "injected";
  }
  return "?";
}

std::string to_string(AggregationMode mode) {
  return mode == AggregationMode::kFedAvg ? "fedavg" : "fedbn";
}

std::string to_string(SelectionPolicy policy) {
  switch (policy) {
    case SelectionPolicy::kObjective: return "objective";
    case SelectionPolicy::kLeastLenient: return "least-lenient";
    case SelectionPolicy::kMostLenient: return "most-lenient";
  }
  return "?";
}

std::string to_string(ContributionKind kind) {
  switch (kind) {
    case ContributionKind::kQuantitative: return "quantitative";
    case ContributionKind::kMarginal: return "marginal";
    case ContributionKind::kShapleyExact: return "shapley-exact";
    case ContributionKind::kShapleyMc: return "shapley-mc";
  }
  return "?";
}

ScenarioConfig parse_config(const json& doc) {
  check_keys(doc, {"name", "task", "oracle", "econ", "clients", "federation",
                   "mechanism", "run", "injected_rounds"},
             "config");
  ScenarioConfig c;
  read(doc, "name", c.name, "config");

  if (doc.contains("task")) {
    const json& t = doc["task"];
    check_keys(t, {"classes", "features", "separation"}, "task");
    read(t, "classes", c.task.classes, "task");
    read(t, "features", c.task.features, "task");
    read(t, "separation", c.task.separation, "task");
  }

  AccuracyOracleParams oracle_defaults;
  bool default_quality = false;
  if (doc.contains("oracle")) {
    read_oracle(doc["oracle"], oracle_defaults, default_quality, "oracle");
  }
  ClientEconParams econ_defaults;
  if (doc.contains("econ")) read_econ(doc["econ"], econ_defaults, "econ");

  if (!doc.contains("clients") || !doc["clients"].is_array()) {
    throw ConfigError("config needs a 'clients' array");
  }
  for (const json& cj : doc["clients"]) {
    const std::string where = "client";
    check_keys(cj, {"id", "lambda", "econ", "data", "label_noise", "oracle"},
               where);
    ClientConfig cc;
    if (!cj.contains("id")) throw ConfigError("client without 'id'");
    int id = 0;
    read(cj, "id", id, where);
    cc.id = client(id);
    read(cj, "lambda", cc.lambda, where);
    cc.econ = econ_defaults;
    if (cj.contains("econ")) read_econ(cj["econ"], cc.econ, "client econ");
    read(cj, "label_noise", cc.label_noise, where);
    if (cj.contains("data")) {
      const json& d = cj["data"];
      std::string kind = "synthetic";
      if (d.is_object()) read(d, "kind", kind, "client data");
      if (kind == "synthetic") {
        check_keys(d, {"kind", "shift", "scale"}, "client data");
        SyntheticSource s;
        read(d, "shift", s.shift, "client data");
        read(d, "scale", s.scale, "client data");
        cc.data = s;
      } else if (kind == "idx") {
        check_keys(d, {"kind", "images", "labels"}, "client data");
        IdxSource s;
        read(d, "images", s.images, "client data");
        read(d, "labels", s.labels, "client data");
        cc.data = s;
      } else {
        throw ConfigError("unknown data kind '" + kind + "'");
      }
    }
    cc.oracle = oracle_defaults;
    bool has_quality = default_quality;
    if (cj.contains("oracle")) {
      read_oracle(cj["oracle"], cc.oracle, has_quality, "client oracle");
    }
    if (!has_quality) {
      // Share of labels that still carry signal after uniform corruption.
      const double k = c.task.classes;
      cc.oracle.quality = std::max(0.0, 1.0 - cc.label_noise * k / (k - 1.0));
    }
    c.clients.push_back(std::move(cc));
  }
  std::sort(c.clients.begin(), c.clients.end(),
            [](const ClientConfig& a, const ClientConfig& b) {
              return to_int(a.id) < to_int(b.id);
            });

  if (doc.contains("federation")) {
    const json& f = doc["federation"];
    check_keys(f, {"rounds", "max_aggregation_iters", "early_stop_delta",
                   "batch_size", "epochs", "learning_rate", "norm_momentum",
                   "algorithm", "backend"},
               "federation");
    read(f, "rounds", c.federation.rounds, "federation");
    read(f, "max_aggregation_iters", c.federation.max_aggregation_iters,
         "federation");
    read(f, "early_stop_delta", c.federation.early_stop_delta, "federation");
    read(f, "batch_size", c.federation.batch_size, "federation");
    read(f, "epochs", c.federation.epochs, "federation");
    read(f, "learning_rate", c.federation.learning_rate, "federation");
    read(f, "norm_momentum", c.federation.norm_momentum, "federation");
    std::string s;
    if (f.contains("algorithm")) {
      read(f, "algorithm", s, "federation");
      c.federation.algorithm = parse_mode(s);
    }
    if (f.contains("backend")) {
      read(f, "backend", s, "federation");
      c.federation.backend = parse_backend(s);
    }
  }

  if (doc.contains("mechanism")) {
    const json& m = doc["mechanism"];
    check_keys(m, {"mu", "policy", "contribution", "tsfi_semantics"},
               "mechanism");
    read(m, "mu", c.mechanism.mu, "mechanism");
    std::string s;
    if (m.contains("policy")) {
      read(m, "policy", s, "mechanism");
      c.mechanism.policy = parse_policy(s);
    }
    if (m.contains("contribution")) {
      const json& cm = m["contribution"];
      check_keys(cm, {"kind", "permutations"}, "contribution");
      if (cm.contains("kind")) {
        read(cm, "kind", s, "contribution");
        c.mechanism.contribution.kind = parse_kind(s);
      }
      read(cm, "permutations", c.mechanism.contribution.mc_permutations,
           "contribution");
    }
    if (m.contains("tsfi_semantics")) {
      read(m, "tsfi_semantics", s, "mechanism");
      c.mechanism.tsfi = parse_tsfi_semantics(s);
    }
  }

  if (doc.contains("run")) {
    const json& r = doc["run"];
    check_keys(r, {"base_seed", "replications", "output_dir"}, "run");
    read(r, "base_seed", c.run.base_seed, "run");
    read(r, "replications", c.run.replications, "run");
    read(r, "output_dir", c.run.output_dir, "run");
  }

  if (doc.contains("injected_rounds")) {
    for (const json& round : doc["injected_rounds"]) {
      std::vector<InjectedEntry> entries;
      for (const json& e : round) {
        check_keys(e, {"client", "utility", "cost", "q"}, "injected entry");
        InjectedEntry entry;
        int id = 0;
        read(e, "client", id, "injected entry");
        entry.client = client(id);
        read(e, "utility", entry.utility, "injected entry");
        read(e, "cost", entry.cost, "injected entry");
        read(e, "q", entry.q, "injected entry");
        entries.push_back(entry);
      }
      c.injected_rounds.push_back(std::move(entries));
    }
  }

  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  return parse_config(doc);
}

void validate(const ScenarioConfig& c) {
  if (c.clients.size() < 2) throw ConfigError("need at least two clients");
  std::set<int> ids;
  for (const ClientConfig& cc : c.clients) {
    if (!ids.insert(to_int(cc.id)).second) {
      throw ConfigError("duplicate client id " + std::to_string(to_int(cc.id)));
    }
    if (!(cc.lambda > 0.0) || !std::isfinite(cc.lambda)) {
      throw ConfigError("lambda must be positive");
    }
    if (!(cc.label_noise >= 0.0 && cc.label_noise <= 1.0)) {
      throw ConfigError("label_noise must be in [0, 1]");
    }
    validate(cc.econ);
    validate(cc.oracle);
    if (const auto* s = std::get_if<SyntheticSource>(&cc.data)) {
      if (!std::isfinite(s->shift) || !(s->scale > 0.0)) {
        throw ConfigError("synthetic shift must be finite and scale positive");
      }
    }
  }
  if (c.task.classes < 2 || c.task.features < 1 || !(c.task.separation >= 0.0)) {
    throw ConfigError("task needs >= 2 classes, >= 1 feature, separation >= 0");
  }
  const FederationConfig& f = c.federation;
  if (f.rounds < 1) throw ConfigError("rounds must be >= 1");
  if (f.max_aggregation_iters < 1) {
    throw ConfigError("max_aggregation_iters must be >= 1");
  }
  if (!(f.early_stop_delta >= 0.0)) {
    throw ConfigError("early_stop_delta must be >= 0");
  }
  if (f.batch_size < 1 || f.epochs < 1 || !(f.learning_rate >= 0.0)) {
    throw ConfigError("batch_size, epochs >= 1 and learning_rate >= 0 required");
  }
  if (!(f.norm_momentum >= 0.0 && f.norm_momentum <= 1.0)) {
    throw ConfigError("norm_momentum must be in [0, 1]");
  }
  if (!(c.mechanism.mu >= 0.0) || !std::isfinite(c.mechanism.mu)) {
    throw ConfigError("mu must be finite and non-negative");
  }
  if (c.mechanism.contribution.mc_permutations < 1) {
    throw ConfigError("permutations must be >= 1");
  }
  if (c.mechanism.contribution.kind == ContributionKind::kShapleyExact &&
      c.clients.size() > kMaxShapleyClients) {
    throw ConfigError("exact Shapley supports at most 20 clients");
  }
  if (c.run.replications < 1) throw ConfigError("replications must be >= 1");
  if (f.backend == Backend::kInjected) {
    if (c.injected_rounds.empty()) {
      throw ConfigError("injected backend needs injected_rounds");
    }
    for (const auto& round : c.injected_rounds) {
      for (const ClientConfig& cc : c.clients) {
        if (std::none_of(round.begin(), round.end(),
                         [&](const InjectedEntry& e) { return e.client == cc.id; })) {
          throw ConfigError("injected round lacks client " +
                            std::to_string(to_int(cc.id)));
        }
      }
    }
  } else if (!c.injected_rounds.empty()) {
    throw ConfigError("injected_rounds requires the injected backend");
  }
}

json to_json(const ScenarioConfig& c) {
  json doc;
  doc["name"] = c.name;
  doc["task"] = {{"classes", c.task.classes},
                 {"features", c.task.features},
                 {"separation", c.task.separation}};
  json clients = json::array();
  for (const ClientConfig& cc : c.clients) {
    json cj;
    cj["id"] = to_int(cc.id);
    cj["lambda"] = cc.lambda;
    cj["econ"] = {{"revenue_per_accuracy", cc.econ.revenue_per_accuracy},
                  {"data_cost", cc.econ.data_cost},
                  {"train_cost", cc.econ.train_cost},
                  {"comm_cost", cc.econ.comm_cost}};
    if (const auto* s = std::get_if<SyntheticSource>(&cc.data)) {
      cj["data"] = {{"kind", "synthetic"}, {"shift", s->shift}, {"scale", s->scale}};
    } else {
      const auto& idx = std::get<IdxSource>(cc.data);
      cj["data"] = {{"kind", "idx"}, {"images", idx.images}, {"labels", idx.labels}};
    }
    cj["label_noise"] = cc.label_noise;
    cj["oracle"] = {{"a_max", cc.oracle.a_max},
                    {"tau", cc.oracle.tau},
                    {"hetero", cc.oracle.hetero},
                    {"quality", cc.oracle.quality},
                    {"noise_sd", cc.oracle.noise_sd}};
    clients.push_back(std::move(cj));
  }
  doc["clients"] = std::move(clients);
  const FederationConfig& f = c.federation;
  doc["federation"] = {{"rounds", f.rounds},
                       {"max_aggregation_iters", f.max_aggregation_iters},
                       {"early_stop_delta", f.early_stop_delta},
                       {"batch_size", f.batch_size},
                       {"epochs", f.epochs},
                       {"learning_rate", f.learning_rate},
                       {"norm_momentum", f.norm_momentum},
                       {"algorithm", to_string(f.algorithm)},
                       {"backend", to_string(f.backend)}};
  doc["mechanism"] = {
      {"mu", c.mechanism.mu},
      {"policy", to_string(c.mechanism.policy)},
      {"contribution",
       {{"kind", to_string(c.mechanism.contribution.kind)},
        {"permutations", c.mechanism.contribution.mc_permutations}}},
      {"tsfi_semantics", to_string(c.mechanism.tsfi)}};
  doc["run"] = {{"base_seed", c.run.base_seed},
                {"replications", c.run.replications},
                {"output_dir", c.run.output_dir}};
  if (!c.injected_rounds.empty()) {
    json rounds = json::array();
    for (const auto& round : c.injected_rounds) {
      json entries = json::array();
      for (const InjectedEntry& e : round) {
        entries.push_back({{"client", to_int(e.client)},
                           {"utility", e.utility},
                           {"cost", e.cost},
                           {"q", e.q}});
      }
      rounds.push_back(std::move(entries));
    }
    doc["injected_rounds"] = std::move(rounds);
  }
  return doc;
}

}  // namespace fedwelfare
