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

// Command-line front end: run, sweep, toy-example, report.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fedwelfare/experiment.h"
#include "fedwelfare/replication.h"
#include "fedwelfare/toy_example.h"

namespace fs = std::filesystem;
using namespace fedwelfare;

namespace {

void print_summary(const nlohmann::json& report) {
  const auto& reps = report["replications"];
  std::printf("%s: mu=%s, %d/%d replications succeeded\n",
              report["scenario"].get<std::string>().c_str(),
              format_number(report["mu"].get<double>()).c_str(),
              reps["succeeded"].get<int>(), reps["requested"].get<int>());
  for (const auto& c : report["elimination_round"]) {
    if (c["mean"].is_null()) continue;
    std::printf("  client %d: mean elimination round %s (sd %s)\n",
                c["client"].get<int>(),
                format_number(c["mean"].get<double>()).c_str(),
                format_number(c["sd"].get<double>()).c_str());
  }
}

std::string id_set(const std::vector<ClientId>& ids) {
  std::string s = "{";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) s += ",";
    s += "C" + std::to_string(to_int(ids[i]));
  }
  return s + "}";
}

int toy_example(double mu) {
  const ScenarioConfig config = toy_example_config(mu);
  const ScenarioContext context = prepare_scenario(config);
  const ReplicationResult result = run_replication(config, context, 0);
  if (result.error) {
    std::fprintf(stderr, "error: %s\n", result.error->c_str());
    return 1;
  }
  std::printf("%s", ledger_csv(result).c_str());

  // Alternatives for the last round, given the rounds before it.
  const std::vector<RoundLedger> history(result.ledger.begin(),
                                         result.ledger.end() - 1);
  std::vector<ClientRoundInputs> last;
  for (const RoundEconRecord& r : result.ledger.back().records) {
    last.push_back({r.client, r.utility, r.cost, r.q});
  }
  std::printf("\nround %d eliminations at mu=%s\n", result.ledger.back().round,
              format_number(mu).c_str());
  std::printf("eliminated,objective,tsw,tsfi\n");
  for (const EliminationScenario& s :
       explore_eliminations(history, last, mu, config.mechanism.tsfi)) {
    std::printf("%s,%s,%s,%s\n", id_set(s.eliminated).c_str(),
                format_number(s.objective).c_str(), format_number(s.tsw).c_str(),
                s.tsfi ? format_number(*s.tsfi).c_str() : "NA");
  }
  std::vector<ClientId> retained;
  for (const RoundEconRecord& r : result.ledger.back().records) {
    if (r.active) retained.push_back(r.client);
  }
  std::printf("\ndecision: retain %s\n", id_set(retained).c_str());
  return 0;
}

int report(const fs::path& dir, bool svg) {
  if (fs::exists(dir / "sweep.json")) {
    std::vector<fs::path> runs;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "config.json")) {
        runs.push_back(entry.path());
      }
    }
    std::sort(runs.begin(), runs.end());
    for (const fs::path& run : runs) report(run, svg);
    return 0;
  }
  const nlohmann::json r = build_report(dir);
  std::ofstream(dir / "report.json", std::ios::binary) << r.dump(2) << "\n";
  if (svg) write_svg_charts(r, dir);
  print_summary(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-silo federated learning welfare simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  std::optional<int> reps;
  std::optional<double> mu;
  std::optional<std::uint64_t> seed;
  std::vector<double> mus;
  double toy_mu = 0.1;
  bool svg = false;

  auto* run = app.add_subcommand("run", "Run all replications of a scenario");
  run->add_option("--config", config_path, "Scenario JSON")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--reps", reps, "Override replication count");
  run->add_option("--mu", mu, "Override leniency parameter");
  run->add_option("--seed", seed, "Override base seed");
  run->add_flag("--svg", svg, "Also write SVG charts");

  auto* sweep = app.add_subcommand("sweep", "Run a scenario for several mu values");
  sweep->add_option("--config", config_path, "Scenario JSON")->required();
  sweep->add_option("--mu", mus, "Comma-separated mu values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_dir, "Output directory")->required();
  sweep->add_option("--reps", reps, "Override replication count");
  sweep->add_option("--seed", seed, "Override base seed");

  auto* toy = app.add_subcommand("toy-example", "Print the three-client example");
  toy->add_option("--mu", toy_mu, "Leniency parameter");

  auto* rep = app.add_subcommand("report", "Aggregate the CSVs in a run directory");
  rep->add_option("--in", in_dir, "Run or sweep directory")->required();
  rep->add_flag("--svg", svg, "Write SVG charts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (toy->parsed()) return toy_example(toy_mu);
    if (rep->parsed()) return report(in_dir, svg);

    ScenarioConfig config = load_config(config_path);
    if (reps) config.run.replications = *reps;
    if (mu) config.mechanism.mu = *mu;
    if (seed) config.run.base_seed = *seed;
    config.run.output_dir = out_dir;
    validate(config);

    if (run->parsed()) {
      const nlohmann::json r = run_experiment(config, out_dir);
      if (svg) write_svg_charts(r, out_dir);
      print_summary(r);
      return r["replications"]["failed"].get<int>() == 0 ? 0 : 2;
    }
    const nlohmann::json s = run_sweep(config, mus, out_dir);
    for (const auto& entry : s["runs"]) {
      print_summary(build_report(fs::path(out_dir) / entry["dir"].get<std::string>()));
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
