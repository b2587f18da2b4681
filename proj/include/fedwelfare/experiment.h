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

#ifndef FEDWELFARE_EXPERIMENT_H_
#define FEDWELFARE_EXPERIMENT_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "fedwelfare/config.h"
#include "fedwelfare/replication.h"

namespace fedwelfare {

inline constexpr int kReportSchemaVersion = 1;

// Decimal text with 12 significant digits; negative zero prints as "0".
std::string format_number(double value);

// CSV documents for one replication, header row included, LF endings.
std::string ledger_csv(const ReplicationResult& result);
std::string trace_csv(const ReplicationResult& result, double mu);
std::string metrics_csv(const ReplicationResult& result, double mu);

// Rows of a CSV document, split on commas. No quoting is supported, which is
// enough for the files written above.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Worker count from FEDWELFARE_THREADS; unset or 0 means hardware
// concurrency.
int worker_threads();

// Runs every replication of `config` on a worker pool, writes
// rep_NNNN_{ledger,trace,metrics}.csv (or rep_NNNN_error.txt) plus the
// resolved config.json and report.json into `out`, and returns the report.
nlohmann::json run_experiment(const ScenarioConfig& config,
                              const std::filesystem::path& out);

// Rebuilds the aggregate report from the files in `dir` alone. This is what
// run_experiment itself uses, so the two always agree.
nlohmann::json build_report(const std::filesystem::path& dir);

// One run_experiment per mu under out/mu_<value>, plus out/sweep.json.
nlohmann::json run_sweep(const ScenarioConfig& config, std::span<const double> mus,
                         const std::filesystem::path& out);

// tsw.svg, tsfi.svg and elimination.svg next to the report.
void write_svg_charts(const nlohmann::json& report,
                      const std::filesystem::path& dir);

}  // namespace fedwelfare

#endif  // FEDWELFARE_EXPERIMENT_H_
