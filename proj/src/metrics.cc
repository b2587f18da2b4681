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

#include "fedwelfare/metrics.h"

#include <algorithm>

#include "fedwelfare/common.h"

namespace fedwelfare {
namespace {

bool is_active_at(const RoundLedger& round, ClientId id) {
  return std::any_of(round.records.begin(), round.records.end(),
                     [&](const RoundEconRecord& r) {
                       return r.client == id && r.active;
                     });
}

double round_welfare(const RoundLedger& round) {
  double welfare = 0.0;
  for (const RoundEconRecord& r : round.records) {
    if (r.active) welfare += r.profit;
  }
  return welfare;
}

}  // namespace

std::string to_string(TsfiSemantics semantics) {
  return semantics == TsfiSemantics::kRetrospective ? "retrospective"
                                                    : "historical";
}

TsfiSemantics parse_tsfi_semantics(const std::string& text) {
  if (text == "retrospective") return TsfiSemantics::kRetrospective;
  if (text == "historical") return TsfiSemantics::kHistorical;
  throw ConfigError("unknown TSFI semantics '" + text + "'");
}

double total_social_welfare(std::span<const RoundLedger> ledger, int up_to) {
  double tsw = 0.0;
  for (const RoundLedger& round : ledger) {
    if (round.round <= up_to) tsw += round_welfare(round);
  }
  return tsw;
}

std::optional<double> total_selection_fairness(
    std::span<const RoundLedger> ledger, int up_to, TsfiSemantics semantics) {
  const RoundLedger* current = nullptr;
  for (const RoundLedger& round : ledger) {
    if (round.round == up_to) current = &round;
  }
  double retained = 0.0, total = 0.0;
  for (const RoundLedger& round : ledger) {
    if (round.round > up_to) continue;
    for (const RoundEconRecord& r : round.records) {
      total += r.q;
      const bool counted = semantics == TsfiSemantics::kHistorical
                               ? r.active
                               : current != nullptr &&
                                     is_active_at(*current, r.client);
      if (counted) retained += r.q;
    }
  }
  if (total == 0.0) return std::nullopt;
  return retained / total;
}

MetricsSeries compute_metrics(std::span<const RoundLedger> ledger,
                              TsfiSemantics semantics) {
  MetricsSeries series;
  series.semantics = semantics;
  double tsw = 0.0;
  for (const RoundLedger& round : ledger) {
    tsw += round_welfare(round);
    series.rounds.push_back(round.round);
    series.tsw.push_back(tsw);
    series.tsfi.push_back(
        total_selection_fairness(ledger, round.round, semantics));
  }
  return series;
}

}  // namespace fedwelfare
