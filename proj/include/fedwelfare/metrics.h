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

#ifndef FEDWELFARE_METRICS_H_
#define FEDWELFARE_METRICS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedwelfare/economics.h"

namespace fedwelfare {

// Economics of one data sharing round: a record for every member of A(t-1).
// Clients deselected in earlier rounds have no record and count as q = 0.
struct RoundLedger {
  int round = 0;
  std::vector<RoundEconRecord> records;
};

// How TSFI chooses the numerator's client set for past rounds.
enum class TsfiSemantics {
  kRetrospective,  // the active set at t' applied to every round t <= t'
  kHistorical,     // each round's own active set A(t)
};

std::string to_string(TsfiSemantics semantics);
TsfiSemantics parse_tsfi_semantics(const std::string& text);

// Sum over rounds t <= up_to of the retained clients' profits.
double total_social_welfare(std::span<const RoundLedger> ledger, int up_to);

// Retained contribution over total contribution for rounds t <= up_to.
// Empty when the denominator is zero.
std::optional<double> total_selection_fairness(
    std::span<const RoundLedger> ledger, int up_to, TsfiSemantics semantics);

struct MetricsSeries {
  TsfiSemantics semantics = TsfiSemantics::kRetrospective;
  std::vector<int> rounds;
  std::vector<double> tsw;
  std::vector<std::optional<double>> tsfi;
};

// One entry per ledger round. TSW is accumulated incrementally.
MetricsSeries compute_metrics(std::span<const RoundLedger> ledger,
                              TsfiSemantics semantics);

}  // namespace fedwelfare

#endif  // FEDWELFARE_METRICS_H_
