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

#include "fedwelfare/selection.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace fedwelfare {
namespace {

void check_inputs(std::span<const ClientRoundInputs> inputs) {
  for (std::size_t i = 1; i < inputs.size(); ++i) {
    if (!(to_int(inputs[i - 1].client) < to_int(inputs[i].client))) {
      throw ValidationError("round inputs must be unique and ascending by id");
    }
  }
  for (const ClientRoundInputs& in : inputs) {
    if (!std::isfinite(in.utility) || !std::isfinite(in.cost) ||
        !std::isfinite(in.q)) {
      throw ValidationError("round inputs must be finite");
    }
  }
}

bool has_bit(EliminationMask mask, std::size_t i) {
  return (mask >> i) & 1U;
}

SelectionDecision decision_from_mask(std::span<const ClientRoundInputs> inputs,
                                     EliminationMask eliminated) {
  SelectionDecision d;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    (has_bit(eliminated, i) ? d.eliminated : d.retained)
        .push_back(inputs[i].client);
  }
  return d;
}

double retained_welfare(std::span<const ClientRoundInputs> inputs,
                        const SelectionDecision& d) {
  double welfare = 0.0;
  for (const ClientRoundInputs& in : inputs) {
    if (std::find(d.retained.begin(), d.retained.end(), in.client) !=
        d.retained.end()) {
      welfare += in.profit();
    }
  }
  return welfare;
}

// True when eliminated-id list `a` is lexicographically smaller than `b`.
bool ids_less(const std::vector<ClientId>& a, const std::vector<ClientId>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](ClientId x, ClientId y) { return to_int(x) < to_int(y); });
}

}  // namespace

std::vector<ClientId> candidate_eliminations(
    std::span<const ClientRoundInputs> inputs) {
  std::vector<ClientId> out;
  for (const ClientRoundInputs& in : inputs) {
    if (in.utility < in.cost) out.push_back(in.client);
  }
  return out;
}

double selection_objective(std::span<const ClientRoundInputs> inputs,
                           EliminationMask eliminated, double mu) {
  if (inputs.size() > 64 ||
      (inputs.size() < 64 && (eliminated >> inputs.size()) != 0)) {
    throw StructuralError("elimination mask refers to unknown clients");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw ValidationError("mu must be finite and non-negative");
  }
  double welfare = 0.0, q_retained = 0.0, q_eliminated = 0.0;
  std::size_t retained = 0, dropped = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (has_bit(eliminated, i)) {
      q_eliminated += inputs[i].q;
      ++dropped;
    } else {
      welfare += inputs[i].profit();
      q_retained += inputs[i].q;
      ++retained;
    }
  }
  if (retained == 0 && mu != 0.0) {
    throw ValidationError("objective undefined for an empty retained set");
  }
  if (dropped == 0 || mu == 0.0) return welfare;
  if (!(q_retained > 0.0)) return -std::numeric_limits<double>::infinity();
  return welfare - mu * (q_eliminated / q_retained);
}

SelectionDecision select_active_set(std::span<const ClientRoundInputs> inputs,
                                    double mu) {
  check_inputs(inputs);
  if (inputs.empty()) throw ValidationError("selection over an empty set");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].utility < inputs[i].cost) candidates.push_back(i);
  }
  if (candidates.size() > kMaxEliminationCandidates) {
    throw ConfigError(std::to_string(candidates.size()) +
                      " elimination candidates exceed the powerset limit");
  }

  SelectionDecision best;
  bool have_best = false;
  int considered = 0;
  const std::uint64_t subsets = std::uint64_t{1} << candidates.size();
  for (std::uint64_t subset = 0; subset < subsets; ++subset) {
    EliminationMask eliminated = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (has_bit(subset, k)) eliminated |= EliminationMask{1} << candidates[k];
    }
    if (static_cast<std::size_t>(std::popcount(subset)) == inputs.size() &&
        mu != 0.0) {
      continue;
    }
    const double f = selection_objective(inputs, eliminated, mu);
    ++considered;

    SelectionDecision candidate = decision_from_mask(inputs, eliminated);
    candidate.objective = f;
    bool better = !have_best || f > best.objective;
    if (have_best && f == best.objective) {
      if (candidate.eliminated.size() != best.eliminated.size()) {
        better = candidate.eliminated.size() < best.eliminated.size();
      } else {
        better = ids_less(candidate.eliminated, best.eliminated);
      }
    }
    if (better) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  best.candidates_considered = considered;
  return best;
}

SelectionDecision least_lenient_selection(
    std::span<const ClientRoundInputs> inputs) {
  check_inputs(inputs);
  SelectionDecision d;
  for (const ClientRoundInputs& in : inputs) {
    (in.utility >= in.cost ? d.retained : d.eliminated).push_back(in.client);
  }
  d.objective = retained_welfare(inputs, d);
  d.candidates_considered = 1;
  return d;
}

SelectionDecision most_lenient_selection(
    std::span<const ClientRoundInputs> inputs) {
  check_inputs(inputs);
  SelectionDecision d;
  for (const ClientRoundInputs& in : inputs) d.retained.push_back(in.client);
  d.objective = retained_welfare(inputs, d);
  d.candidates_considered = 1;
  return d;
}

RoundSettlement selection_round(std::span<const ClientRoundInputs> inputs,
                                double mu, SelectionPolicy policy) {
  switch (policy) {
    case SelectionPolicy::kObjective:
      return settle(inputs, select_active_set(inputs, mu));
    case SelectionPolicy::kLeastLenient:
      return settle(inputs, least_lenient_selection(inputs));
    case SelectionPolicy::kMostLenient:
      return settle(inputs, most_lenient_selection(inputs));
  }
  throw StructuralError("unknown selection policy");
}

RoundSettlement settle(std::span<const ClientRoundInputs> inputs,
                       SelectionDecision decision) {
  RoundSettlement out;
  out.decision = std::move(decision);

  std::vector<double> profits, qs;
  std::vector<std::size_t> retained_pos;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const ClientRoundInputs& in = inputs[i];
    RoundEconRecord r;
    r.client = in.client;
    r.utility = in.utility;
    r.cost = in.cost;
    r.profit = in.profit();
    r.q = in.q;
    r.active = std::find(out.decision.retained.begin(),
                         out.decision.retained.end(),
                         in.client) != out.decision.retained.end();
    r.payoff = r.profit;
    r.mt = 0.0;
    if (r.active) {
      profits.push_back(r.profit);
      qs.push_back(r.q);
      retained_pos.push_back(i);
    }
    out.records.push_back(r);
  }
  if (!retained_pos.empty()) {
    Settlement s = money_transfer(profits, qs);
    out.budget = compute_budget(profits);
    out.equal_split = s.equal_split;
    for (std::size_t k = 0; k < retained_pos.size(); ++k) {
      out.records[retained_pos[k]].payoff = s.payoff[k];
      out.records[retained_pos[k]].mt = s.transfer[k];
    }
  }
  return out;
}

}  // namespace fedwelfare
