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

// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fedwelfare/contribution.h"
#include "fedwelfare/experiment.h"
#include "fedwelfare/idx.h"
#include "fedwelfare/model.h"
#include "fedwelfare/replication.h"
#include "fedwelfare/selection.h"
#include "fedwelfare/toy_example.h"

namespace fs = std::filesystem;
using namespace fedwelfare;

namespace {

const fs::path kPresets = FEDWELFARE_PRESET_DIR;
const std::vector<std::string> kNamedPresets = {
    "heterogeneous", "homogeneous-large", "homogeneous-small", "label-noise",
    "toy-example"};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_number(v); }

ScenarioConfig preset(const std::string& name) {
  return load_config(kPresets / (name + ".json"));
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fedwelfare_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<double> mean_elimination(const nlohmann::json& report) {
  std::vector<double> out;
  for (const auto& c : report["elimination_round"]) out.push_back(c["mean"].get<double>());
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (double x : xs) s += (s.empty() ? "" : "/") + fmt(x);
  return s;
}

// 1. Worked three-client example.
Outcome toy_example() {
  Outcome o;
  const auto start = Clock::now();
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  for (double mu : {0.0, 0.1, 1.0}) {
    ScenarioConfig c = toy_example_config(mu);
    ReplicationResult r = run_replication(c, prepare_scenario(c), 0);
    if (r.error || r.ledger.size() != 2) {
      o.fail("toy replication did not play two rounds");
      return o;
    }
    std::vector<RoundLedger> history(r.ledger.begin(), r.ledger.begin() + 1);
    std::vector<ClientRoundInputs> last;
    for (const auto& rec : r.ledger[1].records) last.push_back({rec.client, rec.utility, rec.cost, rec.q});
    auto scenarios = explore_eliminations(history, last, mu, TsfiSemantics::kRetrospective);
    // Masks over C1, C2: {C1}, {C2}, {C1,C2}, {}.
    struct Expect {
      std::size_t index;
      double objective, tsw, tsfi;
    };
    const Expect expected[] = {{1, 0.1 - mu, 0.5, 0.55},
                               {2, 0.1 - mu / 9, 0.5, 0.85},
                               {3, 0.15 - 1.5 * mu, 0.55, 0.4},
                               {0, 0.05, 0.45, 1.0}};
    if (scenarios.size() != 4) {
      o.fail("expected four elimination scenarios");
      return o;
    }
    for (const Expect& e : expected) {
      const EliminationScenario& s = scenarios[e.index];
      if (!near(s.objective, e.objective) || !near(s.tsw, e.tsw) || !s.tsfi ||
          !near(*s.tsfi, e.tsfi)) {
        o.fail("scenario mismatch at mu=" + fmt(mu) + ": objective " + fmt(s.objective) +
               " tsw " + fmt(s.tsw));
      }
    }
  }
  struct Decision {
    double mu;
    std::vector<int> retained;
  };
  for (const Decision& d : {Decision{0.01, {3}}, Decision{0.2, {1, 3}}, Decision{1.0, {1, 2, 3}}}) {
    ScenarioConfig c = toy_example_config(d.mu);
    ReplicationResult r = run_replication(c, prepare_scenario(c), 0);
    std::vector<int> got;
    for (const auto& rec : r.ledger.back().records) {
      if (rec.active) got.push_back(to_int(rec.client));
    }
    if (got != d.retained) o.fail("wrong retained set at mu=" + fmt(d.mu));
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 1.0) o.fail("took " + fmt(elapsed) + " s");
  if (o.pass) o.detail = "objectives, TSW, TSFI and decisions exact; " + fmt(elapsed) + " s";
  return o;
}

// 2. Budget balance on the label-noise preset.
Outcome budget_balance() {
  Outcome o;
  const auto start = Clock::now();
  ScenarioConfig c = preset("label-noise");
  c.run.replications = 100;
  ScenarioContext ctx = prepare_scenario(c);
  double worst = 0.0;
  int rounds = 0;
  for (int i = 0; i < c.run.replications; ++i) {
    ReplicationResult r = run_replication(c, ctx, i);
    if (r.error) o.fail("replication " + std::to_string(i) + " failed: " + *r.error);
    for (const RoundLedger& round : r.ledger) {
      double sum = 0.0;
      for (const auto& rec : round.records) {
        sum += rec.mt;
        if (!rec.active && rec.mt != 0.0) o.fail("deselected client received a transfer");
      }
      worst = std::max(worst, std::abs(sum));
      ++rounds;
    }
  }
  if (worst > 1e-9) o.fail("sum of transfers reached " + fmt(worst));
  const double elapsed = seconds_since(start);
  if (elapsed >= 120.0) o.fail("took " + fmt(elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(rounds) + " rounds, max |sum mt| " + fmt(worst) + ", " +
               fmt(elapsed) + " s";
  }
  return o;
}

// 3. Search restricted to loss-makers finds the global optimum.
Outcome restricted_search() {
  Outcome o;
  Rng rng(20260301);
  std::uniform_real_distribution<double> utility(0.0, 0.3), cost(0.0, 0.25), q(0.0, 1.0);
  std::uniform_real_distribution<double> mu_dist(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    std::vector<ClientRoundInputs> in;
    for (int i = 0; i < n; ++i) in.push_back({client(i), utility(rng), cost(rng), q(rng)});
    const double mu = trial % 20 == 0 ? 0.0 : mu_dist(rng);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t e = 0; e < (std::uint64_t{1} << n); ++e) {
      double welfare = 0.0, qe = 0.0, qr = 0.0;
      int kept = 0;
      for (int i = 0; i < n; ++i) {
        if ((e >> i) & 1U) {
          qe += in[i].q;
        } else {
          welfare += in[i].utility - in[i].cost;
          qr += in[i].q;
          ++kept;
        }
      }
      if (kept == 0 && mu != 0.0) continue;
      double f = welfare;
      if (e != 0 && mu != 0.0) f = qr > 0.0 ? welfare - mu * qe / qr : -std::numeric_limits<double>::infinity();
      best = std::max(best, f);
    }
    const double got = select_active_set(in, mu).objective;
    if (got != best && std::abs(got - best) > 1e-12 * std::max(1.0, std::abs(best))) {
      o.fail("instance " + std::to_string(trial) + ": " + fmt(got) + " vs " + fmt(best));
    }
  }
  if (o.pass) o.detail = "200 instances, |A| <= 10, optima agree";
  return o;
}

// 4. Shapley efficiency, Monte-Carlo accuracy, exhaustive orderings.
Outcome shapley_properties() {
  Outcome o;
  Rng rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto ids = [](int n) {
    std::vector<ClientId> out;
    for (int i = 0; i < n; ++i) out.push_back(client(i));
    return out;
  };
  auto table_v = [](std::vector<double> t) -> CollectiveUtility {
    return [t](std::span<const ClientId> s) {
      std::uint32_t m = 0;
      for (ClientId id : s) m |= 1U << to_int(id);
      return t[m];
    };
  };
  double worst_eff = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 8;
    std::vector<double> t(std::size_t{1} << n);
    for (std::size_t m = 1; m < t.size(); ++m) t[m] = unit(rng);
    auto active = ids(n);
    auto q = shapley_exact(table_v(t), active);
    worst_eff = std::max(worst_eff, std::abs(std::accumulate(q.begin(), q.end(), 0.0) - t.back()));
  }
  if (worst_eff > 1e-9) o.fail("efficiency gap " + fmt(worst_eff));

  double worst_mc = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> w;
    for (int i = 0; i < 5; ++i) w.push_back(unit(rng));
    CollectiveUtility v = [w](std::span<const ClientId> s) {
      double total = 0.0;
      for (ClientId id : s) total += w[static_cast<std::size_t>(to_int(id))];
      return total;
    };
    auto active = ids(5);
    auto exact = shapley_exact(v, active);
    auto mc = shapley_mc(v, active, 2000, rng);
    for (int i = 0; i < 5; ++i) worst_mc = std::max(worst_mc, std::abs(mc[i] - exact[i]));
  }
  if (worst_mc > 0.01) o.fail("Monte-Carlo error " + fmt(worst_mc));

  double worst_perm = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> t(std::size_t{1} << n);
    for (std::size_t m = 1; m < t.size(); ++m) t[m] = unit(rng);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<int>> all;
    do all.push_back(order);
    while (std::next_permutation(order.begin(), order.end()));
    auto active = ids(n);
    auto a = shapley_over_orderings(table_v(t), active, all);
    auto b = shapley_exact(table_v(t), active);
    for (int i = 0; i < n; ++i) worst_perm = std::max(worst_perm, std::abs(a[i] - b[i]));
  }
  if (worst_perm > 1e-12) o.fail("exhaustive orderings differ by " + fmt(worst_perm));
  if (o.pass) {
    o.detail = "efficiency " + fmt(worst_eff) + ", MC " + fmt(worst_mc) + ", orderings " +
               fmt(worst_perm);
  }
  return o;
}

// 5. Cross-entropy gradient against central differences.
Outcome gradient_check() {
  Outcome o;
  Rng rng(55);
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int probe = 0; probe < 20; ++probe) {
    const std::size_t d = 2 + static_cast<std::size_t>(probe % 5);
    const int classes = 2 + probe % 5;
    ParamVector m = init_classifier(d, classes, rng);
    for (double& v : m.layer(layers::kDenseWeight)) v = 0.5 * normal(rng);
    for (double& v : m.layer(layers::kDenseBias)) v = 0.5 * normal(rng);
    std::vector<double> x(d);
    for (double& v : x) v = normal(rng);
    LabeledDataset sample(d, classes);
    sample.append(x, probe % classes);
    ParamVector g = cross_entropy_gradient(m, sample);
    const double h = 1e-5;
    for (const LayerSpan& span : m.layout().spans()) {
      if (span.partition == Partition::kLocal) continue;
      for (std::size_t j = span.offset; j < span.offset + span.size; ++j) {
        ParamVector plus = m, minus = m;
        plus[j] += h;
        minus[j] -= h;
        const double fd = (cross_entropy(plus, sample) - cross_entropy(minus, sample)) / (2 * h);
        const double rel = std::abs(fd - g[j]) / std::max({std::abs(fd), std::abs(g[j]), 1e-3});
        worst = std::max(worst, rel);
      }
    }
  }
  if (worst > 1e-5) o.fail("relative error " + fmt(worst));
  if (o.pass) o.detail = "20 probes, max relative error " + fmt(worst);
  return o;
}

// 6. The label-noise client leaves first.
Outcome label_noise() {
  Outcome o;
  const auto start = Clock::now();
  ScenarioConfig c = preset("label-noise");
  c.run.replications = 100;
  std::vector<double> mus{0.05, 0.1, 0.2};
  const fs::path out = scratch("label_noise");
  nlohmann::json sweep = run_sweep(c, mus, out);
  std::string detail;
  for (std::size_t k = 0; k < mus.size(); ++k) {
    auto means = mean_elimination(build_report(out / sweep["runs"][k]["dir"].get<std::string>()));
    const double clean = *std::min_element(means.begin() + 1, means.end());
    if (!(means[0] < clean && clean - means[0] > 1.0)) {
      o.fail("mu=" + fmt(mus[k]) + ": noisy " + fmt(means[0]) + " vs clean " + fmt(clean));
    }
    detail += (detail.empty() ? "" : ", ") + ("mu=" + fmt(mus[k]) + " " + fmt(means[0]) +
                                               " vs " + fmt(clean));
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 300.0) o.fail("took " + fmt(elapsed) + " s");
  if (o.pass) o.detail = detail + "; " + fmt(elapsed) + " s";
  return o;
}

// 7. Large clients leave first, small clients stay longest.
Outcome client_size() {
  Outcome o;
  std::string detail;
  for (const std::string name : {"homogeneous-large", "homogeneous-small"}) {
    const auto start = Clock::now();
    ScenarioConfig c = preset(name);
    c.run.replications = 100;
    auto means = mean_elimination(run_experiment(c, scratch(name)));
    const double elapsed = seconds_since(start);
    const bool large = name == "homogeneous-large";
    const double others = large ? *std::min_element(means.begin() + 1, means.end())
                                : *std::max_element(means.begin() + 1, means.end());
    const bool ok = large ? means[0] < others : means[0] > others;
    if (!ok) o.fail(name + ": client 0 at " + fmt(means[0]) + ", others " + join(means));
    if (elapsed >= 300.0) o.fail(name + " took " + fmt(elapsed) + " s");
    detail += (detail.empty() ? "" : "; ") + name + " " + join(means);
  }
  if (o.pass) o.detail = detail;
  return o;
}

// 8. Clients stay longer as mu grows.
Outcome leniency() {
  Outcome o;
  ScenarioConfig c = preset("heterogeneous");
  c.run.replications = 100;
  std::vector<double> mus{0.0, 0.05, 0.1, 0.2, 0.5};
  const fs::path out = scratch("leniency");
  nlohmann::json sweep = run_sweep(c, mus, out);
  std::vector<std::vector<double>> means;
  for (const auto& run : sweep["runs"]) {
    means.push_back(mean_elimination(build_report(out / run["dir"].get<std::string>())));
  }
  double worst = 0.0;
  for (std::size_t k = 1; k < means.size(); ++k) {
    for (std::size_t i = 0; i < means[k].size(); ++i) {
      worst = std::max(worst, means[k - 1][i] - means[k][i]);
    }
  }
  if (worst > 0.25) o.fail("largest decrease " + fmt(worst) + " rounds");
  std::string detail;
  for (std::size_t k = 0; k < means.size(); ++k) {
    detail += (detail.empty() ? "" : ", ") + ("mu=" + fmt(mus[k]) + " " + join(means[k]));
  }
  if (o.pass) o.detail = "largest decrease " + fmt(worst) + "; " + detail;
  return o;
}

// 9. mu = 0 is the least-lenient rule and a huge mu never eliminates.
Outcome heuristic_equivalence() {
  Outcome o;
  int compared = 0;
  for (const std::string& name : kNamedPresets) {
    ScenarioConfig objective = preset(name);
    objective.run.replications = std::min(objective.run.replications, 50);
    objective.mechanism.mu = 0.0;
    ScenarioConfig baseline = objective;
    baseline.mechanism.policy = SelectionPolicy::kLeastLenient;
    ScenarioConfig lenient = objective;
    lenient.mechanism.mu = 1e9;
    ScenarioContext ctx = prepare_scenario(objective);
    for (int i = 0; i < objective.run.replications; ++i) {
      ReplicationResult a = run_replication(objective, ctx, i);
      ReplicationResult b = run_replication(baseline, ctx, i);
      bool same = a.ledger.size() == b.ledger.size();
      for (std::size_t t = 0; same && t < a.ledger.size(); ++t) {
        for (std::size_t k = 0; k < a.ledger[t].records.size(); ++k) {
          same = same && a.ledger[t].records[k].active == b.ledger[t].records[k].active;
        }
      }
      if (!same) o.fail(name + " replication " + std::to_string(i) + " differs from least-lenient");

      ReplicationResult l = run_replication(lenient, ctx, i);
      bool all_kept = static_cast<int>(l.ledger.size()) == lenient.federation.rounds;
      for (const auto& round : l.ledger) {
        for (const auto& rec : round.records) all_kept = all_kept && rec.active;
        all_kept = all_kept && round.records.size() == lenient.clients.size();
      }
      if (!all_kept) o.fail(name + " replication " + std::to_string(i) + " eliminated at mu=1e9");
      ++compared;
    }
  }
  if (o.pass) o.detail = std::to_string(compared) + " replications across the named presets";
  return o;
}

std::map<std::string, std::string> csv_files(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[entry.path().filename().string()] = ss.str();
  }
  return out;
}

// 10. Byte-identical outputs for identical seeds.
Outcome determinism() {
  Outcome o;
  std::size_t files = 0;
  std::vector<std::string> names = kNamedPresets;
  names.push_back("heterogeneous-trainer");
  for (const std::string& name : names) {
    ScenarioConfig c = preset(name);
    const fs::path a = scratch(name + "_a"), b = scratch(name + "_b");
    run_experiment(c, a);
    run_experiment(c, b);
    auto fa = csv_files(a), fb = csv_files(b);
    if (fa.empty() || fa != fb) o.fail(name + " outputs differ");
    files += fa.size();
  }
  if (o.pass) o.detail = std::to_string(files) + " CSV files identical across two runs";
  return o;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

// 11. IDX golden fixture and the three rejected inputs.
Outcome idx_parser() {
  Outcome o;
  auto images = [](std::uint32_t magic, std::uint32_t n, std::size_t pixel_bytes) {
    std::vector<std::uint8_t> out;
    put_u32(out, magic);
    put_u32(out, n);
    put_u32(out, 4);
    put_u32(out, 4);
    for (std::size_t i = 0; i < pixel_bytes; ++i) out.push_back(static_cast<std::uint8_t>((i * 37) % 256));
    return out;
  };
  auto labels = [](std::uint32_t magic, std::vector<std::uint8_t> ys) {
    std::vector<std::uint8_t> out;
    put_u32(out, magic);
    put_u32(out, static_cast<std::uint32_t>(ys.size()));
    out.insert(out.end(), ys.begin(), ys.end());
    return out;
  };
  LabeledDataset d = parse_idx(images(kIdxImagesMagic, 2, 32), labels(kIdxLabelsMagic, {5, 9}));
  bool exact = d.rows() == 2 && d.num_features() == 16 && d.label(0) == 5 && d.label(1) == 9;
  for (std::size_t i = 0; exact && i < 32; ++i) {
    exact = d.row(i / 16)[i % 16] == static_cast<double>((i * 37) % 256) / 255.0;
  }
  if (!exact) o.fail("golden fixture mismatch");

  auto expect = [&](const char* what, IdxErrorKind kind, const std::string& field,
                    const std::vector<std::uint8_t>& img, const std::vector<std::uint8_t>& lab) {
    try {
      parse_idx(img, lab);
      o.fail(std::string(what) + " was accepted");
    } catch (const IdxError& e) {
      if (e.kind() != kind || e.field() != field) {
        o.fail(std::string(what) + " raised " + e.field());
      }
    }
  };
  expect("swapped magic", IdxErrorKind::kMagicMismatch, "labels.magic",
         images(kIdxImagesMagic, 2, 32), labels(kIdxImagesMagic, {1, 2}));
  expect("count mismatch", IdxErrorKind::kCountMismatch, "labels.count",
         images(kIdxImagesMagic, 5, 80), labels(kIdxLabelsMagic, {1, 2, 3, 4}));
  expect("truncation", IdxErrorKind::kTruncated, "images.pixels",
         images(kIdxImagesMagic, 2, 30), labels(kIdxLabelsMagic, {1, 2}));
  if (o.pass) o.detail = "golden fixture exact; magic, count and truncation errors raised";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"toy example exactness", toy_example},
      {"budget balance", budget_balance},
      {"restricted search validity", restricted_search},
      {"shapley properties", shapley_properties},
      {"gradient check", gradient_check},
      {"label-noise deselection", label_noise},
      {"client-size asymmetry", client_size},
      {"leniency monotonicity", leniency},
      {"heuristic equivalence", heuristic_equivalence},
      {"determinism", determinism},
      {"idx parser", idx_parser},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
