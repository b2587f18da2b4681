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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "fedwelfare/config.h"
#include "fedwelfare/data.h"
#include "fedwelfare/experiment.h"
#include "fedwelfare/federation.h"
#include "fedwelfare/idx.h"
#include "fedwelfare/replication.h"
#include "fedwelfare/toy_example.h"

namespace fedwelfare {
namespace {

namespace fs = std::filesystem;

const fs::path kPresets = FEDWELFARE_PRESET_DIR;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fedwelfare_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::vector<std::uint8_t> idx_images(std::uint32_t magic, std::uint32_t n,
                                     const std::vector<std::uint8_t>& pixels) {
  std::vector<std::uint8_t> out;
  put_u32(out, magic);
  put_u32(out, n);
  put_u32(out, 4);
  put_u32(out, 4);
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

std::vector<std::uint8_t> idx_labels(std::uint32_t magic,
                                     const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  put_u32(out, magic);
  put_u32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

std::vector<std::uint8_t> golden_pixels() {
  std::vector<std::uint8_t> px(32);
  for (std::size_t i = 0; i < 16; ++i) px[i] = static_cast<std::uint8_t>(i * 17);
  for (std::size_t i = 0; i < 16; ++i) px[16 + i] = (i % 5 == 0) ? 255 : 0;
  return px;
}

TEST_CASE("poisson arrivals concentrate around lambda") {
  Rng rng(17);
  double sum = 0.0, sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(sample_arrivals(100.0, rng));
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = (sq - n * mean * mean) / (n - 1);
  CHECK(mean >= 97);
  CHECK(mean <= 103);
  CHECK(var >= 90);
  CHECK(var <= 110);

  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(sample_arrivals(50, a) == sample_arrivals(50, b));
  CHECK_THROWS_AS(sample_arrivals(0.0, a), ValidationError);
}

TEST_CASE("label corruption rate and definition") {
  Rng rng(18);
  SyntheticTask task = make_synthetic_task(10, 4, 2.0, rng);
  SyntheticClient noisy;
  noisy.label_noise = 0.3;
  std::vector<int> truth;
  LabeledDataset d = generate_synthetic_data(task, noisy, 10000, rng, &truth);
  int flipped = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) flipped += d.label(i) != truth[i];
  CHECK(flipped / 10000.0 >= 0.28);
  CHECK(flipped / 10000.0 <= 0.32);

  SyntheticClient always;
  always.label_noise = 1.0;
  SyntheticTask three = make_synthetic_task(3, 2, 2.0, rng);
  LabeledDataset all = generate_synthetic_data(three, always, 2000, rng, &truth);
  for (std::size_t i = 0; i < all.rows(); ++i) CHECK(all.label(i) != truth[i]);
}

TEST_CASE("homogeneous clients draw identical batches from the same stream") {
  Rng rng(19);
  SyntheticTask task = make_synthetic_task(5, 3, 2.0, rng);
  Rng a(100), b(100);
  LabeledDataset x = generate_synthetic_data(task, {}, 50, a);
  LabeledDataset y = generate_synthetic_data(task, {}, 50, b);
  CHECK(x.features() == y.features());
  CHECK(x.labels() == y.labels());
}

TEST_CASE("validation gets the rounded-up 30 percent") {
  CHECK(validation_share(0) == 0);
  CHECK(validation_share(1) == 1);
  CHECK(validation_share(10) == 3);
  CHECK(validation_share(11) == 4);
  CHECK(validation_share(100) == 30);
  for (long n = 1; n < 500; ++n) {
    CHECK(validation_share(n) == static_cast<long>(std::ceil(0.3 * static_cast<double>(n) - 1e-9)));
  }
  Rng rng(20);
  SyntheticTask task = make_synthetic_task(3, 2, 2.0, rng);
  ArrivalSplit s = split_arrivals(generate_synthetic_data(task, {}, 1, rng));
  CHECK(s.train.rows() == 0);
  CHECK(s.validation.rows() == 1);
}

TEST_CASE("idx golden fixture parses exactly") {
  auto images = idx_images(kIdxImagesMagic, 2, golden_pixels());
  auto labels = idx_labels(kIdxLabelsMagic, {7, 1});
  LabeledDataset d = parse_idx(images, labels);
  REQUIRE(d.rows() == 2);
  CHECK(d.num_features() == 16);
  CHECK(d.label(0) == 7);
  CHECK(d.label(1) == 1);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(d.row(0)[i] == static_cast<double>(i * 17) / 255.0);
    CHECK(d.row(1)[i] == (i % 5 == 0 ? 1.0 : 0.0));
  }
}

TEST_CASE("idx files load from disk") {
  const fs::path dir = scratch("idx");
  fs::create_directories(dir);
  auto images = idx_images(kIdxImagesMagic, 2, golden_pixels());
  auto labels = idx_labels(kIdxLabelsMagic, {3, 4});
  std::ofstream(dir / "img", std::ios::binary)
      .write(reinterpret_cast<const char*>(images.data()), static_cast<std::streamsize>(images.size()));
  std::ofstream(dir / "lab", std::ios::binary)
      .write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
  LabeledDataset d = load_idx(dir / "img", dir / "lab");
  CHECK(d.labels() == std::vector<int>{3, 4});
  CHECK(d.row(0)[15] == 1.0);
  try {
    load_idx(dir / "missing", dir / "lab");
    FAIL("expected an error");
  } catch (const IdxError& e) {
    CHECK(e.kind() == IdxErrorKind::kIo);
  }
}

IdxError parse_error(const std::vector<std::uint8_t>& images,
                     const std::vector<std::uint8_t>& labels) {
  try {
    parse_idx(images, labels);
  } catch (const IdxError& e) {
    return e;
  }
  FAIL("expected an IdxError");
  return IdxError(IdxErrorKind::kIo, "", "");
}

TEST_CASE("idx negative cases name the offending field") {
  auto good_images = idx_images(kIdxImagesMagic, 2, golden_pixels());
  auto swapped = parse_error(good_images, idx_labels(kIdxImagesMagic, {1, 2}));
  CHECK(swapped.kind() == IdxErrorKind::kMagicMismatch);
  CHECK(swapped.field() == "labels.magic");

  std::vector<std::uint8_t> five(5 * 16, 9);
  auto counts = parse_error(idx_images(kIdxImagesMagic, 5, five), idx_labels(kIdxLabelsMagic, {1, 2, 3, 4}));
  CHECK(counts.kind() == IdxErrorKind::kCountMismatch);
  CHECK(counts.field() == "labels.count");

  auto cut = good_images;
  cut.resize(cut.size() - 3);
  auto truncated = parse_error(cut, idx_labels(kIdxLabelsMagic, {1, 2}));
  CHECK(truncated.kind() == IdxErrorKind::kTruncated);
  CHECK(truncated.field() == "images.pixels");

  auto bad_label = parse_error(good_images, idx_labels(kIdxLabelsMagic, {1, 12}));
  CHECK(bad_label.kind() == IdxErrorKind::kBadLabel);
}

TEST_CASE("shipped presets parse and validate") {
  for (const char* name : {"heterogeneous", "homogeneous-large", "homogeneous-small",
                           "label-noise", "toy-example", "heterogeneous-trainer"}) {
    CAPTURE(name);
    ScenarioConfig c = load_config(kPresets / (std::string(name) + ".json"));
    CHECK(c.name == name);
    CHECK_NOTHROW(validate(c));
    CHECK(to_json(parse_config(to_json(c))) == to_json(c));
  }
}

TEST_CASE("toy preset file matches the built-in toy example") {
  CHECK(to_json(load_config(kPresets / "toy-example.json")) == to_json(toy_example_config(0.1)));
}

TEST_CASE("configs reject unknown keys and invalid values") {
  const nlohmann::json base = to_json(toy_example_config());
  auto with = [&](const std::string& pointer, const nlohmann::json& value) {
    nlohmann::json doc = base;
    doc[nlohmann::json::json_pointer(pointer)] = value;
    return doc;
  };
  CHECK_THROWS_AS(parse_config(with("/colour", 1)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/federation/round", 3)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/clients/0/lamda", 3)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/mechanism/contribution/kind", "banzhaf")), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/clients/0/lambda", 0)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/clients/0/label_noise", 1.5)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/federation/rounds", 0)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/run/replications", 0)), ConfigError);
  CHECK_THROWS_AS(parse_config(with("/clients/1/id", 1)), ConfigError);
}

TEST_CASE("label noise lowers the default oracle quality") {
  ScenarioConfig c = load_config(kPresets / "label-noise.json");
  CHECK(c.clients[0].oracle.quality == doctest::Approx(1 - 0.3 * 10 / 9.0));
  CHECK(c.clients[1].oracle.quality == 1.0);
}

TEST_CASE("toy replication reproduces the worked ledger") {
  ScenarioConfig c = toy_example_config(0.2);
  ReplicationResult r = run_replication(c, prepare_scenario(c), 0);
  REQUIRE(!r.error);
  REQUIRE(r.ledger.size() == 2);
  const auto& r1 = r.ledger[0].records;
  CHECK(r1[0].profit == doctest::Approx(0.1));
  CHECK(r1[0].payoff == doctest::Approx(0.16));
  CHECK(r1[2].mt == doctest::Approx(-0.09));
  const auto& r2 = r.ledger[1].records;
  CHECK(r2[1].active == false);
  CHECK(r2[1].mt == 0.0);
  CHECK(r.elimination_round == std::vector<int>{3, 2, 3});
  CHECK(r.metrics.tsw.back() == doctest::Approx(0.5));
  CHECK(*r.metrics.tsfi.back() == doctest::Approx(0.85));
}

ScenarioConfig small(const std::string& preset, int reps) {
  ScenarioConfig c = load_config(kPresets / (preset + ".json"));
  c.run.replications = reps;
  return c;
}

void check_consistent(const ScenarioConfig& c, const ReplicationResult& r) {
  CHECK(static_cast<int>(r.ledger.size()) <= c.federation.rounds);
  std::vector<bool> active(c.clients.size(), true);
  for (const RoundLedger& round : r.ledger) {
    // Only members of A(t-1) appear, and A(t) shrinks monotonically.
    std::size_t k = 0;
    for (std::size_t i = 0; i < c.clients.size(); ++i) {
      if (!active[i]) continue;
      REQUIRE(k < round.records.size());
      CHECK(round.records[k].client == c.clients[i].id);
      if (!round.records[k].active) {
        active[i] = false;
        CHECK(r.elimination_round[i] == round.round);
      }
      ++k;
    }
    CHECK(k == round.records.size());
  }
  for (std::size_t i = 0; i < c.clients.size(); ++i) {
    if (active[i]) CHECK(r.elimination_round[i] == c.federation.rounds + 1);
  }
  // Nothing is recorded after the federation shrinks to one client.
  for (std::size_t t = 0; t + 1 < r.ledger.size(); ++t) {
    int left = 0;
    for (const auto& rec : r.ledger[t].records) left += rec.active;
    CHECK(left > 1);
  }
}

TEST_CASE("replications are internally consistent on every backend") {
  for (const char* preset : {"heterogeneous", "label-noise", "homogeneous-large",
                             "heterogeneous-trainer"}) {
    CAPTURE(preset);
    ScenarioConfig c = small(preset, 5);
    ScenarioContext ctx = prepare_scenario(c);
    for (int i = 0; i < 5; ++i) {
      ReplicationResult r = run_replication(c, ctx, i);
      REQUIRE(!r.error);
      check_consistent(c, r);
    }
  }
}

TEST_CASE("replication results are deterministic and isolated by index") {
  ScenarioConfig c = small("heterogeneous-trainer", 3);
  ScenarioContext ctx = prepare_scenario(c);
  const std::string once = ledger_csv(run_replication(c, ctx, 2));
  const std::string twice = ledger_csv(run_replication(c, ctx, 2));
  CHECK(once == twice);
  // Replication 2 does not depend on how many others exist.
  ScenarioConfig more = c;
  more.run.replications = 50;
  CHECK(ledger_csv(run_replication(more, prepare_scenario(more), 2)) == once);
  CHECK(ledger_csv(run_replication(c, ctx, 1)) != once);
}

TEST_CASE("mu zero follows the least-lenient rule in every round") {
  for (const char* preset : {"heterogeneous", "heterogeneous-trainer"}) {
    ScenarioConfig c = small(preset, 4);
    c.mechanism.mu = 0.0;
    ScenarioContext ctx = prepare_scenario(c);
    for (int i = 0; i < 4; ++i) {
      ReplicationResult r = run_replication(c, ctx, i);
      for (const RoundLedger& round : r.ledger) {
        for (const auto& rec : round.records) CHECK(rec.active == (rec.profit >= 0.0));
      }
    }
  }
}

TEST_CASE("quantitative contributions follow arrival rates") {
  ScenarioConfig c = small("homogeneous-large", 100);
  c.mechanism.contribution.kind = ContributionKind::kQuantitative;
  c.mechanism.mu = 1e9;
  c.federation.rounds = 1;
  ScenarioContext ctx = prepare_scenario(c);
  double big = 0.0, others = 0.0;
  for (int i = 0; i < 100; ++i) {
    ReplicationResult r = run_replication(c, ctx, i);
    big += r.ledger[0].records[0].q;
    for (std::size_t k = 1; k < r.ledger[0].records.size(); ++k) {
      others += r.ledger[0].records[k].q / 4.0;
    }
  }
  CHECK(big / others == doctest::Approx(5.0).epsilon(0.1));
}

TEST_CASE("a noisy client's marginal contribution is below the clean clients'") {
  ScenarioConfig c = small("label-noise", 100);
  c.mechanism.mu = 1e9;
  ScenarioContext ctx = prepare_scenario(c);
  std::vector<double> q(5, 0.0);
  for (int i = 0; i < 100; ++i) {
    ReplicationResult r = run_replication(c, ctx, i);
    for (const auto& round : r.ledger) {
      for (std::size_t k = 0; k < 5; ++k) q[k] += round.records[k].q;
    }
  }
  CHECK(q[0] < *std::min_element(q.begin() + 1, q.end()));
}

TEST_CASE("coalition accuracy of the full set is the post-aggregation accuracy") {
  Rng rng(71);
  SyntheticTask task = make_synthetic_task(4, 5, 2.0, rng);
  std::vector<LabeledDataset> train, val;
  std::vector<Rng> rngs;
  for (int i = 0; i < 3; ++i) {
    ArrivalSplit s = split_arrivals(generate_synthetic_data(task, {}, 80 + 20 * i, rng));
    train.push_back(s.train);
    val.push_back(s.validation);
    rngs.emplace_back(500 + static_cast<std::uint64_t>(i));
  }
  ParamVector init = init_classifier(5, 4, rng);
  std::vector<ClientSite> sites;
  for (std::size_t i = 0; i < 3; ++i) {
    sites.push_back({client(static_cast<int>(i)), &train[i], &val[i], init, &rngs[i]});
  }
  SharingRoundOptions opt;
  SharingRoundResult round = run_sharing_round(sites, opt);
  std::vector<std::size_t> all{0, 1, 2};
  double mean = 0.0;
  for (double a : round.accuracy) mean += a / 3.0;
  CHECK(std::abs(coalition_accuracy(round, sites, all, opt.mode) - mean) < 1e-12);

  // A singleton scores that client's local model on every validation set.
  std::vector<std::size_t> one{1};
  double single = 0.0;
  for (const auto& v : val) single += evaluate_accuracy(round.local_models[1], v) / 3.0;
  CHECK(coalition_accuracy(round, sites, one, opt.mode) == doctest::Approx(single));
}

TEST_CASE("csv formatting") {
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.5e-7) == "-2.5e-07");
  auto rows = parse_csv("a,b,c\n1,,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"1", "", "3"});
}

TEST_CASE("experiment writes csvs whose re-aggregation reproduces the report") {
  const fs::path out = scratch("experiment");
  ScenarioConfig c = small("label-noise", 12);
  nlohmann::json report = run_experiment(c, out);
  CHECK(report["schema_version"] == kReportSchemaVersion);
  CHECK(report["replications"]["succeeded"] == 12);
  CHECK(build_report(out) == report);
  CHECK(nlohmann::json::parse(slurp(out / "report.json")) == report);

  const std::string ledger = slurp(out / "rep_0003_ledger.csv");
  CHECK(ledger.starts_with("replication,round,client,utility,cost,profit,q,payoff,mt,active\n"));
  CHECK(ledger.find('\r') == std::string::npos);
  CHECK(slurp(out / "rep_0003_trace.csv")
            .starts_with("replication,round,candidates-considered,eliminated-ids,objective-value,mu\n"));
  CHECK(slurp(out / "rep_0003_metrics.csv").starts_with("replication,round,tsw,tsfi,semantics,mu\n"));

  // Elimination rounds in the report agree with the in-memory results.
  ScenarioContext ctx = prepare_scenario(c);
  std::vector<double> mean(5, 0.0);
  for (int i = 0; i < 12; ++i) {
    ReplicationResult r = run_replication(c, ctx, i);
    for (std::size_t k = 0; k < 5; ++k) mean[k] += r.elimination_round[k] / 12.0;
  }
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(report["elimination_round"][k]["mean"].get<double>() == doctest::Approx(mean[k]));
  }
}

TEST_CASE("worker count does not change the output") {
  ScenarioConfig c = small("heterogeneous-trainer", 6);
  const fs::path a = scratch("threads_a"), b = scratch("threads_b");
  setenv("FEDWELFARE_THREADS", "1", 1);
  run_experiment(c, a);
  setenv("FEDWELFARE_THREADS", "4", 1);
  CHECK(worker_threads() == 4);
  run_experiment(c, b);
  unsetenv("FEDWELFARE_THREADS");
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".csv") || name == "report.json") {
      CHECK(slurp(entry.path()) == slurp(b / name));
    }
  }
}

TEST_CASE("failed replications are reported and excluded") {
  const fs::path out = scratch("failures");
  ScenarioConfig c = small("heterogeneous", 4);
  run_experiment(c, out);
  fs::remove(out / "rep_0001_ledger.csv");
  std::ofstream(out / "rep_0001_error.txt") << "injected failure\n";
  nlohmann::json r = build_report(out);
  CHECK(r["replications"]["succeeded"] == 3);
  CHECK(r["replications"]["failed"] == 1);
  CHECK(r["replications"]["failed_indices"] == nlohmann::json::array({1}));
}

TEST_CASE("sweep writes one directory per mu and svg charts render") {
  const fs::path out = scratch("sweep");
  ScenarioConfig c = small("heterogeneous", 3);
  std::vector<double> mus{0.0, 0.5};
  nlohmann::json s = run_sweep(c, mus, out);
  CHECK(s["runs"].size() == 2);
  CHECK(fs::exists(out / "mu_0" / "report.json"));
  CHECK(fs::exists(out / "mu_0.5" / "report.json"));
  CHECK(fs::exists(out / "sweep.json"));
  write_svg_charts(build_report(out / "mu_0"), out / "mu_0");
  CHECK(slurp(out / "mu_0" / "tsw.svg").starts_with("<svg"));
  CHECK(fs::exists(out / "mu_0" / "elimination.svg"));
}

}  // namespace
}  // namespace fedwelfare
