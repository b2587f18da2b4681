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

#include "fedwelfare/experiment.h"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace fedwelfare {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string rep_prefix(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep_%04d_", index);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(const std::string& text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::runtime_error("bad number in CSV: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text) {
  int v = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::runtime_error("bad integer in CSV: '" + text + "'");
  }
  return v;
}

// Column positions by header name; throws if a required column is missing.
class Table {
 public:
  Table(const std::string& text, std::initializer_list<const char*> required) {
    rows_ = parse_csv(text);
    if (rows_.empty()) throw std::runtime_error("CSV without header");
    for (std::size_t i = 0; i < rows_[0].size(); ++i) columns_[rows_[0][i]] = i;
    for (const char* name : required) {
      if (!columns_.contains(name)) {
        throw std::runtime_error(std::string("CSV lacks column ") + name);
      }
    }
  }

  std::size_t size() const { return rows_.size() - 1; }
  const std::string& at(std::size_t row, const char* column) const {
    return rows_[row + 1].at(columns_.at(column));
  }

 private:
  std::vector<std::vector<std::string>> rows_;
  std::map<std::string, std::size_t> columns_;
};

struct MeanSd {
  std::optional<double> mean;
  std::optional<double> sd;
  int count = 0;
};

// Sample standard deviation; 0 for a single value.
MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  out.count = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  out.mean = mean;
  out.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return out;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void run_one(const ScenarioConfig& config, const ScenarioContext& context,
             int index, const fs::path& out) {
  const std::string prefix = rep_prefix(index);
  try {
    ReplicationResult r = run_replication(config, context, index);
    if (r.error) {
      write_file(out / (prefix + "error.txt"), *r.error + "\n");
      return;
    }
    const double mu = config.mechanism.mu;
    write_file(out / (prefix + "ledger.csv"), ledger_csv(r));
    write_file(out / (prefix + "trace.csv"), trace_csv(r, mu));
    write_file(out / (prefix + "metrics.csv"), metrics_csv(r, mu));
  } catch (const std::exception& e) {
    write_file(out / (prefix + "error.txt"), std::string(e.what()) + "\n");
  }
}

void clear_replication_files(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("rep_")) fs::remove(entry.path());
  }
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string ledger_csv(const ReplicationResult& result) {
  std::string out = "replication,round,client,utility,cost,profit,q,payoff,mt,active\n";
  for (const RoundLedger& round : result.ledger) {
    for (const RoundEconRecord& r : round.records) {
      out += std::to_string(result.replication) + ',' + std::to_string(round.round) +
             ',' + std::to_string(to_int(r.client)) + ',' + format_number(r.utility) +
             ',' + format_number(r.cost) + ',' + format_number(r.profit) + ',' +
             format_number(r.q) + ',' + format_number(r.payoff) + ',' +
             format_number(r.mt) + ',' + (r.active ? "1" : "0") + '\n';
    }
  }
  return out;
}

std::string trace_csv(const ReplicationResult& result, double mu) {
  std::string out =
      "replication,round,candidates-considered,eliminated-ids,objective-value,mu\n";
  for (const SelectionTraceRow& row : result.trace) {
    std::string ids;
    for (ClientId id : row.eliminated) {
      if (!ids.empty()) ids += ';';
      ids += std::to_string(to_int(id));
    }
    out += std::to_string(result.replication) + ',' + std::to_string(row.round) +
           ',' + std::to_string(row.candidates_considered) + ',' + ids + ',' +
           format_number(row.objective) + ',' + format_number(mu) + '\n';
  }
  return out;
}

std::string metrics_csv(const ReplicationResult& result, double mu) {
  std::string out = "replication,round,tsw,tsfi,semantics,mu\n";
  const MetricsSeries& m = result.metrics;
  for (std::size_t i = 0; i < m.rounds.size(); ++i) {
    out += std::to_string(result.replication) + ',' + std::to_string(m.rounds[i]) +
           ',' + format_number(m.tsw[i]) + ',' +
           (m.tsfi[i] ? format_number(*m.tsfi[i]) : std::string("NA")) + ',' +
           to_string(m.semantics) + ',' + format_number(mu) + '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t from = 0;
    while (true) {
      const std::size_t comma = line.find(',', from);
      fields.push_back(line.substr(from, comma - from));
      if (comma == std::string::npos) break;
      from = comma + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

int worker_threads() {
  int n = 0;
  if (const char* env = std::getenv("FEDWELFARE_THREADS")) n = std::atoi(env);
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

json run_experiment(const ScenarioConfig& config, const fs::path& out) {
  const ScenarioContext context = prepare_scenario(config);
  fs::create_directories(out);
  clear_replication_files(out);
  write_file(out / "config.json", to_json(config).dump(2) + "\n");

  const int reps = config.run.replications;
  const int workers = std::min(worker_threads(), reps);
  std::atomic<int> next{0};
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < reps; i = next++) run_one(config, context, i, out);
      });
    }
  }

  json report = build_report(out);
  write_file(out / "report.json", report.dump(2) + "\n");
  return report;
}

json build_report(const fs::path& dir) {
  const ScenarioConfig config = parse_config(json::parse(read_file(dir / "config.json")));
  const int rounds = config.federation.rounds;
  const int requested = config.run.replications;
  const std::size_t n_clients = config.clients.size();

  std::vector<std::vector<double>> elimination(n_clients);
  std::vector<int> never(n_clients, 0);
  std::vector<std::vector<double>> tsw(static_cast<std::size_t>(rounds));
  std::vector<std::vector<double>> tsfi(static_cast<std::size_t>(rounds));
  std::vector<int> failed;
  int succeeded = 0;

  for (int rep = 0; rep < requested; ++rep) {
    const std::string prefix = rep_prefix(rep);
    if (fs::exists(dir / (prefix + "error.txt"))) {
      failed.push_back(rep);
      continue;
    }
    if (!fs::exists(dir / (prefix + "ledger.csv"))) {
      failed.push_back(rep);
      continue;
    }
    ++succeeded;

    Table ledger(read_file(dir / (prefix + "ledger.csv")), {"round", "client", "active"});
    std::vector<int> out_round(n_clients, rounds + 1);
    for (std::size_t r = 0; r < ledger.size(); ++r) {
      if (ledger.at(r, "active") != "0") continue;
      const int id = parse_int(ledger.at(r, "client"));
      for (std::size_t c = 0; c < n_clients; ++c) {
        if (to_int(config.clients[c].id) == id) {
          out_round[c] = std::min(out_round[c], parse_int(ledger.at(r, "round")));
        }
      }
    }
    for (std::size_t c = 0; c < n_clients; ++c) {
      elimination[c].push_back(out_round[c]);
      if (out_round[c] > rounds) ++never[c];
    }

    // Trajectories hold their last value once the federation has ended.
    Table metrics(read_file(dir / (prefix + "metrics.csv")), {"round", "tsw", "tsfi"});
    std::vector<std::optional<double>> w(static_cast<std::size_t>(rounds));
    std::vector<std::optional<double>> f(static_cast<std::size_t>(rounds));
    for (std::size_t r = 0; r < metrics.size(); ++r) {
      const int t = parse_int(metrics.at(r, "round"));
      if (t < 1 || t > rounds) throw std::runtime_error("metrics round out of range");
      const auto i = static_cast<std::size_t>(t - 1);
      w[i] = parse_number(metrics.at(r, "tsw"));
      const std::string& fi = metrics.at(r, "tsfi");
      f[i] = fi == "NA" ? std::nullopt : std::optional<double>(parse_number(fi));
    }
    std::optional<double> last_w = 0.0;
    std::optional<double> last_f;
    bool ended = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i]) ended = true;
      if (!ended) {
        last_w = w[i];
        last_f = f[i];
      }
      tsw[i].push_back(*last_w);
      if (last_f) tsfi[i].push_back(*last_f);
    }
  }

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["scenario"] = config.name;
  report["mu"] = config.mechanism.mu;
  report["tsfi_semantics"] = to_string(config.mechanism.tsfi);
  report["rounds"] = rounds;
  report["replications"] = {{"requested", requested},
                            {"succeeded", succeeded},
                            {"failed", failed.size()},
                            {"failed_indices", failed}};
  json clients = json::array();
  for (std::size_t c = 0; c < n_clients; ++c) {
    const MeanSd s = mean_sd(elimination[c]);
    clients.push_back({{"client", to_int(config.clients[c].id)},
                       {"mean", opt(s.mean)},
                       {"sd", opt(s.sd)},
                       {"never_eliminated", never[c]}});
  }
  report["elimination_round"] = clients;
  json tsw_mean = json::array(), tsw_sd = json::array();
  json tsfi_mean = json::array(), tsfi_sd = json::array(), tsfi_n = json::array();
  for (std::size_t i = 0; i < tsw.size(); ++i) {
    const MeanSd a = mean_sd(tsw[i]);
    tsw_mean.push_back(opt(a.mean));
    tsw_sd.push_back(opt(a.sd));
    const MeanSd b = mean_sd(tsfi[i]);
    tsfi_mean.push_back(opt(b.mean));
    tsfi_sd.push_back(opt(b.sd));
    tsfi_n.push_back(b.count);
  }
  report["tsw"] = {{"mean", tsw_mean}, {"sd", tsw_sd}};
  report["tsfi"] = {{"mean", tsfi_mean}, {"sd", tsfi_sd}, {"defined", tsfi_n}};
  return report;
}

json run_sweep(const ScenarioConfig& config, std::span<const double> mus,
               const fs::path& out) {
  fs::create_directories(out);
  json runs = json::array();
  for (double mu : mus) {
    ScenarioConfig c = config;
    c.mechanism.mu = mu;
    const std::string name = "mu_" + format_number(mu);
    json report = run_experiment(c, out / name);
    json final_tsw = report["tsw"]["mean"].empty() ? json(nullptr)
                                                   : report["tsw"]["mean"].back();
    json final_tsfi = report["tsfi"]["mean"].empty() ? json(nullptr)
                                                     : report["tsfi"]["mean"].back();
    runs.push_back({{"mu", mu},
                    {"dir", name},
                    {"replications", report["replications"]},
                    {"elimination_round", report["elimination_round"]},
                    {"final_tsw_mean", final_tsw},
                    {"final_tsfi_mean", final_tsfi}});
  }
  json sweep = {{"schema_version", kReportSchemaVersion},
                {"scenario", config.name},
                {"runs", runs}};
  write_file(out / "sweep.json", sweep.dump(2) + "\n");
  return sweep;
}

namespace {

constexpr double kWidth = 640, kHeight = 360, kMargin = 48;

std::string svg_open(const std::string& title) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\">\n"
                "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n",
                kWidth, kHeight);
  return std::string(buf) + "<text x=\"" + format_number(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\">" + title +
         "</text>\n";
}

std::string axes(double lo, double hi) {
  std::string s;
  const double x0 = kMargin, y0 = kHeight - kMargin;
  s += "<line x1=\"" + format_number(x0) + "\" y1=\"" + format_number(y0) + "\" x2=\"" +
       format_number(kWidth - kMargin) + "\" y2=\"" + format_number(y0) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + format_number(x0) + "\" y1=\"" + format_number(kMargin) +
       "\" x2=\"" + format_number(x0) + "\" y2=\"" + format_number(y0) +
       "\" stroke=\"black\"/>\n";
  s += "<text x=\"4\" y=\"" + format_number(y0) + "\" font-size=\"10\">" +
       format_number(lo) + "</text>\n";
  s += "<text x=\"4\" y=\"" + format_number(kMargin) + "\" font-size=\"10\">" +
       format_number(hi) + "</text>\n";
  return s;
}

std::string line_chart(const std::string& title, const json& values) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_null()) pts.emplace_back(i + 1.0, values[i].get<double>());
  }
  double lo = 0.0, hi = 1.0;
  for (const auto& [x, y] : pts) {
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  const double n = std::max<double>(static_cast<double>(values.size()), 2.0);
  std::string s = svg_open(title) + axes(lo, hi);
  std::string path;
  for (const auto& [x, y] : pts) {
    const double px = kMargin + (x - 1.0) / (n - 1.0) * (kWidth - 2 * kMargin);
    const double py = kHeight - kMargin - (y - lo) / (hi - lo) * (kHeight - 2 * kMargin);
    path += format_number(px) + "," + format_number(py) + " ";
  }
  s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" +
       path + "\"/>\n</svg>\n";
  return s;
}

std::string bar_chart(const std::string& title, const json& clients, int rounds) {
  const double hi = rounds + 1.0;
  std::string s = svg_open(title) + axes(0.0, hi);
  const double slot = (kWidth - 2 * kMargin) / std::max<double>(1.0, clients.size());
  for (std::size_t i = 0; i < clients.size(); ++i) {
    const json& mean = clients[i]["mean"];
    const double v = mean.is_null() ? 0.0 : mean.get<double>();
    const double h = v / hi * (kHeight - 2 * kMargin);
    const double x = kMargin + i * slot + slot * 0.15;
    s += "<rect x=\"" + format_number(x) + "\" y=\"" +
         format_number(kHeight - kMargin - h) + "\" width=\"" +
         format_number(slot * 0.7) + "\" height=\"" + format_number(h) +
         "\" fill=\"steelblue\"/>\n";
    s += "<text x=\"" + format_number(x + slot * 0.35) + "\" y=\"" +
         format_number(kHeight - kMargin + 16) +
         "\" text-anchor=\"middle\" font-size=\"11\">C" +
         std::to_string(clients[i]["client"].get<int>()) + "</text>\n";
  }
  return s + "</svg>\n";
}

}  // namespace

void write_svg_charts(const json& report, const fs::path& dir) {
  write_file(dir / "tsw.svg", line_chart("mean TSW", report["tsw"]["mean"]));
  write_file(dir / "tsfi.svg", line_chart("mean TSFI", report["tsfi"]["mean"]));
  write_file(dir / "elimination.svg",
             bar_chart("mean elimination round", report["elimination_round"],
                       report["rounds"].get<int>()));
}

}  // namespace fedwelfare
