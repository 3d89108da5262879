// Copyright 2026 The Learnprof Authors
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

// learnprof command-line front end. Talks to the library through the C API
// only.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "learnprof/learnprof.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

// Thrown for failures that should end the command with a message.
struct Failure {
  int exit_code;
  std::string message;
};

struct CString {
  char* p = nullptr;
  ~CString() { lp_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& o) noexcept : p(o.p) { o.p = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  ~Handle() { Free(p); }
  T** out() { return &p; }
};

using Dataset = Handle<lp_dataset, lp_dataset_free>;
using Store = Handle<lp_store, lp_store_free>;
using Service = Handle<lp_service, lp_service_free>;

void check(lp_status s, const std::string& what) {
  if (s == LP_OK) return;
  const int code = (s == LP_ERR_INVALID_ARGUMENT) ? kExitUsage : kExitFailure;
  throw Failure{code, what + ": " + lp_status_name(s) + ": " + lp_last_error()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Failure{kExitFailure, "cannot read " + p.string()};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure{kExitFailure, "cannot write " + p.string()};
  out << content;
}

std::string pretty(const std::string& compact) { return json::parse(compact).dump(2) + "\n"; }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- Configuration -------------------------------------------------------

struct ProjectConfig {
  std::string book_root = "book";
  std::string quiz_dir;    // defaults to <bookRoot>/quizzes
  std::string output_dir = "out";
  std::string telemetry_url;
  std::string export_token_env = "LEARNPROF_EXPORT_TOKEN";
  std::uint64_t seed = 7;
};

ProjectConfig load_config(const std::string& path, bool required) {
  ProjectConfig cfg;
  if (!fs::exists(path)) {
    if (required) throw Failure{kExitUsage, "config file " + path + " not found"};
    return cfg;
  }
  CString out;
  check(lp_toml_to_json(read_file(path).c_str(), out.out()), path);
  const json j = json::parse(out.str());
  cfg.book_root = j.value("bookRoot", cfg.book_root);
  cfg.quiz_dir = j.value("quizDir", cfg.quiz_dir);
  cfg.output_dir = j.value("outputDir", cfg.output_dir);
  cfg.telemetry_url = j.value("telemetryUrl", cfg.telemetry_url);
  cfg.export_token_env = j.value("exportToken", cfg.export_token_env);
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  return cfg;
}

std::string quiz_dir_of(const ProjectConfig& cfg) {
  return cfg.quiz_dir.empty() ? (fs::path(cfg.book_root) / "quizzes").string() : cfg.quiz_dir;
}

std::optional<std::string> export_token(const ProjectConfig& cfg) {
  if (const char* v = std::getenv(cfg.export_token_env.c_str()); v != nullptr && *v != '\0') {
    return std::string(v);
  }
  return std::nullopt;
}

// ---- Shared inputs -------------------------------------------------------

struct DataInputs {
  std::string export_path;
  std::vector<std::string> manifests;
  bool all_readers = false;
  std::string out_dir;  // also searched for manifest.json
};

void add_data_options(CLI::App* cmd, DataInputs& in) {
  cmd->add_option("--export", in.export_path, "Event export (NDJSON)")->required();
  cmd->add_option("--manifest", in.manifests,
                  "Book manifest(s); the first is the current book (default <outputDir>/manifest.json)");
}

std::string manifests_json(const DataInputs& in, const ProjectConfig& cfg) {
  std::vector<std::string> paths = in.manifests;
  if (paths.empty()) {
    fs::path fallback = fs::path(cfg.output_dir) / "manifest.json";
    if (!in.out_dir.empty() && fs::exists(fs::path(in.out_dir) / "manifest.json")) {
      fallback = fs::path(in.out_dir) / "manifest.json";
    }
    paths.push_back(fallback.string());
  }
  json arr = json::array();
  for (const auto& p : paths) arr.push_back(json::parse(read_file(p)));
  return arr.dump();
}

struct Loaded {
  Dataset first;   // first attempts of every reader
  json load_stats;
};

Loaded load_first_attempts(const DataInputs& in, const ProjectConfig& cfg) {
  const std::string text = read_file(in.export_path);
  const std::string manifests = manifests_json(in, cfg);
  Dataset all;
  CString stats;
  check(lp_dataset_load(text.data(), text.size(), manifests.c_str(), all.out(), stats.out()),
        "loading " + in.export_path);
  Loaded out;
  check(lp_dataset_first_attempts(all.p, out.first.out()), "first attempts");
  out.load_stats = json::parse(stats.str());
  return out;
}

// First attempts restricted to triers unless every reader is requested.
Dataset analysis_set(const DataInputs& in, const ProjectConfig& cfg) {
  Loaded l = load_first_attempts(in, cfg);
  if (in.all_readers) return std::move(l.first);
  Dataset triers;
  check(lp_dataset_triers(l.first.p, triers.out()), "selecting triers");
  return triers;
}

// ---- Subcommands ---------------------------------------------------------

struct Globals {
  unsigned threads = 1;
  bool json_out = false;
  bool stamp = false;
  std::string config_path = "learnprof.toml";
  bool config_given = false;
};

int run_validate(const Globals& g, const std::vector<std::string>& targets,
                 const std::string& oracle) {
  json paths = json::array();
  for (const auto& t : targets) {
    if (fs::is_directory(t)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(t)) {
        if (e.is_regular_file() && e.path().extension() == ".toml") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      for (auto& f : found) paths.push_back(f);
    } else if (fs::exists(t)) {
      paths.push_back(t);
    } else {
      throw Failure{kExitUsage, "no such file or directory: " + t};
    }
  }
  CString reports;
  int has_errors = 0;
  check(lp_validate_files(paths.dump().c_str(), oracle.empty() ? nullptr : oracle.c_str(),
                          reports.out(), &has_errors),
        "validate");
  const json r = json::parse(reports.str());
  if (g.json_out) {
    std::cout << r.dump(2) << "\n";
  } else {
    for (const auto& rep : r) {
      std::cout << rep["path"].get<std::string>() << ": " << rep["text"].get<std::string>();
      if (!rep["text"].get<std::string>().empty() && rep["text"].get<std::string>().back() != '\n') {
        std::cout << "\n";
      }
    }
    std::cout << paths.size() << " file(s) checked, " << (has_errors ? "errors found" : "no errors")
              << "\n";
  }
  return has_errors ? kExitFailure : kExitOk;
}

int run_build(const Globals& g, const ProjectConfig& cfg, const std::string& commit,
              const std::string& oracle) {
  json c{{"bookRoot", cfg.book_root}, {"quizDir", quiz_dir_of(cfg)}, {"outputDir", cfg.output_dir}};
  if (!commit.empty()) c["commitHash"] = commit;
  if (!oracle.empty()) c["oracleCommand"] = oracle;
  CString result;
  int ok = 0;
  check(lp_book_build(c.dump().c_str(), result.out(), &ok), "build");
  const json r = json::parse(result.str());
  if (g.json_out) {
    std::cout << r.dump(2) << "\n";
  } else {
    for (const auto& e : r["errors"]) std::cerr << "error: " << e.get<std::string>() << "\n";
    for (const auto& rep : r["reports"]) {
      const auto text = rep.value("text", std::string());
      if (!rep["findings"].empty()) std::cerr << text << (text.back() == '\n' ? "" : "\n");
    }
    if (ok) {
      std::cout << "built " << r["manifest"]["chapters"].size() << " chapter(s), "
                << r["manifest"]["quizzes"].size() << " quiz(zes) into " << cfg.output_dir << "\n";
    }
  }
  return ok ? kExitOk : kExitFailure;
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

int run_serve(const ProjectConfig& cfg, const std::string& store_path, const std::string& host,
              int port, const std::vector<std::string>& manifests) {
  Store store;
  check(lp_store_open(store_path.c_str(), store.out()), "opening store");
  json arr = json::array();
  for (const auto& m : manifests) arr.push_back(json::parse(read_file(m)));
  const auto token = export_token(cfg);
  if (!token) {
    std::cerr << "warning: " << cfg.export_token_env << " is unset; export is disabled\n";
  }
  Service service;
  check(lp_service_create(store.p, token ? token->c_str() : nullptr,
                          manifests.empty() ? nullptr : arr.dump().c_str(), service.out()),
        "creating service");
  lp_server* server = nullptr;
  int bound = 0;
  check(lp_server_start(service.p, host.c_str(), port, &server, &bound), "starting server");
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on http://" << host << ":" << bound << " (" << lp_store_size(store.p)
            << " stored events)" << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  lp_server_free(server);
  std::cout << "stopped with " << lp_store_size(store.p) << " stored events\n";
  return kExitOk;
}

struct ExportArgs {
  std::string url;
  std::string store;
  std::string kind;
  std::string from;
  std::string to;
  std::string out;
};

int run_export(const ProjectConfig& cfg, const ExportArgs& a) {
  std::string body;
  if (!a.store.empty()) {
    Store store;
    check(lp_store_open(a.store.c_str(), store.out()), "opening store");
    Service service;
    check(lp_service_create(store.p, "local", nullptr, service.out()), "creating service");
    int status = 0;
    CString out;
    check(lp_service_export(service.p, "Bearer local", a.kind.empty() ? nullptr : a.kind.c_str(),
                            a.from.empty() ? nullptr : a.from.c_str(),
                            a.to.empty() ? nullptr : a.to.c_str(), &status, out.out()),
          "export");
    if (status != 200) throw Failure{kExitFailure, "export failed: " + out.str()};
    body = out.str();
  } else {
    const std::string url = a.url.empty() ? cfg.telemetry_url : a.url;
    if (url.empty()) throw Failure{kExitUsage, "export needs --url, --store or telemetryUrl"};
    const auto token = export_token(cfg);
    if (!token) throw Failure{kExitUsage, cfg.export_token_env + " is not set"};
    std::string query;
    auto add = [&](const char* k, const std::string& v) {
      if (v.empty()) return;
      query += query.empty() ? "?" : "&";
      query += k;
      query += "=";
      query += v;
    };
    add("kind", a.kind);
    add("from", a.from);
    add("to", a.to);
    int status = 0;
    CString out;
    check(lp_fetch_export(url.c_str(), token->c_str(), query.c_str(), &status, out.out()), "export");
    if (status != 200) {
      throw Failure{kExitFailure, "export failed with HTTP " + std::to_string(status) + ": " +
                                      out.str()};
    }
    body = out.str();
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << body;
  } else {
    write_file(a.out, body);
    std::cerr << "wrote " << std::count(body.begin(), body.end(), '\n') << " event(s) to " << a.out
              << "\n";
  }
  return kExitOk;
}

fs::path out_dir(const std::string& flag, const ProjectConfig& cfg) {
  return flag.empty() ? fs::path(cfg.output_dir) : fs::path(flag);
}

void emit(const Globals& g, const fs::path& file, const std::string& compact_json,
          const std::string& human) {
  write_file(file, pretty(compact_json));
  if (g.json_out) {
    std::cout << pretty(compact_json);
  } else {
    std::cout << human << "wrote " << file.string() << "\n";
  }
}

struct AnalyzeArgs {
  DataInputs data;
  std::string out;
  bool bundle = false;
  bool item_rest = false;
  std::size_t max_subset_k = 0;
  int epochs = 2000;
  double step_size = 0.01;
  std::optional<std::uint64_t> seed;
  bool icc = false;
  std::string irt_json;
  std::string interventions_json;
};

std::string histogram_text(const json& h) {
  std::ostringstream os;
  for (const auto& row : h) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "  ch %3d  %6.3f\n", row["chapter"].get<int>(),
                  row["fraction"].get<double>());
    os << buf;
  }
  return os.str();
}

int run_dropoff(const Globals& g, const ProjectConfig& cfg, const AnalyzeArgs& a) {
  Loaded l = load_first_attempts(a.data, cfg);
  CString out;
  check(lp_dataset_dropoff(l.first.p, out.out()), "dropoff");
  json j = json::parse(out.str());
  j["load"] = l.load_stats;
  std::ostringstream human;
  human << j["readers"] << " readers, " << j["triers"] << " triers (threshold "
        << j["trierThreshold"] << " questions)\nlast chapter reached, triers:\n"
        << histogram_text(j["trier"]);
  emit(g, out_dir(a.out, cfg) / "dropoff.json", j.dump(), human.str());
  return kExitOk;
}

int run_ctt(const Globals& g, const ProjectConfig& cfg, const AnalyzeArgs& a) {
  Dataset ds = analysis_set(a.data, cfg);
  json o{{"itemRest", a.item_rest}, {"maxSubsetK", a.max_subset_k}, {"threads", g.threads}};
  CString out;
  check(lp_ctt_analyze(ds.p, o.dump().c_str(), out.out()), "ctt");
  const json j = json::parse(out.str());
  std::ostringstream human;
  const auto& s = j["summaries"];
  human << j["questions"].size() << " questions, " << j["readers"].size() << " readers\n"
        << "mean ability " << s["ability"]["mean"] << ", mean difficulty "
        << s["difficulty"]["mean"] << ", mean discrimination " << s["discrimination"]["mean"]
        << "\n";
  for (const auto& b : j["bestSubsets"]) {
    human << "best subset k=" << b["k"] << ": r=" << b["r"] << "\n";
  }
  emit(g, out_dir(a.out, cfg) / "ctt.json", out.str(), human.str());
  return kExitOk;
}

int run_irt(const Globals& g, const ProjectConfig& cfg, const AnalyzeArgs& a) {
  Dataset ds = analysis_set(a.data, cfg);
  json o{{"epochs", a.epochs},
         {"stepSize", a.step_size},
         {"seed", a.seed.value_or(cfg.seed)},
         {"threads", g.threads},
         {"iccTables", a.icc}};
  CString out;
  check(lp_irt_fit(ds.p, o.dump().c_str(), out.out()), "irt");
  const json j = json::parse(out.str());
  std::ostringstream human;
  human << "fitted " << j["questions"].size() << " questions and " << j["readers"].size()
        << " readers over " << a.epochs << " epochs\n";
  if (!j["trajectory"].empty()) {
    human << "final log posterior " << j["trajectory"].back() << "\n";
  }
  emit(g, out_dir(a.out, cfg) / "irt.json", out.str(), human.str());
  return kExitOk;
}

std::optional<json> read_optional_json(const std::string& flag, const fs::path& fallback) {
  if (!flag.empty()) return json::parse(read_file(flag));
  if (fs::exists(fallback)) return json::parse(read_file(fallback));
  return std::nullopt;
}

int run_bundle(const Globals& g, const ProjectConfig& cfg, const AnalyzeArgs& a) {
  const fs::path dir = out_dir(a.out, cfg);
  Loaded l = load_first_attempts(a.data, cfg);
  Dataset ds;
  if (a.data.all_readers) {
    ds = std::move(l.first);
  } else {
    check(lp_dataset_triers(l.first.p, ds.out()), "selecting triers");
  }
  CString summary;
  check(lp_dataset_summary(l.first.p, summary.out()), "summary");
  json extras{{"maxSubsetK", a.max_subset_k}, {"summary", json::parse(summary.str())}};
  if (auto irt = read_optional_json(a.irt_json, dir / "irt.json")) extras["irt"] = *irt;
  if (auto iv = read_optional_json(a.interventions_json, dir / "interventions.json")) {
    extras["interventions"] = *iv;
  }
  if (g.stamp) extras["generatedAt"] = utc_now();
  CString out;
  check(lp_stats_bundle(ds.p, extras.dump().c_str(), out.out()), "bundle");
  const json j = json::parse(out.str());
  std::ostringstream human;
  human << "bundled " << j["questions"].size() << " questions across " << j["quizzes"].size()
        << " quizzes\n";
  emit(g, dir / "stats.json", out.str(), human.str());
  return kExitOk;
}

struct InterventionArgs {
  DataInputs data;
  std::string list;
  std::string summaries;
  bool pooled = false;
  double alpha = 0.05;
  std::string out;
};

int run_interventions(const Globals& g, const ProjectConfig& cfg, const InterventionArgs& a) {
  if (a.list.empty() == a.summaries.empty()) {
    throw Failure{kExitUsage, "give exactly one of --list or --summaries"};
  }
  const json o{{"pooled", a.pooled}, {"alpha", a.alpha}};
  CString out;
  CString table;
  if (!a.summaries.empty()) {
    check(lp_interventions_from_summaries(read_file(a.summaries).c_str(), o.dump().c_str(),
                                          out.out(), table.out()),
          "interventions");
  } else {
    if (a.data.export_path.empty()) throw Failure{kExitUsage, "--list needs --export"};
    Loaded l = load_first_attempts(a.data, cfg);
    check(lp_interventions_evaluate(l.first.p, read_file(a.list).c_str(), o.dump().c_str(),
                                    out.out(), table.out()),
          "interventions");
  }
  emit(g, out_dir(a.out, cfg) / "interventions.json", out.str(), table.str());
  return kExitOk;
}

struct PowerArgs {
  std::vector<double> d;
  double alpha = 0.05;
  double power = 0.8;
  std::string from_report;
  int simulate_trials = 0;
  std::optional<std::uint64_t> seed;
};

int run_power(const Globals& g, const ProjectConfig& cfg, const PowerArgs& a) {
  std::vector<std::pair<std::string, double>> rows;
  for (double d : a.d) rows.emplace_back("", d);
  if (!a.from_report.empty()) {
    const json r = json::parse(read_file(a.from_report));
    const json& list = r.is_array() ? r : r.at("interventions");
    for (const auto& row : list) {
      if (!row.value("significant", false)) continue;
      if (!row.contains("effectSize") || row["effectSize"].is_null()) continue;
      rows.emplace_back(row.value("name", ""), std::abs(row["effectSize"].get<double>()));
    }
  }
  if (rows.empty()) throw Failure{kExitUsage, "power needs --d or --from-report"};
  json out = json::array();
  std::vector<std::int64_t> totals;
  for (const auto& [name, d] : rows) {
    lp_power_result r{};
    check(lp_power_required(d, a.alpha, a.power, &r), "power");
    json row{{"d", d}, {"nContinuous", r.n_continuous}, {"nPerGroup", r.n_per_group},
             {"nTotal", r.n_total}};
    if (!name.empty()) row["name"] = name;
    if (a.simulate_trials > 0) {
      double achieved = 0;
      check(lp_simulated_power(d, r.n_per_group, a.alpha, a.simulate_trials, a.seed.value_or(cfg.seed),
                               &achieved),
            "simulated power");
      row["simulatedPower"] = achieved;
    }
    totals.push_back(r.n_total);
    out.push_back(std::move(row));
  }
  std::sort(totals.begin(), totals.end());
  const std::size_t n = totals.size();
  const double median = n % 2 ? static_cast<double>(totals[n / 2])
                              : 0.5 * static_cast<double>(totals[n / 2 - 1] + totals[n / 2]);
  const json result{{"alpha", a.alpha}, {"power", a.power}, {"rows", out}, {"medianTotal", median}};
  if (g.json_out) {
    std::cout << result.dump(2) << "\n";
    return kExitOk;
  }
  std::printf("%-24s %7s %10s %8s", "name", "d", "nPerGroup", "nTotal");
  if (a.simulate_trials > 0) std::printf(" %9s", "simPower");
  std::printf("\n");
  for (const auto& row : out) {
    std::printf("%-24s %7.3f %10lld %8lld", row.value("name", std::string("-")).c_str(),
                row["d"].get<double>(), static_cast<long long>(row["nPerGroup"].get<std::int64_t>()),
                static_cast<long long>(row["nTotal"].get<std::int64_t>()));
    if (a.simulate_trials > 0) std::printf(" %9.4f", row["simulatedPower"].get<double>());
    std::printf("\n");
  }
  if (n > 1) std::printf("median total N: %g\n", median);
  return kExitOk;
}

struct SimulateArgs {
  DataInputs data;
  std::string metric = "cttDifficulty";
  std::vector<std::size_t> ks;
  std::size_t iterations = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t max_attempts = 10000;
  std::string out;
};

int run_simulate(const Globals& g, const ProjectConfig& cfg, const SimulateArgs& a) {
  Dataset ds = analysis_set(a.data, cfg);
  json c{{"iterations", a.iterations},
         {"seed", a.seed.value_or(cfg.seed)},
         {"maxResampleAttempts", a.max_attempts},
         {"threads", g.threads}};
  if (!a.ks.empty()) c["ks"] = a.ks;
  CString csv;
  CString js;
  check(lp_simulate(ds.p, a.metric.c_str(), c.dump().c_str(), csv.out(), js.out()), "simulate");
  const fs::path dir = out_dir(a.out, cfg);
  write_file(dir / ("simulate_" + a.metric + ".csv"), csv.str());
  emit(g, dir / ("simulate_" + a.metric + ".json"), js.str(),
       csv.str() + "wrote " + (dir / ("simulate_" + a.metric + ".csv")).string() + "\n");
  return kExitOk;
}

struct SynthArgs {
  std::size_t items = 60;
  std::size_t readers = 3000;
  std::optional<std::uint64_t> seed;
  std::size_t items_per_chapter = 6;
  double dropout = 0.02;
  double retry_rate = 0.25;
  std::string out = "synth";
};

int run_synth(const Globals& g, const ProjectConfig& cfg, const SynthArgs& a) {
  const json c{{"items", a.items},
               {"readers", a.readers},
               {"seed", a.seed.value_or(cfg.seed)},
               {"itemsPerChapter", a.items_per_chapter},
               {"dropout", a.dropout},
               {"retryRate", a.retry_rate}};
  CString out;
  check(lp_synth_write(c.dump().c_str(), a.out.c_str(), out.out()), "synth");
  const json j = json::parse(out.str());
  if (g.json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "wrote " << j["items"] << " items, " << j["readers"] << " readers and "
              << j["events"] << " events under " << a.out << "\n"
              << "build the book with: learnprof build --book-root " << a.out
              << "/book --out <dir> --commit-hash " << j["commitHash"].get<std::string>() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learnprof: quizzes, telemetry and psychometrics for online textbooks"};
  app.require_subcommand(1);
  app.fallthrough();  // global and parent flags may follow a subcommand
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
  app.add_flag("--json", g.json_out, "Print JSON instead of text");
  app.add_flag("--stamp", g.stamp, "Embed generation timestamps in outputs");
  app.add_option("--config", g.config_path, "Project configuration (TOML)");
  app.set_version_flag("--version", std::string(lp_version()));

  std::string book_root;
  std::string quiz_dir;
  std::string output_dir;
  auto add_paths = [&](CLI::App* cmd) {
    cmd->add_option("--book-root", book_root, "Book source directory");
    cmd->add_option("--quiz-dir", quiz_dir, "Quiz directory");
    cmd->add_option("--out", output_dir, "Output directory");
  };

  auto* validate = app.add_subcommand("validate", "Check quiz files");
  std::vector<std::string> validate_targets;
  std::string oracle;
  validate->add_option("paths", validate_targets, "Quiz files or directories")->required();
  validate->add_option("--oracle", oracle, "Command that compiles and runs a program on stdin");

  auto* build = app.add_subcommand("build", "Expand quiz directives and write the manifest");
  std::string commit;
  add_paths(build);
  build->add_option("--commit-hash", commit, "Commit the build is tagged with");
  build->add_option("--oracle", oracle, "Command that compiles and runs a program on stdin");

  auto* serve = app.add_subcommand("serve", "Run the telemetry service");
  std::string store_path = "events.ndjson";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::vector<std::string> serve_manifests;
  serve->add_option("--store", store_path, "Event log (NDJSON, append-only)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--manifest", serve_manifests, "Manifests of known questions");

  auto* exp = app.add_subcommand("export", "Download stored events");
  ExportArgs ea;
  exp->add_option("--url", ea.url, "Telemetry service base URL");
  exp->add_option("--store", ea.store, "Read a local event log instead");
  exp->add_option("--kind", ea.kind, "answers or bugReport");
  exp->add_option("--from", ea.from, "Inclusive start (ISO-8601 or ms)");
  exp->add_option("--to", ea.to, "Exclusive end (ISO-8601 or ms)");
  exp->add_option("-o,--output", ea.out, "Output file (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Psychometric analyses");
  analyze->require_subcommand(0, 1);
  AnalyzeArgs aa;
  add_data_options(analyze, aa.data);
  analyze->add_option("--out", aa.out, "Output directory");
  analyze->add_flag("--all-readers", aa.data.all_readers, "Analyze dabblers too");
  analyze->add_flag("--bundle", aa.bundle, "Also write stats.json");
  analyze->add_option("--max-subset-k", aa.max_subset_k, "Search best subsets up to this size");
  analyze->add_option("--irt", aa.irt_json, "irt.json to bundle (default <out>/irt.json)");
  analyze->add_option("--interventions", aa.interventions_json,
                      "interventions.json to bundle (default <out>/interventions.json)");
  auto* a_dropoff = analyze->add_subcommand("dropoff", "Reader classes and last chapter reached");
  auto* a_ctt = analyze->add_subcommand("ctt", "Classical difficulty and discrimination");
  a_ctt->add_flag("--item-rest", aa.item_rest, "Correlate with the rest score");
  auto* a_irt = analyze->add_subcommand("irt", "Fit the three-parameter logistic model");
  a_irt->add_option("--epochs", aa.epochs, "Gradient steps")->check(CLI::PositiveNumber);
  a_irt->add_option("--step-size", aa.step_size, "Step size")->check(CLI::PositiveNumber);
  a_irt->add_option("--seed", aa.seed, "Seed");
  a_irt->add_flag("--icc", aa.icc, "Include curve tables");
  auto* a_bundle = analyze->add_subcommand("bundle", "Write the dashboard bundle stats.json");

  auto* interventions = app.add_subcommand("interventions", "Before/after comparison");
  InterventionArgs ia;
  interventions->add_option("--export", ia.data.export_path, "Event export (NDJSON)");
  interventions->add_option("--manifest", ia.data.manifests, "Book manifest(s)");
  interventions->add_option("--list", ia.list, "Intervention list (TOML or JSON)");
  interventions->add_option("--summaries", ia.summaries,
                            "Rows of {name, beforeMean, nBefore, afterMean, nAfter} (JSON)");
  interventions->add_flag("--pooled", ia.pooled, "Pooled-variance t test instead of Welch");
  interventions->add_option("--alpha", ia.alpha, "False discovery rate")->check(CLI::Range(0.0, 1.0));
  interventions->add_option("--out", ia.out, "Output directory");

  auto* power = app.add_subcommand("power", "Required sample size");
  PowerArgs pa;
  power->add_option("--d", pa.d, "Effect size(s)");
  power->add_option("--alpha", pa.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  power->add_option("--power", pa.power, "Target power")->check(CLI::Range(0.0, 1.0));
  power->add_option("--from-report", pa.from_report, "Use significant rows of interventions.json");
  power->add_option("--simulate", pa.simulate_trials, "Check by simulating this many tests");
  power->add_option("--seed", pa.seed, "Seed for --simulate");

  auto* simulate = app.add_subcommand("simulate", "Small-sample error of a metric");
  SimulateArgs sa;
  add_data_options(simulate, sa.data);
  simulate->add_flag("--all-readers", sa.data.all_readers, "Use dabblers too");
  simulate->add_option("--metric", sa.metric, "dropoff, cttDifficulty or cttDiscrimination");
  simulate->add_option("--ks", sa.ks, "Subset sizes")->delimiter(',');
  simulate->add_option("--iterations", sa.iterations, "Samples per k")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed, "Seed");
  simulate->add_option("--max-attempts", sa.max_attempts, "Resampling attempts per sample");
  simulate->add_option("--out", sa.out, "Output directory");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic book and event export");
  SynthArgs ya;
  synth->add_option("--items", ya.items, "Questions")->check(CLI::PositiveNumber);
  synth->add_option("--readers", ya.readers, "Readers")->check(CLI::PositiveNumber);
  synth->add_option("--seed", ya.seed, "Seed");
  synth->add_option("--items-per-chapter", ya.items_per_chapter, "Questions per chapter");
  synth->add_option("--dropout", ya.dropout, "Chance of stopping after each chapter");
  synth->add_option("--retry-rate", ya.retry_rate, "Chance of retrying missed questions");
  synth->add_option("--out", ya.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    g.config_given = app.count("--config") > 0;
    ProjectConfig cfg = load_config(g.config_path, g.config_given);
    if (!book_root.empty()) cfg.book_root = book_root;
    if (!quiz_dir.empty()) cfg.quiz_dir = quiz_dir;
    if (!output_dir.empty()) cfg.output_dir = output_dir;

    aa.data.out_dir = aa.out;
    ia.data.out_dir = ia.out;
    sa.data.out_dir = sa.out;
    if (validate->parsed()) return run_validate(g, validate_targets, oracle);
    if (build->parsed()) return run_build(g, cfg, commit, oracle);
    if (serve->parsed()) return run_serve(cfg, store_path, host, port, serve_manifests);
    if (exp->parsed()) return run_export(cfg, ea);
    if (analyze->parsed()) {
      int rc = kExitOk;
      if (a_dropoff->parsed()) rc = run_dropoff(g, cfg, aa);
      if (a_ctt->parsed()) rc = run_ctt(g, cfg, aa);
      if (a_irt->parsed()) rc = run_irt(g, cfg, aa);
      if (a_bundle->parsed() || (rc == kExitOk && aa.bundle)) rc = run_bundle(g, cfg, aa);
      if (!a_dropoff->parsed() && !a_ctt->parsed() && !a_irt->parsed() && !a_bundle->parsed() &&
          !aa.bundle) {
        std::cerr << analyze->help();
        return kExitUsage;
      }
      return rc;
    }
    if (interventions->parsed()) return run_interventions(g, cfg, ia);
    if (power->parsed()) return run_power(g, cfg, pa);
    if (simulate->parsed()) return run_simulate(g, cfg, sa);
    if (synth->parsed()) return run_synth(g, cfg, ya);
  } catch (const Failure& f) {
    std::cerr << "learnprof: " << f.message << "\n";
    return f.exit_code;
  } catch (const json::exception& e) {
    std::cerr << "learnprof: malformed JSON input: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "learnprof: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
