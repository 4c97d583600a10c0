// Copyright 2026 The kgdelta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: one subcommand per pipeline stage plus `run`,
// `validate` and `eval`.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/eval_harness.hpp"
#include "kgdelta/pipeline.hpp"

namespace {

using kgdelta::PipelineConfig;

constexpr int kExitOk = 0;
constexpr int kExitStage = 1;
constexpr int kExitConfig = 2;

// Flag values; unset flags leave the file/env configuration alone.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> t0, t1, t0_id, t1_id, t0_ts, t1_ts;
  std::optional<std::vector<std::string>> languages;
  bool fail_fast = false;
  std::optional<std::string> filter_config, excluded_predicates, templates;
  std::optional<std::string> validator, endpoint, quotas, created_at;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool json_logs = false;
  bool resume = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file");
  app->add_option("--out", f.out, "Output directory");
  app->add_flag("--json-logs", f.json_logs, "Machine-readable progress on stderr");
  app->add_option("--endpoint", f.endpoint, "SPARQL endpoint URL");
  app->add_option("--validator", f.validator, "local, remote or both");
  app->add_option("--created-at", f.created_at, "Provenance timestamp (ISO-8601)");
}

void add_pipeline(CLI::App* app, Flags& f) {
  add_common(app, f);
  app->add_option("--t0", f.t0, "Older dump");
  app->add_option("--t1", f.t1, "Newer dump");
  app->add_option("--t0-id", f.t0_id, "Older snapshot id");
  app->add_option("--t1-id", f.t1_id, "Newer snapshot id");
  app->add_option("--t0-timestamp", f.t0_ts, "Older snapshot timestamp");
  app->add_option("--t1-timestamp", f.t1_ts, "Newer snapshot timestamp");
  app->add_option("--languages", f.languages, "Label languages, first is primary")->delimiter(',');
  app->add_flag("--fail-fast", f.fail_fast, "Abort on the first malformed record");
  app->add_option("--filter-config", f.filter_config, "Filter config JSON");
  app->add_option("--excluded-predicates", f.excluded_predicates, "Excluded predicate list");
  app->add_option("--templates", f.templates, "Template JSON");
  app->add_option("--quotas", f.quotas, "Sample quotas, e.g. L1=150,L2=100,L3=50");
  app->add_option("--seed", f.seed, "Sampling seed");
  app->add_option("--workers", f.workers, "Synthesis worker threads");
  app->add_flag("--resume", f.resume, "Skip stages whose outputs exist");
}

PipelineConfig build_config(const Flags& f) {
  PipelineConfig c;
  if (f.config) c.merge_file(*f.config);
  c.merge_env();
  nlohmann::json j = nlohmann::json::object();
  if (f.t0) j["dumps"]["t0"] = *f.t0;
  if (f.t1) j["dumps"]["t1"] = *f.t1;
  if (f.t0_id) j["snapshot_ids"]["t0"] = *f.t0_id;
  if (f.t1_id) j["snapshot_ids"]["t1"] = *f.t1_id;
  if (f.t0_ts) j["timestamps"]["t0"] = *f.t0_ts;
  if (f.t1_ts) j["timestamps"]["t1"] = *f.t1_ts;
  if (f.languages) j["languages"] = *f.languages;
  if (f.fail_fast) j["fail_fast"] = true;
  if (f.filter_config) j["filter_config"] = *f.filter_config;
  if (f.excluded_predicates) j["excluded_predicates_file"] = *f.excluded_predicates;
  if (f.templates) j["templates"] = *f.templates;
  if (f.validator) j["validator"] = *f.validator;
  if (f.endpoint) j["endpoint"] = *f.endpoint;
  if (f.seed) j["rng_seed"] = *f.seed;
  if (f.out) j["output_dir"] = *f.out;
  if (f.created_at) j["created_at"] = *f.created_at;
  c.merge_json(j, {});
  if (f.quotas) c.quotas = kgdelta::parse_quotas(*f.quotas);
  if (f.workers) c.synth.workers = *f.workers;
  c.json_logs = f.json_logs;
  c.resume = f.resume;
  return c;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    try {
      const long v = std::stol(item);
      if (v < 1) throw std::out_of_range(item);
      ks.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw kgdelta::ConfigError("invalid k '" + item + "'");
    }
    start = comma + 1;
  }
  return ks;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build and score time-sensitive QA benchmarks from knowledge-graph snapshots"};
  app.require_subcommand(1);
  Flags flags;

  auto* run = app.add_subcommand("run", "Run every stage in order");
  add_pipeline(run, flags);
  std::vector<std::pair<std::string, CLI::App*>> stages;
  for (const char* name : kgdelta::kStageNames) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " stage");
    add_pipeline(sub, flags);
    stages.emplace_back(name, sub);
  }

  std::string bench_path, snapshot_prefix, report_path;
  auto* validate = app.add_subcommand("validate", "Re-check a benchmark's answers");
  add_common(validate, flags);
  validate->add_option("--benchmark", bench_path, "Benchmark JSONL")->required();
  validate->add_option("--snapshot", snapshot_prefix, "Snapshot prefix (e.g. out/g1)");
  validate->add_option("--report", report_path, "Write the report here as well");

  std::string predictions_path, ks_text = "1";
  auto* eval = app.add_subcommand("eval", "Score predictions against a benchmark");
  eval->add_option("--benchmark", bench_path, "Benchmark JSONL")->required();
  eval->add_option("--predictions", predictions_path, "Prediction JSONL")->required();
  eval->add_option("--out", flags.out, "Output directory")->required();
  eval->add_option("--k", ks_text, "Comma-separated k values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      kgdelta::run_pipeline(build_config(flags));
      return kExitOk;
    }
    for (const auto& [name, sub] : stages) {
      if (!*sub) continue;
      PipelineConfig c = build_config(flags);
      c.validate(name == "extract");
      kgdelta::run_stage(name, c, kgdelta::Logger(c.json_logs));
      return kExitOk;
    }
    if (*validate) {
      PipelineConfig c = build_config(flags);
      const auto benchmark = kgdelta::read_benchmark(bench_path);
      std::optional<kgdelta::TripleStore> store;
      std::optional<kgdelta::RemoteClient> client;
      if (!snapshot_prefix.empty()) {
        store.emplace(kgdelta::read_store(snapshot_prefix));
      } else if (flags.endpoint || c.finalize.validator != kgdelta::ValidatorMode::kLocal) {
        client.emplace(c.remote);
      } else {
        throw kgdelta::ConfigError("validate needs --snapshot or --endpoint");
      }
      const auto report = kgdelta::validate_benchmark(benchmark, store ? &*store : nullptr,
                                                      client ? &*client : nullptr);
      const std::string text = report.to_json().dump(2) + "\n";
      std::cout << text;
      if (!report_path.empty()) kgdelta::write_text_file(report_path, text);
      return report.failures.empty() ? kExitOk : kExitStage;
    }
    if (*eval) {
      const auto benchmark = kgdelta::read_benchmark(bench_path);
      const auto records = kgdelta::eval::read_predictions(predictions_path);
      const auto report = kgdelta::eval::score(benchmark, records, parse_ks(ks_text));
      const std::filesystem::path dir = *flags.out;
      std::filesystem::create_directories(dir);
      kgdelta::write_text_file(dir / "eval_report.json", report.to_json().dump(2) + "\n");
      kgdelta::write_text_file(dir / "verdicts.csv", report.verdicts_csv());
      kgdelta::write_text_file(dir / "delta_grid.csv", report.delta_grid_csv());
      return kExitOk;
    }
  } catch (const kgdelta::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const kgdelta::StageFailure& e) {
    std::cerr << "stage failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
  return kExitOk;
}
