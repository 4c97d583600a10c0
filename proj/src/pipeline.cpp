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

#include "kgdelta/pipeline.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/delta.hpp"
#include "kgdelta/digest.hpp"
#include "kgdelta/evaluator.hpp"
#include "kgdelta/ingest.hpp"
#include "kgdelta/render.hpp"

namespace kgdelta {
namespace fs = std::filesystem;

namespace {

std::filesystem::path resolve(const Json& v, const fs::path& base) {
  fs::path p = v.get<std::string>();
  return p.is_absolute() || base.empty() ? p : base / p;
}

OrderedJson quotas_json(const std::map<Level, std::size_t>& quotas) {
  OrderedJson j = OrderedJson::object();
  for (const auto& [l, n] : quotas) j[std::string(to_string(l))] = n;
  return j;
}

std::map<Level, std::size_t> quotas_from(const Json& j) {
  std::map<Level, std::size_t> out;
  for (const auto& [k, v] : j.items()) {
    auto l = level_from_string(k);
    if (!l) throw ConfigError("unknown quota level '" + k + "'");
    out[*l] = v.get<std::size_t>();
  }
  return out;
}

std::uint64_t parse_seed(const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used, 10);
    if (used != s.size() || s.front() == '-') throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("rng seed must be a non-negative integer, got '" + s + "'");
  }
}

void write_json(const fs::path& path, const OrderedJson& j) {
  write_text_file(path, j.dump(2) + "\n");
}

fs::path marker(const PipelineConfig& c, const std::string& stage) {
  return c.output_dir / ("." + stage + ".done");
}

std::vector<Triple> read_pool(const fs::path& path) {
  std::vector<Triple> out;
  LineReader in(path);
  std::string line;
  while (in.next(line)) {
    if (!line.empty()) out.push_back(triple_from_json(Json::parse(line)));
  }
  return out;
}

std::map<Level, std::size_t> present(const std::map<Level, std::size_t>& quotas) {
  std::map<Level, std::size_t> out;
  for (const auto& [l, n] : quotas) {
    if (n > 0) out[l] = n;
  }
  return out;
}

std::string created_at_for(const PipelineConfig& config, const SnapshotInfo& to) {
  return config.created_at.empty() ? to.timestamp : config.created_at;
}

}  // namespace

namespace layout {
fs::path g0(const fs::path& dir) { return dir / "g0"; }
fs::path g1(const fs::path& dir) { return dir / "g1"; }
fs::path delta(const fs::path& dir) { return dir / "delta"; }
fs::path pool(const fs::path& dir) { return dir / "pool.jsonl"; }
fs::path questions(const fs::path& dir) { return dir / "questions.jsonl"; }
fs::path rendered(const fs::path& dir) { return dir / "rendered.jsonl"; }
fs::path benchmark(const fs::path& dir) { return dir / "benchmark.jsonl"; }
fs::path manifest(const fs::path& dir) { return dir / "manifest.json"; }
fs::path sample(const fs::path& dir) { return dir / "sample.jsonl"; }
fs::path sample_manifest(const fs::path& dir) { return dir / "sample_manifest.json"; }
}  // namespace layout

std::map<Level, std::size_t> parse_quotas(const std::string& text) {
  std::map<Level, std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("quota '" + item + "' is not LEVEL=COUNT");
    auto level = level_from_string(item.substr(0, eq));
    if (!level) throw ConfigError("unknown quota level in '" + item + "'");
    out[*level] = static_cast<std::size_t>(parse_seed(item.substr(eq + 1)));
    start = comma + 1;
  }
  return out;
}

void PipelineConfig::merge_json(const nlohmann::json& j, const fs::path& base_dir) {
  try {
    if (j.contains("dumps")) {
      const auto& d = j["dumps"];
      if (d.contains("t0")) dump_t0 = resolve(d["t0"], base_dir);
      if (d.contains("t1")) dump_t1 = resolve(d["t1"], base_dir);
    }
    if (j.contains("snapshot_ids")) {
      snapshot_id_t0 = j["snapshot_ids"].value("t0", snapshot_id_t0);
      snapshot_id_t1 = j["snapshot_ids"].value("t1", snapshot_id_t1);
    }
    if (j.contains("timestamps")) {
      timestamp_t0 = j["timestamps"].value("t0", timestamp_t0);
      timestamp_t1 = j["timestamps"].value("t1", timestamp_t1);
    }
    if (j.contains("languages")) {
      languages = j["languages"].get<std::vector<std::string>>();
      if (languages.empty()) throw ConfigError("languages must not be empty");
      synth.language = languages.front();
      finalize.language = languages.front();
    }
    fail_fast = j.value("fail_fast", fail_fast);
    if (j.contains("filter")) filter = FilterConfig::from_json(j["filter"]);
    if (j.contains("filter_config")) {
      filter = FilterConfig::from_json(read_json_file(resolve(j["filter_config"], base_dir)));
    }
    if (j.contains("excluded_predicates_file")) {
      filter.excluded_predicates = load_predicate_list(resolve(j["excluded_predicates_file"], base_dir));
      synth.excluded_predicates = filter.excluded_predicates;
    }
    if (j.contains("synthesis")) {
      SynthConfig s = SynthConfig::from_json(j["synthesis"]);
      if (!j["synthesis"].contains("language")) s.language = synth.language;
      if (!j["synthesis"].contains("excluded_predicates")) s.excluded_predicates = synth.excluded_predicates;
      synth = std::move(s);
    }
    if (j.contains("templates")) templates = TemplateSet::load(resolve(j["templates"], base_dir));
    if (j.contains("validator")) {
      auto m = validator_mode_from_string(j["validator"].get<std::string>());
      if (!m) throw ConfigError("unknown validator mode");
      finalize.validator = *m;
    }
    if (j.contains("near_duplicate_threshold")) {
      finalize.near_duplicate_threshold = j["near_duplicate_threshold"].get<double>();
    }
    finalize.surface_regrounding = j.value("surface_regrounding", finalize.surface_regrounding);
    if (j.contains("endpoint")) remote.endpoint = j["endpoint"].get<std::string>();
    if (j.contains("remote")) {
      const auto& r = j["remote"];
      remote.retry.max_attempts = r.value("max_attempts", remote.retry.max_attempts);
      remote.retry.timeout = std::chrono::milliseconds{
          r.value("timeout_ms", static_cast<long long>(remote.retry.timeout.count()))};
      remote.retry.initial_backoff = std::chrono::milliseconds{
          r.value("initial_backoff_ms", static_cast<long long>(remote.retry.initial_backoff.count()))};
      remote.retry.max_backoff = std::chrono::milliseconds{
          r.value("max_backoff_ms", static_cast<long long>(remote.retry.max_backoff.count()))};
      remote.retry.multiplier = r.value("backoff_multiplier", remote.retry.multiplier);
      remote.max_in_flight = r.value("max_in_flight", remote.max_in_flight);
    }
    if (j.contains("quotas")) quotas = quotas_from(j["quotas"]);
    if (j.contains("rng_seed")) rng_seed = j["rng_seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) output_dir = resolve(j["output_dir"], base_dir);
    created_at = j.value("created_at", created_at);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

void PipelineConfig::merge_file(const fs::path& path) {
  Json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  merge_json(j, path.parent_path());
}

void PipelineConfig::merge_env() {
  remote = remote.with_env_overrides();
  if (const char* v = std::getenv("KGB_OUTPUT_DIR"); v && *v) output_dir = v;
  if (const char* v = std::getenv("KGB_RNG_SEED"); v && *v) rng_seed = parse_seed(v);
  if (const char* v = std::getenv("KGB_QUOTAS"); v && *v) quotas = parse_quotas(v);
  if (const char* v = std::getenv("KGB_CREATED_AT"); v && *v) created_at = v;
  if (const char* v = std::getenv("KGB_VALIDATOR"); v && *v) {
    auto m = validator_mode_from_string(v);
    if (!m) throw ConfigError(std::string("KGB_VALIDATOR: unknown mode '") + v + "'");
    finalize.validator = *m;
  }
}

void PipelineConfig::validate(bool need_dumps) const {
  if (need_dumps) {
    for (const auto& [name, p] : {std::pair{"t0", &dump_t0}, std::pair{"t1", &dump_t1}}) {
      if (p->empty()) throw ConfigError(std::string("no ") + name + " dump configured");
      if (!fs::exists(*p)) throw ConfigError(std::string(name) + " dump not found: " + p->string());
    }
  }
  if (languages.empty()) throw ConfigError("languages must not be empty");
  if (output_dir.empty()) throw ConfigError("output directory must be set");
  filter.validate();
  synth.validate();
  templates.validate(synth.constraint_predicates);
  if (finalize.near_duplicate_threshold < 0 || finalize.near_duplicate_threshold > 1) {
    throw ConfigError("near_duplicate_threshold must lie in [0, 1]");
  }
  if (remote.retry.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
}

nlohmann::ordered_json PipelineConfig::to_json() const {
  OrderedJson j;
  j["dumps"] = {{"t0", dump_t0.string()}, {"t1", dump_t1.string()}};
  j["snapshot_ids"] = {{"t0", snapshot_id_t0}, {"t1", snapshot_id_t1}};
  j["timestamps"] = {{"t0", timestamp_t0}, {"t1", timestamp_t1}};
  j["languages"] = languages;
  j["fail_fast"] = fail_fast;
  j["filter"] = filter.to_json();
  j["synthesis"] = synth.to_json();
  j["templates"] = templates.to_json();
  j["finalize"] = finalize.to_json();
  j["endpoint"] = remote.endpoint;
  j["remote"] = {{"max_attempts", remote.retry.max_attempts},
                 {"timeout_ms", remote.retry.timeout.count()},
                 {"initial_backoff_ms", remote.retry.initial_backoff.count()},
                 {"max_backoff_ms", remote.retry.max_backoff.count()},
                 {"backoff_multiplier", remote.retry.multiplier},
                 {"max_in_flight", remote.max_in_flight}};
  j["quotas"] = quotas_json(quotas);
  j["rng_seed"] = rng_seed;
  j["output_dir"] = output_dir.string();
  j["created_at"] = created_at;
  return j;
}

std::string PipelineConfig::digest() const {
  OrderedJson j;
  j["languages"] = languages;
  j["filter"] = filter.to_json();
  j["synthesis"] = synth.to_json();
  j["templates"] = templates.to_json();
  j["finalize"] = finalize.to_json();
  if (finalize.validator != ValidatorMode::kLocal) j["endpoint"] = remote.endpoint;
  j["quotas"] = quotas_json(quotas);
  j["rng_seed"] = rng_seed;
  j["created_at"] = created_at;
  return sha256_hex(j.dump());
}

void Logger::info(const std::string& stage, const std::string& message,
                  const nlohmann::ordered_json& fields) const {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  if (json_) {
    OrderedJson j;
    j["stage"] = stage;
    j["message"] = message;
    for (const auto& [k, v] : fields.items()) j[k] = v;
    std::cerr << j.dump() << '\n';
  } else {
    std::cerr << "[" << stage << "] " << message;
    if (!fields.empty()) std::cerr << ' ' << fields.dump();
    std::cerr << '\n';
  }
}

void stage_extract(const PipelineConfig& config, const Logger& log) {
  OrderedJson stats;
  for (int side = 0; side < 2; ++side) {
    IngestConfig ic;
    ic.languages = config.languages;
    ic.fail_fast = config.fail_fast;
    ic.snapshot_id = side == 0 ? config.snapshot_id_t0 : config.snapshot_id_t1;
    ic.timestamp = side == 0 ? config.timestamp_t0 : config.timestamp_t1;
    const fs::path& dump = side == 0 ? config.dump_t0 : config.dump_t1;
    IngestResult r = extract_triples(dump, ic);
    const fs::path prefix = side == 0 ? layout::g0(config.output_dir) : layout::g1(config.output_dir);
    write_store(r.store, prefix, r.stats.to_json());
    stats[side == 0 ? "g0" : "g1"] = r.stats.to_json();
    log.info("extract", "snapshot written",
             {{"snapshot", r.store.snapshot().id}, {"triples", r.store.size()}});
  }
  write_json(config.output_dir / "ingest_stats.json", stats);
}

void stage_delta(const PipelineConfig& config, const Logger& log) {
  const KnowledgeDelta d = compute_delta_streaming(layout::g0(config.output_dir),
                                                   layout::g1(config.output_dir));
  write_delta(d, layout::delta(config.output_dir));
  log.info("delta", "delta written",
           {{"insertions", d.insertions.size()}, {"updates", d.updates.size()}});
}

void stage_filter(const PipelineConfig& config, const Logger& log) {
  const TripleStore g1 = read_store(layout::g1(config.output_dir));
  const KnowledgeDelta d = read_delta(layout::delta(config.output_dir));
  const FilterResult r = filter_candidates(d, g1, config.filter);
  TextWriter out(layout::pool(config.output_dir));
  for (const auto& t : r.pool) out.line(canonical_triple_line(t));
  out.close();
  write_json(config.output_dir / "filter_report.json", r.report.to_json());
  log.info("filter", "pool written", {{"kept", r.report.kept_count}, {"input", r.report.input_count}});
}

void stage_synth(const PipelineConfig& config, const Logger& log) {
  const TripleStore g1 = read_store(layout::g1(config.output_dir));
  const SnapshotInfo from = read_store_info(layout::g0(config.output_dir));
  SynthConfig sc = config.synth;
  if (sc.created_at.empty()) sc.created_at = created_at_for(config, g1.snapshot());
  const SynthOutput out =
      synthesize_all(read_pool(layout::pool(config.output_dir)), g1, from, sc);
  write_questions(out.instances, layout::questions(config.output_dir));
  write_json(config.output_dir / "synth_report.json", out.report.to_json());
  log.info("synth", "questions written", {{"instances", out.instances.size()}});
}

void stage_render(const PipelineConfig& config, const Logger& log) {
  const TripleStore g1 = read_store(layout::g1(config.output_dir));
  const RenderOutput out =
      render_all(read_questions(layout::questions(config.output_dir)), config.templates, g1);
  write_questions(out.instances, layout::rendered(config.output_dir));
  write_json(config.output_dir / "render_report.json", out.report.to_json());
  log.info("render", "questions rendered", {{"rendered", out.report.rendered_count}});
}

void stage_finalize(const PipelineConfig& config, const Logger& log) {
  const TripleStore g1 = read_store(layout::g1(config.output_dir));
  const SnapshotInfo from = read_store_info(layout::g0(config.output_dir));
  std::optional<RemoteClient> client;
  if (config.finalize.validator != ValidatorMode::kLocal) client.emplace(config.remote);
  const fs::path report_path = config.output_dir / "finalize_report.json";
  FinalizeResult r;
  try {
    r = finalize(read_questions(layout::rendered(config.output_dir)), g1, config.finalize,
                 client ? &*client : nullptr);
  } catch (const FinalizeAborted& e) {
    write_json(report_path, e.partial().to_json());
    throw;
  }
  write_benchmark(r.benchmark, layout::benchmark(config.output_dir));
  const BenchmarkManifest m = make_manifest(r.benchmark, from, g1.snapshot(), config.digest(),
                                            config.rng_seed, present(config.quotas),
                                            created_at_for(config, g1.snapshot()));
  write_json(layout::manifest(config.output_dir), m.to_json());
  write_json(report_path, r.report.to_json());
  log.info("finalize", "benchmark written", {{"instances", r.benchmark.size()}});
}

void stage_sample(const PipelineConfig& config, const Logger& log) {
  const auto quotas = present(config.quotas);
  if (quotas.empty()) {
    log.info("sample", "no quotas configured, skipping");
    return;
  }
  const auto benchmark = read_benchmark(layout::benchmark(config.output_dir));
  const auto sample = stratified_sample(benchmark, quotas, config.rng_seed);
  const BenchmarkManifest full =
      BenchmarkManifest::from_json(read_json_file(layout::manifest(config.output_dir)));
  write_benchmark(sample, layout::sample(config.output_dir));
  const BenchmarkManifest m = make_manifest(sample, full.from, full.to, full.config_digest,
                                            config.rng_seed, quotas, full.created_at);
  write_json(layout::sample_manifest(config.output_dir), m.to_json());
  log.info("sample", "sample written", {{"instances", sample.size()}});
}

void run_stage(const std::string& name, const PipelineConfig& config, const Logger& log) {
  static const std::map<std::string, void (*)(const PipelineConfig&, const Logger&)> kStages = {
      {"extract", &stage_extract}, {"delta", &stage_delta},       {"filter", &stage_filter},
      {"synth", &stage_synth},     {"render", &stage_render},     {"finalize", &stage_finalize},
      {"sample", &stage_sample}};
  auto it = kStages.find(name);
  if (it == kStages.end()) throw ConfigError("unknown stage '" + name + "'");
  fs::create_directories(config.output_dir);
  const std::string digest = config.digest();
  if (config.resume && fs::exists(marker(config, name))) {
    if (read_text_file(marker(config, name)) == digest) {
      log.info(name, "outputs present, skipping");
      return;
    }
  }
  fs::remove(marker(config, name));
  try {
    it->second(config, log);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    OrderedJson err;
    err["stage"] = name;
    err["message"] = e.what();
    write_json(config.output_dir / "error.json", err);
    throw StageFailure(name, e.what());
  }
  write_text_file(marker(config, name), digest);
}

void run_pipeline(const PipelineConfig& config) {
  config.validate(true);
  const Logger log(config.json_logs);
  fs::create_directories(config.output_dir);
  fs::remove(config.output_dir / "error.json");
  write_json(config.output_dir / "effective_config.json", config.to_json());
  for (const char* stage : kStageNames) run_stage(stage, config, log);
}

nlohmann::ordered_json ValidationReport::to_json() const {
  OrderedJson j;
  j["total"] = total;
  j["passed"] = passed;
  j["failed"] = failures.size();
  j["failures"] = OrderedJson::array();
  for (const auto& [id, reason] : failures) j["failures"].push_back({{"id", id}, {"reason", reason}});
  return j;
}

ValidationReport validate_benchmark(const std::vector<QuestionInstance>& benchmark,
                                    const TripleStore* store, RemoteClient* remote) {
  if (!store && !remote) throw ConfigError("validation needs a snapshot or an endpoint");
  ValidationReport report;
  for (const auto& inst : benchmark) {
    ++report.total;
    std::vector<ObjectValue> answers;
    try {
      const sparql::QuerySpec spec = sparql::parse_sparql(inst.sparql);
      if (remote) {
        answers = remote->select(inst.sparql, spec.select_var).bindings;
        std::sort(answers.begin(), answers.end());
        answers.erase(std::unique(answers.begin(), answers.end()), answers.end());
      } else {
        sparql::QuerySpec unlimited = spec;
        unlimited.limit.reset();
        answers = evaluate(unlimited, *store).bindings;
      }
    } catch (const RemoteError&) {
      throw;
    } catch (const std::exception& e) {
      report.failures.emplace_back(inst.id, std::string("query failed: ") + e.what());
      continue;
    }
    if (answers.size() != 1) {
      report.failures.emplace_back(inst.id, std::to_string(answers.size()) + " answers");
    } else if (answers.front() != inst.gold) {
      report.failures.emplace_back(inst.id, "answer " + answers.front().display() +
                                                " differs from gold " + inst.gold.display());
    } else {
      ++report.passed;
    }
  }
  return report;
}

}  // namespace kgdelta
