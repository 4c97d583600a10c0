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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/candidate_filter.hpp"
#include "kgdelta/errors.hpp"
#include "kgdelta/finalize.hpp"
#include "kgdelta/remote.hpp"
#include "kgdelta/synth.hpp"
#include "kgdelta/templates.hpp"

namespace kgdelta {

/// Everything a pipeline run depends on. Relative paths in a config file are
/// resolved against the file's directory.
struct PipelineConfig {
  std::filesystem::path dump_t0;
  std::filesystem::path dump_t1;
  std::string snapshot_id_t0;
  std::string snapshot_id_t1;
  std::string timestamp_t0;
  std::string timestamp_t1;
  std::vector<std::string> languages{"en"};
  bool fail_fast = false;

  FilterConfig filter = FilterConfig::defaults();
  SynthConfig synth = SynthConfig::defaults();
  TemplateSet templates = TemplateSet::defaults();
  FinalizeConfig finalize;
  RemoteConfig remote;

  std::map<Level, std::size_t> quotas;
  std::uint64_t rng_seed = 0;
  std::filesystem::path output_dir = "out";
  /// Skip stages whose outputs already exist for the same config digest.
  bool resume = false;
  bool json_logs = false;
  /// Manifest timestamp; defaults to the newer snapshot's timestamp.
  std::string created_at;

  /// Applies keys present in `j` on top of the current values. Throws
  /// ConfigError.
  void merge_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  /// Reads a JSON config file and merges it.
  void merge_file(const std::filesystem::path& path);
  /// KGB_* environment variables (see README).
  void merge_env();

  /// Throws ConfigError on missing inputs or inconsistent settings.
  void validate(bool need_dumps) const;

  /// Effective configuration, including paths and run flags.
  nlohmann::ordered_json to_json() const;
  /// sha256 over the settings that shape the artifacts: filter, synthesis,
  /// templates, finalization, languages, quotas and seed. Paths and run
  /// flags are excluded so relocated runs stay comparable.
  std::string digest() const;
};

/// Parses "L1=150,L2=100,L3=50".
std::map<Level, std::size_t> parse_quotas(const std::string& text);

/// A failed stage; `stage` names it in error.json.
class StageFailure : public Error {
 public:
  StageFailure(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)), detail_(message) {}
  const std::string& stage() const { return stage_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string stage_;
  std::string detail_;
};

/// Progress sink; text lines or JSON objects on stderr.
class Logger {
 public:
  explicit Logger(bool json = false) : json_(json) {}
  void info(const std::string& stage, const std::string& message,
            const nlohmann::ordered_json& fields = nlohmann::ordered_json::object()) const;

 private:
  bool json_;
};

/// File layout inside an output directory.
namespace layout {
std::filesystem::path g0(const std::filesystem::path& dir);
std::filesystem::path g1(const std::filesystem::path& dir);
std::filesystem::path delta(const std::filesystem::path& dir);
std::filesystem::path pool(const std::filesystem::path& dir);
std::filesystem::path questions(const std::filesystem::path& dir);
std::filesystem::path rendered(const std::filesystem::path& dir);
std::filesystem::path benchmark(const std::filesystem::path& dir);
std::filesystem::path manifest(const std::filesystem::path& dir);
std::filesystem::path sample(const std::filesystem::path& dir);
std::filesystem::path sample_manifest(const std::filesystem::path& dir);
}  // namespace layout

/// Stage entry points. Each reads its inputs from, and writes its outputs
/// to, config.output_dir.
void stage_extract(const PipelineConfig& config, const Logger& log);
void stage_delta(const PipelineConfig& config, const Logger& log);
void stage_filter(const PipelineConfig& config, const Logger& log);
void stage_synth(const PipelineConfig& config, const Logger& log);
void stage_render(const PipelineConfig& config, const Logger& log);
void stage_finalize(const PipelineConfig& config, const Logger& log);
/// No-op without quotas.
void stage_sample(const PipelineConfig& config, const Logger& log);

inline constexpr const char* kStageNames[] = {"extract", "delta",    "filter", "synth",
                                              "render",  "finalize", "sample"};

/// Runs one named stage, writing error.json on failure and raising
/// StageFailure. ConfigError passes through untouched.
void run_stage(const std::string& name, const PipelineConfig& config, const Logger& log);

/// All stages in order; writes effective_config.json first.
void run_pipeline(const PipelineConfig& config);

struct ValidationReport {
  std::size_t total = 0;
  std::size_t passed = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // id, reason
  nlohmann::ordered_json to_json() const;
};

/// Re-checks that every benchmark query has exactly one answer equal to the
/// stored gold, against a snapshot or, when `remote` is given, an endpoint.
ValidationReport validate_benchmark(const std::vector<QuestionInstance>& benchmark,
                                    const TripleStore* store, RemoteClient* remote);

}  // namespace kgdelta
