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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/errors.hpp"
#include "kgdelta/question.hpp"
#include "kgdelta/remote.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

enum class ValidatorMode { kLocal, kRemote, kBoth };

std::string_view to_string(ValidatorMode m);
std::optional<ValidatorMode> validator_mode_from_string(std::string_view s);

struct FinalizeConfig {
  ValidatorMode validator = ValidatorMode::kLocal;
  /// Same-gold questions whose token sets overlap above this Jaccard score
  /// are near duplicates.
  double near_duplicate_threshold = 0.9;
  /// Re-evaluate with every anchor replaced by entities sharing its surface
  /// form, dropping questions that become ambiguous.
  bool surface_regrounding = true;
  std::string language = "en";
  /// Upper bound on anchor substitutions tried per block.
  std::size_t max_regrounding_combinations = 256;

  nlohmann::ordered_json to_json() const;
};

struct FinalizeReport {
  std::size_t input_count = 0;
  std::size_t kept_count = 0;
  std::map<std::string, std::size_t> dropped;
  /// (instance id, reason) per dropped instance, in processing order.
  std::vector<std::pair<std::string, std::string>> drops;
  /// Set when remote validation aborted; the report then covers only the
  /// instances processed so far.
  std::optional<std::string> aborted;

  nlohmann::ordered_json to_json() const;
};

/// Raised when the remote validator fails permanently or exhausts retries.
class FinalizeAborted : public Error {
 public:
  FinalizeAborted(const std::string& message, FinalizeReport partial)
      : Error(message), partial_(std::move(partial)) {}
  const FinalizeReport& partial() const { return partial_; }

 private:
  FinalizeReport partial_;
};

struct FinalizeResult {
  std::vector<QuestionInstance> benchmark;
  FinalizeReport report;
};

/// Token-set Jaccard similarity of two questions after normalization.
double jaccard_similarity(const std::string& a, const std::string& b);

/// Answers when each anchor may be any entity sharing its label's surface
/// form. Saturated at 2.
std::size_t regrounded_count(const sparql::QuerySpec& spec, const TripleStore& g1,
                             const std::string& language, std::size_t max_combinations = 256);

/// Drops exact and near duplicate questions, then re-validates every
/// survivor. `remote` is required for remote and both modes.
FinalizeResult finalize(const std::vector<QuestionInstance>& instances, const TripleStore& g1,
                        const FinalizeConfig& config, RemoteClient* remote = nullptr);

struct BenchmarkManifest {
  std::string hash_algorithm = "sha256";
  SnapshotInfo from;
  SnapshotInfo to;
  std::string config_digest;
  std::uint64_t rng_seed = 0;
  std::map<Level, std::size_t> quotas;
  std::map<Level, std::size_t> counts;
  /// sha256 of each benchmark line, in file order.
  std::vector<std::string> instance_hashes;
  std::string created_at;

  nlohmann::ordered_json to_json() const;
  static BenchmarkManifest from_json(const nlohmann::json& j);
};

/// One benchmark record.
nlohmann::ordered_json benchmark_record(const QuestionInstance& inst);
QuestionInstance benchmark_record_from_json(const nlohmann::json& j);
std::string benchmark_line(const QuestionInstance& inst);

BenchmarkManifest make_manifest(const std::vector<QuestionInstance>& benchmark,
                                const SnapshotInfo& from, const SnapshotInfo& to,
                                const std::string& config_digest, std::uint64_t rng_seed,
                                const std::map<Level, std::size_t>& quotas,
                                const std::string& created_at);

void write_benchmark(const std::vector<QuestionInstance>& benchmark,
                     const std::filesystem::path& path);
std::vector<QuestionInstance> read_benchmark(const std::filesystem::path& path);

class SampleShortfall : public Error {
 public:
  SampleShortfall(const std::string& message, std::map<Level, std::size_t> missing)
      : Error(message), missing_(std::move(missing)) {}
  /// Level -> how many instances the quota lacked.
  const std::map<Level, std::size_t>& missing() const { return missing_; }

 private:
  std::map<Level, std::size_t> missing_;
};

/// Uniform sample without replacement per level, reproducible under
/// `rng_seed`. Selected instances keep their original order.
std::vector<QuestionInstance> stratified_sample(const std::vector<QuestionInstance>& benchmark,
                                                const std::map<Level, std::size_t>& quotas,
                                                std::uint64_t rng_seed);

/// Uniform integer in [0, n) from a 64-bit engine, by rejection. Unlike
/// std::uniform_int_distribution the result is the same on every standard
/// library.
template <typename Engine>
std::uint64_t bounded_uniform(Engine& engine, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = engine();
    if (r >= threshold) return r % n;
  }
}

}  // namespace kgdelta
