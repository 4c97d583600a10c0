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

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/errors.hpp"
#include "kgdelta/question.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

struct SynthBudget {
  /// Constraint blocks added on top of the seed block.
  std::size_t max_constraints = 4;
  /// Broadening candidates tried per seed at L3.
  std::size_t max_fuzz_attempts = 16;
  /// Wall-clock cap per seed. Hitting it rejects the seed with reason
  /// time_cap, which is the one source of nondeterminism; keep it generous.
  std::chrono::milliseconds per_seed_time_cap{30000};

  /// Throws ConfigError unless every field is positive.
  void validate() const;
};

/// Predicates tried as attribute constraints by default: occupation, country,
/// citizenship, affiliation, sports team, employer, education, member of,
/// position held, genre, located in, country of origin, part of, league,
/// sport, award received.
std::vector<EntityId> default_constraint_predicates();

struct SynthConfig {
  SynthBudget budget;
  /// Attribute predicates usable as constraints; the seed predicate is always
  /// allowed as well.
  std::vector<EntityId> constraint_predicates = default_constraint_predicates();
  /// Never used in any generated pattern.
  std::set<EntityId> excluded_predicates;
  std::string language = "en";
  /// Two-hop paths considered per L3 attempt.
  std::size_t max_hop_candidates = 256;
  /// Worker threads; 0 means hardware concurrency.
  std::size_t workers = 0;
  /// Provenance timestamp; when empty, the newer snapshot's timestamp.
  std::string created_at;

  /// Constraint list above plus the default excluded predicates.
  static SynthConfig defaults();
  void validate() const;
  nlohmann::ordered_json to_json() const;
  /// Missing keys keep their defaults. Throws ConfigError.
  static SynthConfig from_json(const nlohmann::json& j);
};

/// Why a tier declined a seed.
enum class SynthReject {
  kMultipleObjects,     // L1: (a, r) has several live objects
  kNoLiveObject,        // L1: seed absent or deprecated in the newer snapshot
  kLiteralTarget,       // L2/L3: only literal targets available
  kNoConstraints,       // L2/L3: target has no usable attribute edges
  kNotUnique,           // L2: budget spent without reaching one answer
  kNoFuzzCandidate,     // L3: no anchor has a class that enlarges its block
  kNoDisambiguatingHop, // L3: no extra block restores a single answer
  kTimeCap,
};

std::string_view to_string(SynthReject r);

class SynthError : public Error {
 public:
  using Error::Error;
};

/// Outcome of one tier on one seed: an instance or the reason for absence.
struct TierResult {
  std::optional<QuestionInstance> instance;
  std::optional<SynthReject> reason;
};

/// Context shared by the tier routines.
struct SynthContext {
  const TripleStore& g1;
  SnapshotInfo from;
  const SynthConfig& config;
  /// Work past this point is abandoned with reason time_cap.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

TierResult synthesize_L1(const Triple& seed, const SynthContext& ctx);
TierResult synthesize_L2(const Triple& seed, const SynthContext& ctx);
TierResult synthesize_L3(const Triple& seed, const SynthContext& ctx);

/// Dispatches to one tier.
TierResult synthesize_question(const Triple& seed, const SynthContext& ctx, Level level);

struct SynthReport {
  std::size_t seeds = 0;
  std::map<Level, std::size_t> emitted;
  std::map<Level, std::map<std::string, std::size_t>> rejected;
  std::size_t seeds_without_instance = 0;

  nlohmann::ordered_json to_json() const;
};

struct SynthOutput {
  std::vector<QuestionInstance> instances;
  SynthReport report;
};

/// Tries L1, then L2, then L3 on every seed and keeps the first success.
/// Seeds are processed in parallel; the output follows canonical seed order.
SynthOutput synthesize_all(const std::vector<Triple>& seeds, const TripleStore& g1,
                           const SnapshotInfo& from, const SynthConfig& config);

}  // namespace kgdelta
