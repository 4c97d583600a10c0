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

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgdelta/delta.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

/// The 31 meta/formatting properties excluded from question seeds by default.
/// P443 and P3713 both denote pronunciation audio; both are kept.
inline constexpr std::array<std::uint64_t, 31> kDefaultExcludedPredicates = {
    18,   31,   279,  373,  443,  460,  856,  910,  973,  1151, 1343,
    1424, 1559, 1629, 1630, 1659, 1687, 1696, 1705, 1793, 1855, 1889,
    1921, 2302, 2700, 2875, 2916, 2959, 3254, 3709, 3713};

enum class RejectReason {
  kExcludedPredicate,
  kMissingLabel,
  kAmbiguousSurfaceForm,
  kDeprecatedStatement,
  kContradictoryStatement,
  kDuplicate,
};

inline constexpr std::array<RejectReason, 6> kAllRejectReasons = {
    RejectReason::kExcludedPredicate,     RejectReason::kMissingLabel,
    RejectReason::kAmbiguousSurfaceForm,  RejectReason::kDeprecatedStatement,
    RejectReason::kContradictoryStatement, RejectReason::kDuplicate};

std::string_view to_string(RejectReason r);

struct FilterConfig {
  std::set<EntityId> excluded_predicates;
  /// When non-empty, only these predicates pass step (i); anything else is
  /// rejected as excluded_predicate.
  std::set<EntityId> allowed_predicates;
  std::vector<std::string> required_label_languages{"en"};
  /// A subject/object label shared (by surface form) with more than this many
  /// entities is ambiguous.
  std::size_t ambiguity_max_homonyms = 3;
  /// Single-valued predicates: a group with two or more normal-rank objects
  /// and no preferred one is contradictory.
  std::set<EntityId> functional_predicates;

  /// Excluded list seeded with kDefaultExcludedPredicates; functional
  /// predicates date of birth/death, inception, dissolution, sex or gender.
  static FilterConfig defaults();

  /// Throws ConfigError on violated invariants.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static FilterConfig from_json(const nlohmann::json& j);

  friend bool operator==(const FilterConfig&, const FilterConfig&) = default;
};

/// Reads one property id per line; '#' starts a comment.
std::set<EntityId> load_predicate_list(const std::filesystem::path& path);

struct FilterReport {
  std::size_t input_count = 0;
  std::size_t kept_count = 0;
  std::map<RejectReason, std::size_t> rejected;

  std::size_t rejected_total() const;
  bool balanced() const { return input_count == kept_count + rejected_total(); }
  nlohmann::ordered_json to_json() const;
};

struct FilterResult {
  std::vector<Triple> pool;
  FilterReport report;
};

/// Statement id when present, otherwise `s|r|` followed by the NFC-lowercased
/// object text (entity id or literal value).
std::string dedup_key(const Triple& triple);
/// As above but the object text is the entity's label in `language` when the
/// store has one.
std::string dedup_key(const Triple& triple, const TripleStore& labels,
                      std::string_view language);

/// Reduces the delta's seed triples (see delta_seed_triples) to the candidate
/// pool. Steps run in a fixed order: predicate exclusion, entity quality
/// (labels, ambiguity), statement validity (deprecated, contradictory,
/// duplicate). The first failing step decides the rejection reason.
FilterResult filter_candidates(const KnowledgeDelta& delta, const TripleStore& newer,
                               const FilterConfig& config);

/// Same filter over an explicit candidate list.
FilterResult filter_triples(const std::vector<Triple>& candidates,
                            const TripleStore& newer, const FilterConfig& config);

}  // namespace kgdelta
