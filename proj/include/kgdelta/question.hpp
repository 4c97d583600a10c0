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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgdelta/entity.hpp"
#include "kgdelta/sparql.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

enum class Level { kL1 = 1, kL2 = 2, kL3 = 3 };

std::string_view to_string(Level level);
std::optional<Level> level_from_string(std::string_view s);
inline constexpr Level kAllLevels[] = {Level::kL1, Level::kL2, Level::kL3};

/// One broadened constraint: block `block_index` had its anchor replaced by
/// a variable typed with `cls`, reached `depth` edges above the anchor.
struct FuzzRecord {
  std::size_t block_index = 0;
  sparql::PatternBlock original;
  sparql::PatternBlock broadened;
  EntityId anchor;
  EntityId cls;
  int depth = 1;
  std::size_t original_size = 0;
  std::size_t broadened_size = 0;

  friend bool operator==(const FuzzRecord&, const FuzzRecord&) = default;
};

struct Provenance {
  SnapshotInfo from;
  SnapshotInfo to;
  std::string created_at;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// A verified question: `spec` has exactly one answer, `gold`, on the newer
/// snapshot.
struct QuestionInstance {
  std::string id;
  Level level = Level::kL1;
  sparql::QuerySpec spec;
  std::string sparql;
  ObjectValue gold;
  std::string gold_label;
  std::vector<std::string> gold_aliases;
  std::vector<Triple> seed_triples;
  /// Constraint blocks in the order they were added; the seed block first.
  std::vector<sparql::PatternBlock> constraints_used;
  std::optional<FuzzRecord> fuzz;
  Provenance provenance;
  /// Natural-language text; empty until rendered.
  std::string question;

  friend bool operator==(const QuestionInstance&, const QuestionInstance&) = default;
};

/// Level prefix plus the first 16 hex digits of sha256 over the SPARQL text
/// and gold answer.
std::string instance_id(Level level, const std::string& sparql, const ObjectValue& gold);

/// Fills sparql, gold label/aliases (first language in `language`) and id.
void finish_instance(QuestionInstance& inst, const TripleStore& g1, std::string_view language);

nlohmann::ordered_json spec_to_json(const sparql::QuerySpec& spec);
sparql::QuerySpec spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json question_to_json(const QuestionInstance& inst);
/// Throws FormatError, including when the stored SPARQL text disagrees with
/// the structured spec.
QuestionInstance question_from_json(const nlohmann::json& j);

void write_questions(const std::vector<QuestionInstance>& instances,
                     const std::filesystem::path& path);
std::vector<QuestionInstance> read_questions(const std::filesystem::path& path);

}  // namespace kgdelta
