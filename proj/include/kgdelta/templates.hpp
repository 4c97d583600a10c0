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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgdelta/entity.hpp"
#include "kgdelta/question.hpp"

namespace kgdelta {

/// Question templates and phrase tables for one language.
///
/// relation_phrases maps a property id to a noun phrase ("country").
/// constraint_phrases maps "P54>" (target is the subject) or "P54<" (target is
/// the object) to a verb phrase with an {anchor} slot; "default>" and
/// "default<" may also use {relation_phrase}.
/// templates maps a level to keys tried in order "P@Q" (predicate and a
/// class of the relevant entity), "P", "default". Level-1 keys name the seed
/// predicate; multi-block keys carry the seed direction, e.g. "P54>".
struct TemplateSet {
  std::string language = "en";
  std::map<std::string, std::string> relation_phrases;
  std::map<std::string, std::string> constraint_phrases;
  std::map<Level, std::map<std::string, std::string>> templates;

  static TemplateSet defaults();
  static TemplateSet from_json(const nlohmann::json& j);
  static TemplateSet load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;

  /// Throws ConfigError on unknown slots, missing defaults, or an allow-list
  /// predicate without a relation phrase.
  void validate(const std::vector<EntityId>& constraint_predicates) const;

  /// First template found for the candidate keys; ConfigError when even the
  /// level default is absent.
  const std::string& select(Level level, const std::vector<std::string>& keys) const;
};

/// Fills `{name}` slots in one pass; substituted text is not rescanned.
/// Throws ConfigError for a slot absent from `values`.
std::string fill_slots(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// "A", "A and B", "A, B, and C".
std::string serial_join(const std::vector<std::string>& items);

/// "a" or "an" followed by the phrase.
std::string with_indefinite_article(std::string_view phrase);

}  // namespace kgdelta
