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

#include "kgdelta/templates.hpp"

#include <set>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/errors.hpp"

namespace kgdelta {
namespace {

const std::set<std::string> kQuestionSlots = {"subject_label", "relation_phrase",
                                              "constraint_phrases", "fuzz_phrase"};
const std::set<std::string> kConstraintSlots = {"anchor", "relation_phrase"};

// Slot names used by a template; throws on an unterminated brace.
std::set<std::string> slots_of(std::string_view tmpl) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') continue;
    const auto close = tmpl.find('}', i);
    if (close == std::string_view::npos) {
      throw ConfigError("unterminated slot in template '" + std::string(tmpl) + "'");
    }
    out.emplace(tmpl.substr(i + 1, close - i - 1));
    i = close;
  }
  return out;
}

void check_slots(std::string_view tmpl, const std::set<std::string>& allowed,
                 const std::string& where) {
  for (const auto& s : slots_of(tmpl)) {
    if (!allowed.count(s)) throw ConfigError(where + ": unknown slot {" + s + "}");
  }
}

}  // namespace

std::string fill_slots(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') {
      out.push_back(tmpl[i]);
      continue;
    }
    const auto close = tmpl.find('}', i);
    if (close == std::string_view::npos) throw ConfigError("unterminated slot in template");
    const std::string name(tmpl.substr(i + 1, close - i - 1));
    auto it = values.find(name);
    if (it == values.end()) throw ConfigError("no value for slot {" + name + "}");
    out += it->second;
    i = close;
  }
  return out;
}

std::string serial_join(const std::vector<std::string>& items) {
  if (items.empty()) return {};
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    if (i + 1 == items.size()) out += "and ";
    out += items[i];
  }
  return out;
}

std::string with_indefinite_article(std::string_view phrase) {
  const char c = phrase.empty() ? 'x' : static_cast<char>(std::tolower(
                                            static_cast<unsigned char>(phrase.front())));
  const bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  return std::string(vowel ? "an " : "a ") + std::string(phrase);
}

TemplateSet TemplateSet::defaults() {
  TemplateSet t;
  t.relation_phrases = {
      {"P6", "head of government"},
      {"P17", "country"},
      {"P19", "place of birth"},
      {"P20", "place of death"},
      {"P26", "spouse"},
      {"P27", "country of citizenship"},
      {"P35", "head of state"},
      {"P36", "capital"},
      {"P39", "position held"},
      {"P50", "author"},
      {"P54", "sports team"},
      {"P57", "director"},
      {"P69", "alma mater"},
      {"P106", "occupation"},
      {"P108", "employer"},
      {"P118", "league"},
      {"P131", "administrative location"},
      {"P136", "genre"},
      {"P159", "headquarters location"},
      {"P166", "award received"},
      {"P169", "chief executive officer"},
      {"P276", "location"},
      {"P286", "head coach"},
      {"P361", "parent entity"},
      {"P463", "membership"},
      {"P488", "chairperson"},
      {"P495", "country of origin"},
      {"P641", "sport"},
      {"P1416", "affiliation"},
  };
  t.constraint_phrases = {
      {"P17>", "is located in {anchor}"},
      {"P19>", "was born in {anchor}"},
      {"P27>", "is a citizen of {anchor}"},
      {"P39>", "has held the position of {anchor}"},
      {"P54>", "has played for {anchor}"},
      {"P69>", "was educated at {anchor}"},
      {"P106>", "works as {anchor}"},
      {"P108>", "has worked for {anchor}"},
      {"P118>", "plays in {anchor}"},
      {"P131>", "is located in {anchor}"},
      {"P136>", "works in the genre {anchor}"},
      {"P166>", "has received {anchor}"},
      {"P361>", "is part of {anchor}"},
      {"P463>", "is a member of {anchor}"},
      {"P495>", "originates from {anchor}"},
      {"P641>", "competes in {anchor}"},
      {"P1416>", "is affiliated with {anchor}"},
      {"P54<", "had {anchor} on its roster"},
      {"P463<", "has {anchor} as a member"},
      {"default>", "has {relation_phrase} {anchor}"},
      {"default<", "is the {relation_phrase} of {anchor}"},
  };
  t.templates[Level::kL1] = {
      {"default", "What is the {relation_phrase} of {subject_label}?"},
      {"P17", "In which country is {subject_label}?"},
      {"P17@Q2020153", "In which country will the {subject_label} conference be held?"},
      {"P54", "Which team does {subject_label} play for?"},
      {"P286", "Who is the head coach of {subject_label}?"},
      {"P6", "Who is the head of government of {subject_label}?"},
      {"P35", "Who is the head of state of {subject_label}?"},
      {"P169", "Who is the chief executive officer of {subject_label}?"},
      {"P488", "Who chairs {subject_label}?"},
  };
  t.templates[Level::kL2] = {
      {"default", "Which entity {constraint_phrases}?"},
      {"P54>", "Which football player {constraint_phrases}?"},
      {"P69>", "Which person {constraint_phrases}?"},
      {"P108>", "Which person {constraint_phrases}?"},
  };
  t.templates[Level::kL3] = t.templates[Level::kL2];
  return t;
}

TemplateSet TemplateSet::from_json(const nlohmann::json& j) {
  TemplateSet t;
  try {
    t.language = j.value("language", t.language);
    t.relation_phrases = j.at("relation_phrases").get<std::map<std::string, std::string>>();
    t.constraint_phrases = j.at("constraint_phrases").get<std::map<std::string, std::string>>();
    for (const auto& [name, table] : j.at("templates").items()) {
      auto level = level_from_string(name);
      if (!level) throw ConfigError("unknown template level '" + name + "'");
      t.templates[*level] = table.get<std::map<std::string, std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid template file: ") + e.what());
  }
  return t;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::ordered_json TemplateSet::to_json() const {
  nlohmann::ordered_json j;
  j["language"] = language;
  j["relation_phrases"] = relation_phrases;
  j["constraint_phrases"] = constraint_phrases;
  j["templates"] = nlohmann::ordered_json::object();
  for (const auto& [level, table] : templates) j["templates"][std::string(to_string(level))] = table;
  return j;
}

void TemplateSet::validate(const std::vector<EntityId>& constraint_predicates) const {
  if (language.empty()) throw ConfigError("template language must not be empty");
  for (Level level : kAllLevels) {
    auto it = templates.find(level);
    if (it == templates.end() || !it->second.count("default")) {
      throw ConfigError("no default template for " + std::string(to_string(level)));
    }
    for (const auto& [key, tmpl] : it->second) {
      check_slots(tmpl, kQuestionSlots,
                  "template " + std::string(to_string(level)) + "/" + key);
    }
  }
  for (const auto& [key, phrase] : constraint_phrases) {
    check_slots(phrase, kConstraintSlots, "constraint phrase " + key);
    if (!slots_of(phrase).count("anchor")) {
      throw ConfigError("constraint phrase " + key + " lacks {anchor}");
    }
  }
  for (const char* key : {"default>", "default<"}) {
    if (!constraint_phrases.count(key)) throw ConfigError(std::string("missing constraint phrase ") + key);
  }
  for (const auto& p : constraint_predicates) {
    if (!relation_phrases.count(p.str())) {
      throw ConfigError("no relation phrase for constraint predicate " + p.str());
    }
  }
}

const std::string& TemplateSet::select(Level level, const std::vector<std::string>& keys) const {
  auto it = templates.find(level);
  if (it != templates.end()) {
    for (const auto& k : keys) {
      if (auto t = it->second.find(k); t != it->second.end()) return t->second;
    }
    if (auto t = it->second.find("default"); t != it->second.end()) return t->second;
  }
  throw ConfigError("no template for " + std::string(to_string(level)));
}

}  // namespace kgdelta
