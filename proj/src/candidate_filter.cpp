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

#include "kgdelta/candidate_filter.hpp"

#include <algorithm>
#include <unordered_set>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/errors.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta {
namespace {

bool entity_has_labels(EntityId e, const TripleStore& store,
                       const std::vector<std::string>& languages) {
  return std::all_of(languages.begin(), languages.end(), [&](const std::string& lang) {
    return store.label(e, lang) != nullptr;
  });
}

bool is_ambiguous(EntityId e, const TripleStore& store, std::string_view lang,
                  std::size_t max_homonyms) {
  const LabelRecord* rec = store.label(e, lang);
  if (rec == nullptr) return false;
  return store.homonyms(text::surface_key(rec->label), lang).size() > max_homonyms;
}

bool is_contradictory(const Triple& t, const TripleStore& store) {
  std::vector<ObjectValue> normal;
  for (const Triple& g : store.group(t.subject, t.predicate)) {
    if (g.rank == Rank::kPreferred) return false;
    if (g.rank == Rank::kNormal) normal.push_back(g.object);
  }
  std::sort(normal.begin(), normal.end());
  normal.erase(std::unique(normal.begin(), normal.end()), normal.end());
  return normal.size() >= 2;
}

std::string key_prefix(const Triple& t) {
  return t.subject.str() + "|" + t.predicate.str() + "|";
}

}  // namespace

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kExcludedPredicate: return "excluded_predicate";
    case RejectReason::kMissingLabel: return "missing_label";
    case RejectReason::kAmbiguousSurfaceForm: return "ambiguous_surface_form";
    case RejectReason::kDeprecatedStatement: return "deprecated_statement";
    case RejectReason::kContradictoryStatement: return "contradictory_statement";
    case RejectReason::kDuplicate: return "duplicate";
  }
  return "unknown";
}

FilterConfig FilterConfig::defaults() {
  FilterConfig c;
  for (auto n : kDefaultExcludedPredicates) c.excluded_predicates.insert(EntityId::property(n));
  for (auto n : {21, 569, 570, 571, 576}) {
    c.functional_predicates.insert(EntityId::property(static_cast<std::uint64_t>(n)));
  }
  return c;
}

void FilterConfig::validate() const {
  if (ambiguity_max_homonyms < 1) {
    throw ConfigError("ambiguity_max_homonyms must be at least 1");
  }
  if (excluded_predicates.empty() && allowed_predicates.empty()) {
    throw ConfigError("either excluded_predicates or allowed_predicates must be non-empty");
  }
  for (EntityId p : excluded_predicates) {
    if (!p.is_property()) throw ConfigError("excluded predicate " + p.str() + " is not a property");
  }
  for (EntityId p : allowed_predicates) {
    if (!p.is_property()) throw ConfigError("allowed predicate " + p.str() + " is not a property");
  }
}

nlohmann::ordered_json FilterConfig::to_json() const {
  auto ids = [](const std::set<EntityId>& s) {
    OrderedJson a = OrderedJson::array();
    for (EntityId e : s) a.push_back(e.str());
    return a;
  };
  OrderedJson j;
  j["excluded_predicates"] = ids(excluded_predicates);
  j["allowed_predicates"] = ids(allowed_predicates);
  j["required_label_languages"] = required_label_languages;
  j["ambiguity_max_homonyms"] = ambiguity_max_homonyms;
  j["functional_predicates"] = ids(functional_predicates);
  j["dedup_strategy"] = "statement_id_then_sr_label";
  return j;
}

FilterConfig FilterConfig::from_json(const nlohmann::json& j) {
  FilterConfig c = defaults();
  auto ids = [](const Json& a) {
    std::set<EntityId> s;
    for (const auto& v : a) s.insert(EntityId::parse(v.get<std::string>()));
    return s;
  };
  try {
    if (j.contains("excluded_predicates")) c.excluded_predicates = ids(j["excluded_predicates"]);
    if (j.contains("allowed_predicates")) c.allowed_predicates = ids(j["allowed_predicates"]);
    if (j.contains("required_label_languages")) {
      c.required_label_languages = j["required_label_languages"].get<std::vector<std::string>>();
    }
    if (j.contains("ambiguity_max_homonyms")) {
      const auto v = j["ambiguity_max_homonyms"].get<long long>();
      if (v < 1) throw ConfigError("ambiguity_max_homonyms must be at least 1");
      c.ambiguity_max_homonyms = static_cast<std::size_t>(v);
    }
    if (j.contains("functional_predicates")) c.functional_predicates = ids(j["functional_predicates"]);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("filter config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("filter config: ") + e.what());
  }
  c.validate();
  return c;
}

std::set<EntityId> load_predicate_list(const std::filesystem::path& path) {
  std::set<EntityId> out;
  LineReader r(path);
  std::string line;
  while (r.next(line)) {
    std::string_view s = line;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = text::trim(s);
    if (s.empty()) continue;
    auto id = EntityId::try_parse(s);
    if (!id || !id->is_property()) {
      throw ConfigError(path.string() + ":" + std::to_string(r.line_number()) +
                        ": not a property id: '" + std::string(s) + "'");
    }
    out.insert(*id);
  }
  return out;
}

std::size_t FilterReport::rejected_total() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : rejected) n += count;
  return n;
}

nlohmann::ordered_json FilterReport::to_json() const {
  OrderedJson j;
  j["input_count"] = input_count;
  j["kept_count"] = kept_count;
  OrderedJson r = OrderedJson::object();
  for (RejectReason reason : kAllRejectReasons) {
    auto it = rejected.find(reason);
    r[std::string(to_string(reason))] = it == rejected.end() ? 0 : it->second;
  }
  j["rejected"] = r;
  return j;
}

std::string dedup_key(const Triple& triple) {
  if (triple.statement_id) return *triple.statement_id;
  return key_prefix(triple) + text::lower_nfc(triple.object.display());
}

std::string dedup_key(const Triple& triple, const TripleStore& labels,
                      std::string_view language) {
  if (triple.statement_id) return *triple.statement_id;
  if (auto e = triple.object.entity_if()) {
    if (const LabelRecord* rec = labels.label(*e, language)) {
      return key_prefix(triple) + text::lower_nfc(rec->label);
    }
  }
  return dedup_key(triple);
}

FilterResult filter_triples(const std::vector<Triple>& candidates,
                            const TripleStore& newer, const FilterConfig& config) {
  config.validate();
  FilterResult result;
  auto& report = result.report;
  report.input_count = candidates.size();
  const std::string primary_lang = config.required_label_languages.empty()
                                       ? std::string("en")
                                       : config.required_label_languages.front();
  std::unordered_set<std::string> seen_keys;

  auto check = [&](const Triple& t) -> std::optional<RejectReason> {
    if (config.excluded_predicates.count(t.predicate) ||
        (!config.allowed_predicates.empty() && !config.allowed_predicates.count(t.predicate))) {
      return RejectReason::kExcludedPredicate;
    }
    std::vector<EntityId> entities{t.subject};
    if (auto e = t.object.entity_if()) entities.push_back(*e);
    for (EntityId e : entities) {
      if (!entity_has_labels(e, newer, config.required_label_languages)) {
        return RejectReason::kMissingLabel;
      }
    }
    if (t.qualifiers.empty()) {
      for (EntityId e : entities) {
        if (is_ambiguous(e, newer, primary_lang, config.ambiguity_max_homonyms)) {
          return RejectReason::kAmbiguousSurfaceForm;
        }
      }
    }
    if (t.rank == Rank::kDeprecated) return RejectReason::kDeprecatedStatement;
    if (config.functional_predicates.count(t.predicate) && is_contradictory(t, newer)) {
      return RejectReason::kContradictoryStatement;
    }
    if (!seen_keys.insert(dedup_key(t, newer, primary_lang)).second) {
      return RejectReason::kDuplicate;
    }
    return std::nullopt;
  };

  for (const Triple& t : candidates) {
    if (auto reason = check(t)) {
      ++report.rejected[*reason];
    } else {
      result.pool.push_back(t);
    }
  }
  report.kept_count = result.pool.size();
  return result;
}

FilterResult filter_candidates(const KnowledgeDelta& delta, const TripleStore& newer,
                               const FilterConfig& config) {
  return filter_triples(delta_seed_triples(delta, newer), newer, config);
}

}  // namespace kgdelta
