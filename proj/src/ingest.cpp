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

#include "kgdelta/ingest.hpp"

#include <algorithm>
#include <ctime>
#include <map>
#include <unordered_set>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/errors.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta {
namespace fs = std::filesystem;
namespace {

struct RecordError : FormatError {
  using FormatError::FormatError;
};

std::string number_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::optional<EntityId> entity_from_datavalue(const Json& value) {
  if (auto it = value.find("id"); it != value.end() && it->is_string()) {
    return EntityId::try_parse(it->get<std::string>());
  }
  auto type = value.find("entity-type");
  auto num = value.find("numeric-id");
  if (type == value.end() || num == value.end() || !num->is_number_unsigned()) {
    return std::nullopt;
  }
  const auto n = num->get<std::uint64_t>();
  if (n == 0) return std::nullopt;
  if (*type == "item") return EntityId::item(n);
  if (*type == "property") return EntityId::property(n);
  return std::nullopt;
}

// Converts a Wikidata datavalue. Returns nullopt for unsupported types, which
// the caller stores as opaque literals.
std::optional<ObjectValue> convert_datavalue(const Json& dv) {
  const std::string type = dv.value("type", "");
  const Json& value = dv.at("value");
  if (type == "wikibase-entityid") {
    if (!value.is_object()) throw RecordError("entity datavalue is not an object");
    auto id = entity_from_datavalue(value);
    if (!id) return std::nullopt;  // lexemes, forms, senses
    return ObjectValue(*id);
  }
  if (type == "string") {
    return ObjectValue(Literal{text::normalize_literal(value.get<std::string>()),
                               LiteralType::kString});
  }
  if (type == "quantity") {
    std::string amount = number_text(value.at("amount"));
    const std::string unit = value.value("unit", "1");
    if (unit != "1") amount += " " + unit;
    return ObjectValue(Literal{text::normalize_literal(amount),
                               LiteralType::kQuantity});
  }
  if (type == "time") {
    return ObjectValue(Literal{text::normalize_literal(value.at("time").get<std::string>()),
                               LiteralType::kTime});
  }
  if (type == "globecoordinate") {
    std::string coord = number_text(value.at("latitude")) + "," +
                        number_text(value.at("longitude"));
    return ObjectValue(Literal{coord, LiteralType::kCoordinate});
  }
  if (type == "monolingualtext") {
    return ObjectValue(Literal{text::normalize_literal(value.at("text").get<std::string>()),
                               LiteralType::kMonolingual});
  }
  return std::nullopt;
}

std::string label_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) return v.value("value", "");
  throw RecordError("label value must be a string or {language, value}");
}

class Ingester {
 public:
  Ingester(const IngestConfig& config, TripleStore::Builder& builder,
           IngestStats& stats)
      : config_(config), builder_(builder), stats_(stats) {
    languages_.insert(config.languages.begin(), config.languages.end());
  }

  void line(std::string_view raw) {
    std::string_view s = text::trim(raw);
    if (s.empty() || s == "[" || s == "]" || s.front() == '#') return;
    if (s.back() == ',') s.remove_suffix(1);
    ++stats_.records;
    if (s.front() == '{') {
      Json j = Json::parse(s);
      if (j.contains("s")) {
        add_triple(triple_from_json(j));
      } else if (j.contains("id")) {
        entity(j);
      } else {
        throw RecordError("JSON record has neither 'id' nor 's'");
      }
    } else if (s.front() == '@') {
      tsv_label(s);
    } else {
      tsv_triple(s);
    }
  }

 private:
  static std::vector<std::string_view> split_tabs(std::string_view s) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    for (;;) {
      const auto tab = s.find('\t', start);
      cols.push_back(s.substr(start, tab == std::string_view::npos
                                         ? std::string_view::npos
                                         : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    return cols;
  }

  void tsv_triple(std::string_view s) {
    auto cols = split_tabs(s);
    if (cols.size() < 4 || cols.size() > 6) {
      throw RecordError("TSV triple needs 4 to 6 columns");
    }
    Triple t;
    t.subject = EntityId::parse(cols[0]);
    t.predicate = EntityId::parse(cols[1]);
    if (cols[2] == "entity") {
      t.object = EntityId::parse(cols[3]);
    } else {
      auto type = literal_type_from_string(cols[2]);
      if (!type) throw RecordError("unknown object kind '" + std::string(cols[2]) + "'");
      t.object = Literal{text::normalize_literal(cols[3]), *type};
    }
    if (cols.size() >= 5 && !cols[4].empty()) {
      auto rank = rank_from_string(cols[4]);
      if (!rank) throw RecordError("unknown rank '" + std::string(cols[4]) + "'");
      t.rank = *rank;
    }
    if (cols.size() == 6 && !cols[5].empty()) t.statement_id = std::string(cols[5]);
    add_triple(std::move(t));
  }

  void tsv_label(std::string_view s) {
    auto cols = split_tabs(s);
    if (cols.size() != 4) throw RecordError("label directive needs 4 columns");
    const EntityId id = EntityId::parse(cols[1]);
    const std::string lang(cols[2]);
    if (!languages_.count(lang)) return;
    auto& rec = pending_labels_[{id, lang}];
    rec.entity = id;
    rec.language = lang;
    if (cols[0] == "@label") {
      rec.label = std::string(cols[3]);
    } else if (cols[0] == "@alias") {
      rec.aliases.emplace_back(cols[3]);
    } else {
      throw RecordError("unknown directive '" + std::string(cols[0]) + "'");
    }
  }

  void add_triple(Triple t) {
    if (!t.subject.is_item()) throw RecordError("subject must be an item id");
    if (!t.predicate.is_property()) {
      throw RecordError("predicate must be a property id");
    }
    ++stats_.statements;
    builder_.add(std::move(t));
  }

  void entity(const Json& j) {
    const EntityId id = EntityId::parse(j.at("id").get<std::string>());
    std::vector<LabelRecord> labels;
    if (auto it = j.find("labels"); it != j.end()) {
      for (const auto& [lang, v] : it->items()) {
        if (!languages_.count(lang)) continue;
        labels.push_back(LabelRecord{id, label_value(v), {}, lang});
      }
    }
    if (auto it = j.find("aliases"); it != j.end()) {
      for (const auto& [lang, values] : it->items()) {
        if (!languages_.count(lang)) continue;
        auto rec = std::find_if(labels.begin(), labels.end(),
                                [&](const LabelRecord& r) { return r.language == lang; });
        if (rec == labels.end()) continue;  // aliases without a label are unusable
        for (const auto& v : values) rec->aliases.push_back(label_value(v));
      }
    }

    std::vector<Triple> triples;
    if (auto it = j.find("claims"); it != j.end()) {
      for (const auto& [prop, statements] : it->items()) {
        const EntityId predicate = EntityId::parse(prop);
        for (const auto& st : statements) statement(id, predicate, st, triples);
      }
    }
    // Only commit once the whole record parsed.
    for (auto& l : labels) builder_.add_label(std::move(l));
    for (auto& t : triples) {
      if (!id.is_item()) {
        ++stats_.non_item_statements;
        continue;
      }
      add_triple(std::move(t));
    }
  }

  void statement(EntityId subject, EntityId predicate, const Json& st,
                 std::vector<Triple>& out) {
    const Json& snak = st.at("mainsnak");
    if (snak.value("snaktype", "value") != "value" || !snak.contains("datavalue")) {
      ++stats_.skipped_snaks;
      return;
    }
    Triple t;
    t.subject = subject;
    t.predicate = predicate;
    if (auto it = snak.find("property"); it != snak.end()) {
      if (EntityId::parse(it->get<std::string>()) != predicate) {
        throw RecordError("mainsnak property differs from claim key");
      }
    }
    const Json& dv = snak.at("datavalue");
    if (auto obj = convert_datavalue(dv)) {
      t.object = std::move(*obj);
    } else {
      ++stats_.unsupported_datatypes;
      t.object = Literal{dv.dump(), LiteralType::kOpaque};
    }
    auto rank = rank_from_string(st.value("rank", "normal"));
    if (!rank) throw RecordError("unknown statement rank");
    t.rank = *rank;
    if (auto it = st.find("id"); it != st.end() && it->is_string()) {
      t.statement_id = it->get<std::string>();
    } else if (auto it2 = st.find("statement_id"); it2 != st.end() && it2->is_string()) {
      t.statement_id = it2->get<std::string>();
    }
    if (auto it = st.find("qualifiers"); it != st.end() && !it->empty()) {
      t.qualifiers = it->dump();
    }
    out.push_back(std::move(t));
  }

 public:
  void flush_labels() {
    for (auto& [key, rec] : pending_labels_) builder_.add_label(std::move(rec));
    pending_labels_.clear();
  }

 private:
  const IngestConfig& config_;
  TripleStore::Builder& builder_;
  IngestStats& stats_;
  std::unordered_set<std::string> languages_;
  std::map<std::pair<EntityId, std::string>, LabelRecord> pending_labels_;
};

std::string default_snapshot_id(const fs::path& p) {
  std::string name = p.filename().string();
  const auto dot = name.find('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

std::string format_utc(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::ordered_json IngestStats::to_json() const {
  nlohmann::ordered_json j;
  j["lines"] = lines;
  j["records"] = records;
  j["malformed_records"] = malformed_records;
  j["statements"] = statements;
  j["skipped_snaks"] = skipped_snaks;
  j["unsupported_datatypes"] = unsupported_datatypes;
  j["non_item_statements"] = non_item_statements;
  j["duplicate_statement_ids"] = duplicate_statement_ids;
  j["deprecated"] = deprecated;
  j["triples"] = triples;
  j["distinct_entities"] = distinct_entities;
  j["labeled_entities"] = labeled_entities;
  j["unlabeled_entities"] = unlabeled_entities;
  return j;
}

IngestResult extract_triples(const fs::path& dump, const IngestConfig& config) {
  if (config.languages.empty()) throw ConfigError("at least one label language is required");
  IngestStats stats;
  TripleStore::Builder builder;
  builder.snapshot_id(config.snapshot_id.empty() ? default_snapshot_id(dump)
                                                 : config.snapshot_id);
  if (!config.timestamp.empty()) {
    builder.timestamp(config.timestamp);
  } else {
    std::error_code ec;
    const auto mtime = fs::last_write_time(dump, ec);
    if (ec) throw IoError("cannot stat '" + dump.string() + "'");
    builder.timestamp(format_utc(
        std::chrono::file_clock::to_sys(mtime)));
  }

  Ingester ingester(config, builder, stats);
  LineReader reader(dump);
  std::string line;
  while (reader.next(line)) {
    ++stats.lines;
    try {
      ingester.line(line);
    } catch (const std::exception& e) {
      // Json::exception and FormatError both land here.
      if (config.fail_fast) {
        throw FormatError(dump.string() + ":" + std::to_string(reader.line_number()) +
                          ": malformed record: " + e.what());
      }
      ++stats.malformed_records;
    }
  }
  ingester.flush_labels();

  TripleStore store = std::move(builder).build();
  stats.duplicate_statement_ids = store.duplicate_statement_ids();
  stats.triples = store.size();
  std::unordered_set<EntityId> entities;
  for (const Triple& t : store.triples()) {
    if (t.rank == Rank::kDeprecated) ++stats.deprecated;
    entities.insert(t.subject);
    if (auto e = t.object.entity_if()) entities.insert(*e);
  }
  stats.distinct_entities = entities.size();
  for (EntityId e : entities) {
    if (store.label(e, config.languages.front()) != nullptr) {
      ++stats.labeled_entities;
    } else {
      ++stats.unlabeled_entities;
    }
  }
  return {std::move(store), stats};
}

}  // namespace kgdelta
