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

#include "kgdelta/delta.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <tuple>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/errors.hpp"

namespace kgdelta {
namespace fs = std::filesystem;
namespace {

struct GroupView {
  EntityId subject;
  EntityId predicate;
  std::span<const Triple> triples;
};

bool key_less(const GroupView& a, const GroupView& b) {
  return std::tie(a.subject, a.predicate) < std::tie(b.subject, b.predicate);
}

class StoreGroups {
 public:
  explicit StoreGroups(const TripleStore& store) : triples_(store.triples()) {}

  bool next(GroupView& g) {
    if (pos_ >= triples_.size()) return false;
    const auto begin = pos_;
    const Triple& first = triples_[begin];
    while (pos_ < triples_.size() && triples_[pos_].subject == first.subject &&
           triples_[pos_].predicate == first.predicate) {
      ++pos_;
    }
    g = {first.subject, first.predicate, triples_.subspan(begin, pos_ - begin)};
    return true;
  }

 private:
  std::span<const Triple> triples_;
  std::size_t pos_ = 0;
};

class FileGroups {
 public:
  explicit FileGroups(const fs::path& path) : reader_(path), path_(path) {
    advance();
  }

  bool next(GroupView& g) {
    if (!lookahead_) return false;
    group_.clear();
    group_.push_back(std::move(*lookahead_));
    advance();
    while (lookahead_ && lookahead_->subject == group_.front().subject &&
           lookahead_->predicate == group_.front().predicate) {
      group_.push_back(std::move(*lookahead_));
      advance();
    }
    g = {group_.front().subject, group_.front().predicate, group_};
    return true;
  }

 private:
  void advance() {
    lookahead_.reset();
    while (reader_.next(line_)) {
      if (line_.empty()) continue;
      try {
        lookahead_ = triple_from_json(Json::parse(line_));
      } catch (const Json::exception& e) {
        throw FormatError(path_.string() + ":" + std::to_string(reader_.line_number()) +
                          ": " + e.what());
      }
      break;
    }
    if (lookahead_ && last_ && CanonicalLess{}(*lookahead_, *last_)) {
      throw FormatError(path_.string() + ":" + std::to_string(reader_.line_number()) +
                        ": triples are not in canonical order");
    }
    if (lookahead_) last_ = *lookahead_;
  }

  LineReader reader_;
  fs::path path_;
  std::string line_;
  std::optional<Triple> lookahead_;
  std::optional<Triple> last_;
  std::vector<Triple> group_;
};

std::vector<ObjectValue> live_objects(std::span<const Triple> triples) {
  std::vector<ObjectValue> out;
  for (const Triple& t : triples) {
    if (t.rank != Rank::kDeprecated) out.push_back(t.object);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t live_count(std::span<const Triple> triples) {
  return static_cast<std::size_t>(std::count_if(
      triples.begin(), triples.end(),
      [](const Triple& t) { return t.rank != Rank::kDeprecated; }));
}

template <typename Source0, typename Source1>
KnowledgeDelta merge_delta(Source0& older, Source1& newer) {
  KnowledgeDelta delta;
  auto& diag = delta.diagnostics;
  GroupView a, b;
  bool has_a = older.next(a);
  bool has_b = newer.next(b);

  auto insert_group = [&](const GroupView& g) {
    std::size_t n = 0;
    for (const Triple& t : g.triples) {
      if (t.rank == Rank::kDeprecated) continue;
      delta.insertions.push_back(t);
      ++n;
    }
    if (n == 0) return;
    diag.inserted_triples += n;
    ++diag.inserted_groups;
    diag.inserts_by_predicate[g.predicate] += n;
  };
  auto delete_group = [&](const GroupView& g) {
    const std::size_t n = live_count(g.triples);
    if (n == 0) return;
    diag.deleted_triples += n;
    ++diag.deleted_groups;
    ++diag.deletes_by_predicate[g.predicate];
  };

  while (has_a || has_b) {
    if (has_a && (!has_b || key_less(a, b))) {
      delete_group(a);
      has_a = older.next(a);
    } else if (has_b && (!has_a || key_less(b, a))) {
      insert_group(b);
      has_b = newer.next(b);
    } else {
      auto old_objects = live_objects(a.triples);
      auto new_objects = live_objects(b.triples);
      if (old_objects.empty()) {
        insert_group(b);
      } else if (new_objects.empty()) {
        delete_group(a);
      } else if (old_objects != new_objects) {
        delta.updates.push_back(UpdatedStatement{a.subject, a.predicate,
                                                 std::move(old_objects),
                                                 std::move(new_objects)});
        ++diag.updated_groups;
        ++diag.updates_by_predicate[a.predicate];
      }
      has_a = older.next(a);
      has_b = newer.next(b);
    }
  }
  return delta;
}

OrderedJson histogram_json(const std::map<EntityId, std::size_t>& h) {
  OrderedJson j = OrderedJson::object();
  for (const auto& [p, n] : h) j[p.str()] = n;
  return j;
}

std::map<EntityId, std::size_t> histogram_from_json(const Json& j) {
  std::map<EntityId, std::size_t> h;
  for (const auto& [k, v] : j.items()) h[EntityId::parse(k)] = v.get<std::size_t>();
  return h;
}

OrderedJson snapshot_json(const SnapshotInfo& s) {
  OrderedJson j;
  j["id"] = s.id;
  j["hash"] = s.hash;
  j["timestamp"] = s.timestamp;
  return j;
}

SnapshotInfo snapshot_from_json(const Json& j) {
  return SnapshotInfo{j.value("id", ""), j.value("hash", ""), j.value("timestamp", "")};
}

void finish(KnowledgeDelta& delta, SnapshotInfo from, SnapshotInfo to) {
  delta.from_snapshot = std::move(from);
  delta.to_snapshot = std::move(to);
  delta.diagnostics.timestamp_order_warning =
      !delta.from_snapshot.timestamp.empty() && !delta.to_snapshot.timestamp.empty() &&
      delta.to_snapshot.timestamp <= delta.from_snapshot.timestamp;
}

}  // namespace

nlohmann::ordered_json DeltaDiagnostics::to_json() const {
  OrderedJson j;
  j["inserted_triples"] = inserted_triples;
  j["inserted_groups"] = inserted_groups;
  j["updated_groups"] = updated_groups;
  j["deleted_groups"] = deleted_groups;
  j["deleted_triples"] = deleted_triples;
  j["timestamp_order_warning"] = timestamp_order_warning;
  j["inserts_by_predicate"] = histogram_json(inserts_by_predicate);
  j["updates_by_predicate"] = histogram_json(updates_by_predicate);
  j["deletes_by_predicate"] = histogram_json(deletes_by_predicate);
  return j;
}

KnowledgeDelta compute_delta(const TripleStore& older, const TripleStore& newer) {
  StoreGroups a(older);
  StoreGroups b(newer);
  KnowledgeDelta delta = merge_delta(a, b);
  finish(delta, older.snapshot(), newer.snapshot());
  return delta;
}

KnowledgeDelta compute_delta_streaming(const fs::path& older_prefix,
                                       const fs::path& newer_prefix) {
  FileGroups a(triples_path(older_prefix));
  FileGroups b(triples_path(newer_prefix));
  KnowledgeDelta delta = merge_delta(a, b);
  finish(delta, read_store_info(older_prefix), read_store_info(newer_prefix));
  return delta;
}

std::vector<Triple> delta_seed_triples(const KnowledgeDelta& delta,
                                       const TripleStore& newer) {
  std::vector<Triple> out = delta.insertions;
  for (const auto& u : delta.updates) {
    for (const Triple& t : newer.group(u.subject, u.predicate)) {
      if (t.rank != Rank::kDeprecated) out.push_back(t);
    }
  }
  return out;
}

void write_delta(const KnowledgeDelta& delta, const fs::path& prefix) {
  TextWriter w(fs::path(prefix.string() + ".jsonl"));
  for (const Triple& t : delta.insertions) {
    OrderedJson j;
    j["kind"] = "insert";
    j["triple"] = triple_to_json(t);
    w.line(j.dump());
  }
  for (const auto& u : delta.updates) {
    OrderedJson j;
    j["kind"] = "update";
    j["s"] = u.subject.str();
    j["p"] = u.predicate.str();
    j["old"] = OrderedJson::array();
    for (const auto& o : u.old_objects) j["old"].push_back(object_to_json(o));
    j["new"] = OrderedJson::array();
    for (const auto& o : u.new_objects) j["new"].push_back(object_to_json(o));
    w.line(j.dump());
  }
  w.close();

  OrderedJson d;
  d["from_snapshot"] = snapshot_json(delta.from_snapshot);
  d["to_snapshot"] = snapshot_json(delta.to_snapshot);
  d["counts"] = delta.diagnostics.to_json();
  write_text_file(fs::path(prefix.string() + ".diagnostics.json"), d.dump(2) + "\n");
}

KnowledgeDelta read_delta(const fs::path& prefix) {
  KnowledgeDelta delta;
  const Json d = read_json_file(fs::path(prefix.string() + ".diagnostics.json"));
  delta.from_snapshot = snapshot_from_json(d.at("from_snapshot"));
  delta.to_snapshot = snapshot_from_json(d.at("to_snapshot"));
  const Json& c = d.at("counts");
  auto& diag = delta.diagnostics;
  diag.inserted_triples = c.at("inserted_triples").get<std::size_t>();
  diag.inserted_groups = c.at("inserted_groups").get<std::size_t>();
  diag.updated_groups = c.at("updated_groups").get<std::size_t>();
  diag.deleted_groups = c.at("deleted_groups").get<std::size_t>();
  diag.deleted_triples = c.at("deleted_triples").get<std::size_t>();
  diag.timestamp_order_warning = c.at("timestamp_order_warning").get<bool>();
  diag.inserts_by_predicate = histogram_from_json(c.at("inserts_by_predicate"));
  diag.updates_by_predicate = histogram_from_json(c.at("updates_by_predicate"));
  diag.deletes_by_predicate = histogram_from_json(c.at("deletes_by_predicate"));

  LineReader r(fs::path(prefix.string() + ".jsonl"));
  std::string line;
  while (r.next(line)) {
    if (line.empty()) continue;
    const Json j = Json::parse(line);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "insert") {
      delta.insertions.push_back(triple_from_json(j.at("triple")));
    } else if (kind == "update") {
      UpdatedStatement u;
      u.subject = EntityId::parse(j.at("s").get<std::string>());
      u.predicate = EntityId::parse(j.at("p").get<std::string>());
      for (const auto& o : j.at("old")) u.old_objects.push_back(object_from_json(o));
      for (const auto& o : j.at("new")) u.new_objects.push_back(object_from_json(o));
      delta.updates.push_back(std::move(u));
    } else {
      throw FormatError("unknown delta record kind '" + kind + "'");
    }
  }
  return delta;
}

}  // namespace kgdelta
