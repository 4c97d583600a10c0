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

#include "kgdelta/triple_store.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_set>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta {
TripleStore::TripleStore() { snapshot_.hash = hash_store(*this); }

std::span<const Triple> TripleStore::subject_range(EntityId subject) const {
  auto lo = std::lower_bound(
      triples_.begin(), triples_.end(), subject,
      [](const Triple& t, EntityId s) { return t.subject < s; });
  auto hi = std::upper_bound(
      lo, triples_.end(), subject,
      [](EntityId s, const Triple& t) { return s < t.subject; });
  return {lo, hi};
}

std::span<const Triple> TripleStore::group(EntityId subject,
                                           EntityId predicate) const {
  auto key = std::make_pair(subject, predicate);
  auto lo = std::lower_bound(triples_.begin(), triples_.end(), key,
                             [](const Triple& t, const auto& k) {
                               return std::tie(t.subject, t.predicate) <
                                      std::tie(k.first, k.second);
                             });
  auto hi = std::upper_bound(lo, triples_.end(), key,
                             [](const auto& k, const Triple& t) {
                               return std::tie(k.first, k.second) <
                                      std::tie(t.subject, t.predicate);
                             });
  return {lo, hi};
}

std::span<const std::uint32_t> TripleStore::by_object(
    const ObjectValue& object) const {
  auto lo = std::lower_bound(by_object_.begin(), by_object_.end(), object,
                             [this](std::uint32_t i, const ObjectValue& o) {
                               return triples_[i].object < o;
                             });
  auto hi = std::upper_bound(lo, by_object_.end(), object,
                             [this](const ObjectValue& o, std::uint32_t i) {
                               return o < triples_[i].object;
                             });
  return {lo, hi};
}

std::span<const std::uint32_t> TripleStore::by_object(
    const ObjectValue& object, EntityId predicate) const {
  auto all = by_object(object);
  auto lo = std::lower_bound(all.begin(), all.end(), predicate,
                             [this](std::uint32_t i, EntityId p) {
                               return triples_[i].predicate < p;
                             });
  auto hi = std::upper_bound(lo, all.end(), predicate,
                             [this](EntityId p, std::uint32_t i) {
                               return p < triples_[i].predicate;
                             });
  return {lo, hi};
}

std::span<const std::uint32_t> TripleStore::by_predicate(
    EntityId predicate) const {
  auto lo = std::lower_bound(by_predicate_.begin(), by_predicate_.end(),
                             predicate, [this](std::uint32_t i, EntityId p) {
                               return triples_[i].predicate < p;
                             });
  auto hi = std::upper_bound(lo, by_predicate_.end(), predicate,
                             [this](EntityId p, std::uint32_t i) {
                               return p < triples_[i].predicate;
                             });
  return {lo, hi};
}

bool TripleStore::contains(EntityId s, EntityId p, const ObjectValue& o,
                           bool include_deprecated) const {
  for (const Triple& t : group(s, p)) {
    if (t.object == o && (include_deprecated || t.rank != Rank::kDeprecated)) {
      return true;
    }
  }
  return false;
}

const LabelRecord* TripleStore::label(EntityId entity,
                                      std::string_view language) const {
  auto it = std::lower_bound(
      labels_.begin(), labels_.end(), std::make_pair(entity, language),
      [](const LabelRecord& r, const auto& k) {
        return std::tie(r.entity, r.language) <
               std::tie(k.first, k.second);
      });
  if (it == labels_.end() || it->entity != entity || it->language != language) {
    return nullptr;
  }
  return &*it;
}

std::span<const EntityId> TripleStore::homonyms(
    std::string_view surface_key, std::string_view language) const {
  auto lang = homonyms_.find(std::string(language));
  if (lang == homonyms_.end()) return {};
  auto it = lang->second.find(std::string(surface_key));
  if (it == lang->second.end()) return {};
  return it->second;
}

bool TripleStore::mentions(EntityId entity) const {
  if (!subject_range(entity).empty()) return true;
  if (!by_object(ObjectValue(entity)).empty()) return true;
  auto it = std::lower_bound(
      labels_.begin(), labels_.end(), entity,
      [](const LabelRecord& r, EntityId e) { return r.entity < e; });
  return it != labels_.end() && it->entity == entity;
}

TripleStore::Builder& TripleStore::Builder::snapshot_id(std::string id) {
  snapshot_id_ = std::move(id);
  return *this;
}

TripleStore::Builder& TripleStore::Builder::timestamp(std::string ts) {
  timestamp_ = std::move(ts);
  return *this;
}

TripleStore::Builder& TripleStore::Builder::add(Triple t) {
  triples_.push_back(std::move(t));
  return *this;
}

bool TripleStore::Builder::add_label(LabelRecord record) {
  record.label = text::normalize_literal(record.label);
  if (record.label.empty()) return false;
  std::vector<std::string> aliases;
  for (auto& a : record.aliases) {
    std::string norm = text::normalize_literal(a);
    if (norm.empty() || norm == record.label) continue;
    if (std::find(aliases.begin(), aliases.end(), norm) != aliases.end()) {
      continue;
    }
    aliases.push_back(std::move(norm));
  }
  record.aliases = std::move(aliases);
  labels_.push_back(std::move(record));
  return true;
}

TripleStore TripleStore::Builder::build() && {
  TripleStore store;
  std::sort(triples_.begin(), triples_.end(), CanonicalLess{});
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  // First statement (in canonical order) wins a shared statement id.
  std::vector<char> keep(triples_.size(), 1);
  {
    std::unordered_set<std::string_view> seen_sids;
    for (std::size_t i = 0; i < triples_.size(); ++i) {
      const auto& sid = triples_[i].statement_id;
      if (sid && !seen_sids.insert(*sid).second) {
        keep[i] = 0;
        ++store.duplicate_sids_;
      }
    }
  }
  store.triples_.reserve(triples_.size() - store.duplicate_sids_);
  for (std::size_t i = 0; i < triples_.size(); ++i) {
    if (keep[i]) store.triples_.push_back(std::move(triples_[i]));
  }
  triples_.clear();

  const auto n = static_cast<std::uint32_t>(store.triples_.size());
  store.by_object_.resize(n);
  store.by_predicate_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    store.by_object_[i] = i;
    store.by_predicate_[i] = i;
  }
  const auto& ts = store.triples_;
  std::sort(store.by_object_.begin(), store.by_object_.end(),
            [&ts](std::uint32_t a, std::uint32_t b) {
              return std::tie(ts[a].object, ts[a].predicate, ts[a].subject, a) <
                     std::tie(ts[b].object, ts[b].predicate, ts[b].subject, b);
            });
  std::stable_sort(store.by_predicate_.begin(), store.by_predicate_.end(),
                   [&ts](std::uint32_t a, std::uint32_t b) {
                     return ts[a].predicate < ts[b].predicate;
                   });

  // Later records for the same (entity, language) win.
  std::stable_sort(labels_.begin(), labels_.end(),
                   [](const LabelRecord& a, const LabelRecord& b) {
                     return std::tie(a.entity, a.language) <
                            std::tie(b.entity, b.language);
                   });
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i + 1 < labels_.size() && labels_[i].entity == labels_[i + 1].entity &&
        labels_[i].language == labels_[i + 1].language) {
      continue;
    }
    store.labels_.push_back(std::move(labels_[i]));
  }
  labels_.clear();

  for (const auto& r : store.labels_) {
    auto& by_key = store.homonyms_[r.language];
    auto add = [&](const std::string& surface) {
      std::string key = text::surface_key(surface);
      if (!key.empty()) by_key[std::move(key)].push_back(r.entity);
    };
    add(r.label);
    for (const auto& a : r.aliases) add(a);
  }
  for (auto& [lang, by_key] : store.homonyms_) {
    for (auto& [key, ids] : by_key) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
  }

  store.snapshot_.id = std::move(snapshot_id_);
  store.snapshot_.timestamp = std::move(timestamp_);
  store.snapshot_.hash = hash_store(store);
  return store;
}

}  // namespace kgdelta
