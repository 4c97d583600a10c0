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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgdelta/entity.hpp"

namespace kgdelta {

struct SnapshotInfo {
  std::string id;
  /// sha256 over the canonical triple stream, see hash_store().
  std::string hash;
  /// ISO-8601 UTC.
  std::string timestamp;

  friend bool operator==(const SnapshotInfo&, const SnapshotInfo&) = default;
};

/// Immutable, indexed snapshot of a knowledge graph. Triples are held in
/// canonical order, which makes every (subject) and (subject, predicate)
/// group contiguous. Built only through TripleStore::Builder; safe to share
/// across threads once built.
class TripleStore {
 public:
  class Builder;

  TripleStore();

  const SnapshotInfo& snapshot() const { return snapshot_; }
  std::span<const Triple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  const Triple& at(std::uint32_t index) const { return triples_[index]; }

  std::span<const Triple> subject_range(EntityId subject) const;
  std::span<const Triple> group(EntityId subject, EntityId predicate) const;

  /// Indices of triples with the given object, ordered by (predicate,
  /// subject).
  std::span<const std::uint32_t> by_object(const ObjectValue& object) const;
  std::span<const std::uint32_t> by_object(const ObjectValue& object,
                                           EntityId predicate) const;
  /// Indices of triples with the given predicate, in canonical order.
  std::span<const std::uint32_t> by_predicate(EntityId predicate) const;

  bool contains(EntityId s, EntityId p, const ObjectValue& o,
                bool include_deprecated) const;

  /// Label records sorted by (entity, language).
  std::span<const LabelRecord> labels() const { return labels_; }
  const LabelRecord* label(EntityId entity, std::string_view language) const;

  /// Entities whose label or alias in `language` has the given surface key
  /// (see text::surface_key). Sorted, unique.
  std::span<const EntityId> homonyms(std::string_view surface_key,
                                     std::string_view language) const;

  /// True if the entity occurs in any triple or has a label record.
  bool mentions(EntityId entity) const;

  /// Number of statement ids dropped as duplicates when the store was built.
  std::size_t duplicate_statement_ids() const { return duplicate_sids_; }

 private:
  SnapshotInfo snapshot_;
  std::vector<Triple> triples_;
  std::vector<std::uint32_t> by_object_;
  std::vector<std::uint32_t> by_predicate_;
  std::vector<LabelRecord> labels_;
  std::unordered_map<std::string, std::unordered_map<std::string, std::vector<EntityId>>>
      homonyms_;  // language -> surface key -> entities
  std::size_t duplicate_sids_ = 0;
};

class TripleStore::Builder {
 public:
  Builder& snapshot_id(std::string id);
  Builder& timestamp(std::string ts);

  Builder& add(Triple t);
  /// Label text and aliases are trimmed and NFC-normalized; aliases equal to
  /// the label or to each other are dropped. A record whose label is empty
  /// after normalization is ignored and false is returned. A second record
  /// for the same (entity, language) replaces the first.
  bool add_label(LabelRecord record);

  std::size_t triple_count() const { return triples_.size(); }

  /// Sorts, drops later statements sharing a statement id, builds indexes and
  /// computes the snapshot hash.
  TripleStore build() &&;

 private:
  std::string snapshot_id_;
  std::string timestamp_;
  std::vector<Triple> triples_;
  std::vector<LabelRecord> labels_;
};

}  // namespace kgdelta
