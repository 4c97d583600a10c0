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
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/entity.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

/// An (s, r) group whose non-deprecated object set differs between the two
/// snapshots. Object lists are sorted and unique.
struct UpdatedStatement {
  EntityId subject;
  EntityId predicate;
  std::vector<ObjectValue> old_objects;
  std::vector<ObjectValue> new_objects;

  friend bool operator==(const UpdatedStatement&, const UpdatedStatement&) = default;
};

struct DeltaDiagnostics {
  std::size_t inserted_triples = 0;
  std::size_t inserted_groups = 0;
  std::size_t updated_groups = 0;
  std::size_t deleted_groups = 0;
  std::size_t deleted_triples = 0;
  /// Set when the newer snapshot's timestamp is not after the older one's.
  bool timestamp_order_warning = false;
  std::map<EntityId, std::size_t> inserts_by_predicate;
  std::map<EntityId, std::size_t> updates_by_predicate;
  std::map<EntityId, std::size_t> deletes_by_predicate;

  nlohmann::ordered_json to_json() const;

  friend bool operator==(const DeltaDiagnostics&, const DeltaDiagnostics&) = default;
};

/// Insertions are triples of (s, r) groups absent from the older snapshot;
/// updates are groups present in both with different object sets. Deletions
/// only show up in the diagnostics. Deprecated statements are ignored on both
/// sides and statement ids play no part in equality.
struct KnowledgeDelta {
  std::vector<Triple> insertions;       // canonical order
  std::vector<UpdatedStatement> updates;  // ordered by (s, r)
  SnapshotInfo from_snapshot;
  SnapshotInfo to_snapshot;
  DeltaDiagnostics diagnostics;

  bool empty() const { return insertions.empty() && updates.empty(); }
};

KnowledgeDelta compute_delta(const TripleStore& older, const TripleStore& newer);

/// Same result as compute_delta, computed by a streaming merge over two
/// canonical triple files (as written by write_store) without loading either
/// snapshot. Memory is bounded by the largest (s, r) group.
KnowledgeDelta compute_delta_streaming(const std::filesystem::path& older_prefix,
                                       const std::filesystem::path& newer_prefix);

/// Triples of the newer snapshot that the delta introduces: every insertion,
/// plus, for each update, the newer-side statements of the group.
std::vector<Triple> delta_seed_triples(const KnowledgeDelta& delta,
                                       const TripleStore& newer);

/// `<prefix>.jsonl` with one `{"kind":"insert"|"update",…}` record per line
/// and `<prefix>.diagnostics.json`.
void write_delta(const KnowledgeDelta& delta, const std::filesystem::path& prefix);
KnowledgeDelta read_delta(const std::filesystem::path& prefix);

}  // namespace kgdelta
