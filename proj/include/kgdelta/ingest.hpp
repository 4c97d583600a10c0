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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/triple_store.hpp"

namespace kgdelta {

struct IngestConfig {
  /// Label languages captured; the first one decides label completeness
  /// accounting.
  std::vector<std::string> languages{"en"};
  /// Abort on the first malformed record instead of skipping and counting it.
  bool fail_fast = false;
  /// Defaults to the file name up to the first '.'.
  std::string snapshot_id;
  /// ISO-8601 UTC. Defaults to the file's modification time.
  std::string timestamp;
};

struct IngestStats {
  std::size_t lines = 0;
  std::size_t records = 0;
  std::size_t malformed_records = 0;
  std::size_t statements = 0;
  std::size_t skipped_snaks = 0;            // somevalue / novalue
  std::size_t unsupported_datatypes = 0;    // kept as opaque literals
  std::size_t non_item_statements = 0;      // statements on property pages
  std::size_t duplicate_statement_ids = 0;
  std::size_t deprecated = 0;
  std::size_t triples = 0;
  std::size_t distinct_entities = 0;
  std::size_t labeled_entities = 0;
  std::size_t unlabeled_entities = 0;

  nlohmann::ordered_json to_json() const;
};

struct IngestResult {
  TripleStore store;
  IngestStats stats;
};

/// Streams a dump and builds a TripleStore. Accepted line formats, freely
/// mixed: entity records (`{"id":…,"labels":…,"claims":…}`, optionally
/// wrapped in the `[`/`,`/`]` array framing of full dumps), canonical triple
/// lines (`{"s":…}`), TSV triples
/// `subject\tpredicate\tobject_kind\tobject\trank\tstatement_id`, and TSV
/// label directives `@label\tQ1\ten\ttext` / `@alias\tQ1\ten\ttext`.
/// gzip input is detected transparently.
IngestResult extract_triples(const std::filesystem::path& dump,
                             const IngestConfig& config = {});

/// Formats a time point as `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_utc(std::chrono::system_clock::time_point tp);

}  // namespace kgdelta
