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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kgdelta/entity.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Line-oriented reader over plain or gzip-compressed files. Lines are
/// returned without the trailing newline (and without '\r').
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  bool next(std::string& line);
  std::size_t line_number() const { return line_no_; }

 private:
  bool fill();

  void* gz_ = nullptr;
  std::string path_;
  std::string buf_;
  std::size_t pos_ = 0;
  bool eof_ = false;
  std::size_t line_no_ = 0;
};

/// Buffered writer that reports write failures as IoError.
class TextWriter {
 public:
  explicit TextWriter(const std::filesystem::path& path);
  void write(std::string_view s);
  void line(std::string_view s);
  void close();
  ~TextWriter();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

OrderedJson object_to_json(const ObjectValue& o);
ObjectValue object_from_json(const Json& j);

/// Canonical one-line JSON form of a triple:
/// {"s":…,"p":…,"o":{…},"rank":…,"sid":…[,"q":{…}]}
std::string canonical_triple_line(const Triple& t);
OrderedJson triple_to_json(const Triple& t);
Triple triple_from_json(const Json& j);

OrderedJson label_to_json(const LabelRecord& r);
LabelRecord label_from_json(const Json& j);

/// Digest of the canonical triple stream of a store: triples in canonical
/// order, one canonical line each, newline-terminated.
std::string hash_store(const TripleStore& store);

/// Writes `<prefix>.triples.jsonl`, `<prefix>.labels.jsonl` and
/// `<prefix>.meta.json`.
void write_store(const TripleStore& store, const std::filesystem::path& prefix,
                 const Json& extra_meta = Json::object());
/// Inverse of write_store. The recomputed hash must match the metadata.
TripleStore read_store(const std::filesystem::path& prefix);
SnapshotInfo read_store_info(const std::filesystem::path& prefix);

std::filesystem::path triples_path(const std::filesystem::path& prefix);
std::filesystem::path labels_path(const std::filesystem::path& prefix);
std::filesystem::path meta_path(const std::filesystem::path& prefix);

}  // namespace kgdelta
