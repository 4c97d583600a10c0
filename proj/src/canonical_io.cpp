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

#include "kgdelta/canonical_io.hpp"

#include <zlib.h>

#include <sstream>

#include "kgdelta/digest.hpp"
#include "kgdelta/errors.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta {
namespace fs = std::filesystem;

LineReader::LineReader(const fs::path& path) : path_(path.string()) {
  gzFile f = gzopen(path_.c_str(), "rb");
  if (f == nullptr) throw IoError("cannot open '" + path_ + "'");
  gzbuffer(f, 1 << 18);
  gz_ = f;
}

LineReader::~LineReader() {
  if (gz_ != nullptr) gzclose(static_cast<gzFile>(gz_));
}

bool LineReader::fill() {
  if (eof_) return false;
  buf_.erase(0, pos_);
  pos_ = 0;
  constexpr std::size_t kChunk = 1 << 20;
  const std::size_t old = buf_.size();
  buf_.resize(old + kChunk);
  const int got = gzread(static_cast<gzFile>(gz_), buf_.data() + old,
                         static_cast<unsigned>(kChunk));
  if (got < 0) {
    int err = 0;
    const char* msg = gzerror(static_cast<gzFile>(gz_), &err);
    throw IoError("read error in '" + path_ + "': " + (msg ? msg : "?"));
  }
  buf_.resize(old + static_cast<std::size_t>(got));
  if (got == 0) eof_ = true;
  return got > 0;
}

bool LineReader::next(std::string& line) {
  for (;;) {
    const auto nl = buf_.find('\n', pos_);
    if (nl != std::string::npos) {
      line.assign(buf_, pos_, nl - pos_);
      pos_ = nl + 1;
      break;
    }
    if (!fill()) {
      if (pos_ >= buf_.size()) return false;
      line.assign(buf_, pos_, std::string::npos);
      pos_ = buf_.size();
      break;
    }
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ++line_no_;
  return true;
}

TextWriter::TextWriter(const fs::path& path) : path_(path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
}

void TextWriter::write(std::string_view s) {
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  if (!out_) throw IoError("write failed: '" + path_.string() + "'");
}

void TextWriter::line(std::string_view s) {
  write(s);
  write("\n");
}

void TextWriter::close() {
  if (!out_.is_open()) return;
  out_.close();
  if (!out_) throw IoError("close failed: '" + path_.string() + "'");
}

TextWriter::~TextWriter() {
  if (out_.is_open()) out_.close();
}

void write_text_file(const fs::path& path, std::string_view content) {
  TextWriter w(path);
  w.write(content);
  w.close();
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

OrderedJson object_to_json(const ObjectValue& o) {
  OrderedJson j;
  if (o.is_entity()) {
    j["kind"] = "entity";
    j["id"] = o.entity().str();
  } else {
    j["kind"] = "literal";
    j["value"] = o.literal().value;
    j["datatype"] = std::string(to_string(o.literal().type));
  }
  return j;
}

ObjectValue object_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("object value must be a JSON object");
  const std::string kind = j.value("kind", "");
  if (kind == "entity") {
    return ObjectValue(EntityId::parse(j.at("id").get<std::string>()));
  }
  if (kind == "literal") {
    auto type = literal_type_from_string(j.value("datatype", "string"));
    if (!type) throw FormatError("unknown literal datatype");
    return ObjectValue(Literal{j.at("value").get<std::string>(), *type});
  }
  throw FormatError("object kind must be 'entity' or 'literal'");
}

std::string canonical_triple_line(const Triple& t) {
  std::string out;
  out.reserve(96);
  out += "{\"s\":\"";
  out += t.subject.str();
  out += "\",\"p\":\"";
  out += t.predicate.str();
  out += "\",\"o\":{";
  if (t.object.is_entity()) {
    out += "\"kind\":\"entity\",\"id\":\"";
    out += t.object.entity().str();
    out += "\"}";
  } else {
    out += "\"kind\":\"literal\",\"value\":\"";
    text::append_json_escaped(out, t.object.literal().value);
    out += "\",\"datatype\":\"";
    out += to_string(t.object.literal().type);
    out += "\"}";
  }
  out += ",\"rank\":\"";
  out += to_string(t.rank);
  out += "\",\"sid\":";
  if (t.statement_id) {
    out += '"';
    text::append_json_escaped(out, *t.statement_id);
    out += '"';
  } else {
    out += "null";
  }
  if (!t.qualifiers.empty()) {
    out += ",\"q\":";
    out += t.qualifiers;
  }
  out += '}';
  return out;
}

OrderedJson triple_to_json(const Triple& t) {
  OrderedJson j;
  j["s"] = t.subject.str();
  j["p"] = t.predicate.str();
  j["o"] = object_to_json(t.object);
  j["rank"] = std::string(to_string(t.rank));
  j["sid"] = t.statement_id ? OrderedJson(*t.statement_id) : OrderedJson();
  if (!t.qualifiers.empty()) j["q"] = OrderedJson::parse(t.qualifiers);
  return j;
}

Triple triple_from_json(const Json& j) {
  Triple t;
  t.subject = EntityId::parse(j.at("s").get<std::string>());
  t.predicate = EntityId::parse(j.at("p").get<std::string>());
  if (!t.subject.is_item()) throw FormatError("triple subject must be an item");
  if (!t.predicate.is_property()) {
    throw FormatError("triple predicate must be a property");
  }
  t.object = object_from_json(j.at("o"));
  auto rank = rank_from_string(j.value("rank", "normal"));
  if (!rank) throw FormatError("unknown rank");
  t.rank = *rank;
  if (auto it = j.find("sid"); it != j.end() && !it->is_null()) {
    t.statement_id = it->get<std::string>();
  }
  if (auto it = j.find("q"); it != j.end() && !it->is_null()) {
    t.qualifiers = it->dump();
  }
  return t;
}

OrderedJson label_to_json(const LabelRecord& r) {
  OrderedJson j;
  j["entity"] = r.entity.str();
  j["language"] = r.language;
  j["label"] = r.label;
  j["aliases"] = r.aliases;
  return j;
}

LabelRecord label_from_json(const Json& j) {
  LabelRecord r;
  r.entity = EntityId::parse(j.at("entity").get<std::string>());
  r.language = j.at("language").get<std::string>();
  r.label = j.at("label").get<std::string>();
  if (auto it = j.find("aliases"); it != j.end()) {
    r.aliases = it->get<std::vector<std::string>>();
  }
  return r;
}

std::string hash_store(const TripleStore& store) {
  Sha256 h;
  std::string line;
  for (const Triple& t : store.triples()) {
    line = canonical_triple_line(t);
    line.push_back('\n');
    h.update(line);
  }
  return h.hex_digest();
}

fs::path triples_path(const fs::path& prefix) {
  return fs::path(prefix.string() + ".triples.jsonl");
}
fs::path labels_path(const fs::path& prefix) {
  return fs::path(prefix.string() + ".labels.jsonl");
}
fs::path meta_path(const fs::path& prefix) {
  return fs::path(prefix.string() + ".meta.json");
}

void write_store(const TripleStore& store, const fs::path& prefix,
                 const Json& extra_meta) {
  {
    TextWriter w(triples_path(prefix));
    for (const Triple& t : store.triples()) w.line(canonical_triple_line(t));
    w.close();
  }
  {
    TextWriter w(labels_path(prefix));
    for (const LabelRecord& r : store.labels()) w.line(label_to_json(r).dump());
    w.close();
  }
  OrderedJson meta;
  meta["snapshot_id"] = store.snapshot().id;
  meta["timestamp"] = store.snapshot().timestamp;
  meta["hash_algorithm"] = std::string(kDigestAlgorithm);
  meta["hash"] = store.snapshot().hash;
  meta["triples"] = store.size();
  meta["labels"] = store.labels().size();
  for (const auto& [k, v] : extra_meta.items()) meta[k] = v;
  write_text_file(meta_path(prefix), meta.dump(2) + "\n");
}

SnapshotInfo read_store_info(const fs::path& prefix) {
  const Json meta = read_json_file(meta_path(prefix));
  SnapshotInfo info;
  info.id = meta.value("snapshot_id", "");
  info.timestamp = meta.value("timestamp", "");
  info.hash = meta.value("hash", "");
  return info;
}

TripleStore read_store(const fs::path& prefix) {
  const SnapshotInfo info = read_store_info(prefix);
  TripleStore::Builder b;
  b.snapshot_id(info.id).timestamp(info.timestamp);
  std::string line;
  {
    LineReader r(triples_path(prefix));
    while (r.next(line)) {
      if (line.empty()) continue;
      try {
        b.add(triple_from_json(Json::parse(line)));
      } catch (const Json::exception& e) {
        throw FormatError(triples_path(prefix).string() + ":" +
                          std::to_string(r.line_number()) + ": " + e.what());
      }
    }
  }
  if (fs::exists(labels_path(prefix))) {
    LineReader r(labels_path(prefix));
    while (r.next(line)) {
      if (line.empty()) continue;
      try {
        b.add_label(label_from_json(Json::parse(line)));
      } catch (const Json::exception& e) {
        throw FormatError(labels_path(prefix).string() + ":" +
                          std::to_string(r.line_number()) + ": " + e.what());
      }
    }
  }
  TripleStore store = std::move(b).build();
  if (!info.hash.empty() && store.snapshot().hash != info.hash) {
    throw FormatError("snapshot hash mismatch for '" + prefix.string() + "'");
  }
  return store;
}

}  // namespace kgdelta
