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

#include "kgdelta/question.hpp"

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/digest.hpp"

namespace kgdelta {
namespace {

OrderedJson snapshot_json(const SnapshotInfo& s) {
  OrderedJson j;
  j["id"] = s.id;
  j["hash"] = s.hash;
  j["timestamp"] = s.timestamp;
  return j;
}

SnapshotInfo snapshot_from(const Json& j) {
  return {j.at("id").get<std::string>(), j.at("hash").get<std::string>(),
          j.at("timestamp").get<std::string>()};
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kL1: return "L1";
    case Level::kL2: return "L2";
    case Level::kL3: return "L3";
  }
  return "";
}

std::optional<Level> level_from_string(std::string_view s) {
  for (Level l : kAllLevels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::string instance_id(Level level, const std::string& sparql, const ObjectValue& gold) {
  Sha256 h;
  h.update(sparql);
  h.update("\n");
  h.update(object_to_json(gold).dump());
  return std::string(to_string(level)) + "-" + h.hex_digest().substr(0, 16);
}

void finish_instance(QuestionInstance& inst, const TripleStore& g1, std::string_view language) {
  inst.sparql = sparql::build_sparql(inst.spec);
  inst.gold_label.clear();
  inst.gold_aliases.clear();
  if (const EntityId* e = inst.gold.entity_if()) {
    if (const LabelRecord* rec = g1.label(*e, language)) {
      inst.gold_label = rec->label;
      inst.gold_aliases = rec->aliases;
    }
  } else {
    inst.gold_label = inst.gold.literal().value;
  }
  inst.id = instance_id(inst.level, inst.sparql, inst.gold);
}

nlohmann::ordered_json spec_to_json(const sparql::QuerySpec& spec) {
  OrderedJson j;
  j["select"] = spec.select_var;
  j["blocks"] = OrderedJson::array();
  for (const auto& b : spec.blocks) j["blocks"].push_back(sparql::block_to_json(b));
  if (spec.grouping) {
    j["grouping"] = {{"var", spec.grouping->group_var},
                     {"op", spec.grouping->op == sparql::CountOp::kEqual ? "=" : ">="},
                     {"threshold", spec.grouping->threshold}};
  } else {
    j["grouping"] = nullptr;
  }
  j["limit"] = spec.limit ? OrderedJson(*spec.limit) : OrderedJson(nullptr);
  return j;
}

sparql::QuerySpec spec_from_json(const nlohmann::json& j) {
  sparql::QuerySpec spec;
  spec.select_var = j.at("select").get<std::string>();
  for (const auto& b : j.at("blocks")) spec.blocks.push_back(sparql::block_from_json(b));
  if (j.contains("grouping") && !j["grouping"].is_null()) {
    const auto& g = j["grouping"];
    const std::string op = g.at("op").get<std::string>();
    if (op != "=" && op != ">=") throw FormatError("unknown grouping operator '" + op + "'");
    spec.grouping = sparql::Grouping{g.at("var").get<std::string>(),
                                     op == "=" ? sparql::CountOp::kEqual
                                               : sparql::CountOp::kAtLeast,
                                     g.at("threshold").get<std::size_t>()};
  }
  if (j.contains("limit") && !j["limit"].is_null()) spec.limit = j["limit"].get<std::size_t>();
  return spec;
}

nlohmann::ordered_json question_to_json(const QuestionInstance& inst) {
  OrderedJson j;
  j["id"] = inst.id;
  j["level"] = std::string(to_string(inst.level));
  j["question"] = inst.question;
  j["gold"] = object_to_json(inst.gold);
  j["gold_label"] = inst.gold_label;
  j["gold_aliases"] = inst.gold_aliases;
  j["sparql"] = inst.sparql;
  j["spec"] = spec_to_json(inst.spec);
  j["seed_triples"] = OrderedJson::array();
  for (const auto& t : inst.seed_triples) j["seed_triples"].push_back(triple_to_json(t));
  j["constraints_used"] = OrderedJson::array();
  for (const auto& b : inst.constraints_used) {
    j["constraints_used"].push_back(sparql::block_to_json(b));
  }
  if (inst.fuzz) {
    const FuzzRecord& f = *inst.fuzz;
    j["fuzz_applied"] = {{"block_index", f.block_index},
                         {"original", sparql::block_to_json(f.original)},
                         {"broadened", sparql::block_to_json(f.broadened)},
                         {"anchor", f.anchor.str()},
                         {"class", f.cls.str()},
                         {"depth", f.depth},
                         {"original_size", f.original_size},
                         {"broadened_size", f.broadened_size}};
  } else {
    j["fuzz_applied"] = nullptr;
  }
  j["provenance"] = {{"from_snapshot", snapshot_json(inst.provenance.from)},
                     {"to_snapshot", snapshot_json(inst.provenance.to)},
                     {"created_at", inst.provenance.created_at}};
  return j;
}

QuestionInstance question_from_json(const nlohmann::json& j) {
  QuestionInstance inst;
  try {
    inst.id = j.at("id").get<std::string>();
    auto level = level_from_string(j.at("level").get<std::string>());
    if (!level) throw FormatError("unknown level");
    inst.level = *level;
    inst.question = j.value("question", "");
    inst.gold = object_from_json(j.at("gold"));
    inst.gold_label = j.value("gold_label", "");
    if (j.contains("gold_aliases")) {
      inst.gold_aliases = j["gold_aliases"].get<std::vector<std::string>>();
    }
    inst.sparql = j.at("sparql").get<std::string>();
    inst.spec = spec_from_json(j.at("spec"));
    for (const auto& t : j.at("seed_triples")) inst.seed_triples.push_back(triple_from_json(t));
    for (const auto& b : j.at("constraints_used")) {
      inst.constraints_used.push_back(sparql::block_from_json(b));
    }
    if (j.contains("fuzz_applied") && !j["fuzz_applied"].is_null()) {
      const auto& f = j["fuzz_applied"];
      inst.fuzz = FuzzRecord{f.at("block_index").get<std::size_t>(),
                             sparql::block_from_json(f.at("original")),
                             sparql::block_from_json(f.at("broadened")),
                             EntityId::parse(f.at("anchor").get<std::string>()),
                             EntityId::parse(f.at("class").get<std::string>()),
                             f.at("depth").get<int>(),
                             f.at("original_size").get<std::size_t>(),
                             f.at("broadened_size").get<std::size_t>()};
    }
    const auto& p = j.at("provenance");
    inst.provenance.from = snapshot_from(p.at("from_snapshot"));
    inst.provenance.to = snapshot_from(p.at("to_snapshot"));
    inst.provenance.created_at = p.at("created_at").get<std::string>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed question record: ") + e.what());
  }
  if (sparql::build_sparql(inst.spec) != inst.sparql) {
    throw FormatError("question " + inst.id + ": sparql text does not match spec");
  }
  return inst;
}

void write_questions(const std::vector<QuestionInstance>& instances,
                     const std::filesystem::path& path) {
  TextWriter out(path);
  for (const auto& inst : instances) out.line(question_to_json(inst).dump());
  out.close();
}

std::vector<QuestionInstance> read_questions(const std::filesystem::path& path) {
  std::vector<QuestionInstance> out;
  LineReader in(path);
  std::string line;
  while (in.next(line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(in.line_number()) + ": " + e.what());
    }
    out.push_back(question_from_json(j));
  }
  return out;
}

}  // namespace kgdelta
