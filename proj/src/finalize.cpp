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

#include "kgdelta/finalize.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/digest.hpp"
#include "kgdelta/evaluator.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta {
namespace {

using sparql::PatternBlock;

std::set<std::string> token_set(const std::string& s) {
  const auto tokens = text::split_whitespace(text::surface_key(s));
  return {tokens.begin(), tokens.end()};
}

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

OrderedJson level_map_json(const std::map<Level, std::size_t>& m, bool all_levels) {
  OrderedJson j = OrderedJson::object();
  for (Level l : kAllLevels) {
    auto it = m.find(l);
    if (it != m.end()) {
      j[std::string(to_string(l))] = it->second;
    } else if (all_levels) {
      j[std::string(to_string(l))] = 0;
    }
  }
  return j;
}

std::map<Level, std::size_t> level_map_from(const Json& j) {
  std::map<Level, std::size_t> out;
  for (const auto& [k, v] : j.items()) {
    auto l = level_from_string(k);
    if (!l) throw FormatError("unknown level '" + k + "'");
    out[*l] = v.get<std::size_t>();
  }
  return out;
}

// Entities a constant may stand for once only its label is known.
std::vector<EntityId> surface_alternatives(EntityId e, const TripleStore& g1,
                                           const std::string& language) {
  std::vector<EntityId> out{e};
  if (const LabelRecord* rec = g1.label(e, language)) {
    for (EntityId h : g1.homonyms(text::surface_key(rec->label), language)) out.push_back(h);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Every variant of the block with its constants swapped for alternatives,
// up to `cap` variants.
std::vector<PatternBlock> block_variants(const PatternBlock& block, const TripleStore& g1,
                                         const std::string& language, std::size_t cap) {
  std::vector<EntityId> constants;
  for (const auto& p : block.patterns) {
    for (const auto* t : {&p.subject, &p.object}) {
      if (auto e = std::get_if<EntityId>(t)) constants.push_back(*e);
    }
  }
  for (const auto& f : block.filters) constants.push_back(f.target);
  std::sort(constants.begin(), constants.end());
  constants.erase(std::unique(constants.begin(), constants.end()), constants.end());

  std::vector<std::map<EntityId, EntityId>> assignments{{}};
  for (EntityId c : constants) {
    std::vector<std::map<EntityId, EntityId>> next;
    for (EntityId alt : surface_alternatives(c, g1, language)) {
      for (const auto& a : assignments) {
        if (next.size() >= cap) break;
        auto extended = a;
        extended[c] = alt;
        next.push_back(std::move(extended));
      }
    }
    assignments = std::move(next);
  }

  std::vector<PatternBlock> out;
  for (const auto& a : assignments) {
    PatternBlock b = block;
    auto swap = [&](sparql::Term& t) {
      if (auto e = std::get_if<EntityId>(&t)) t = a.at(*e);
    };
    for (auto& p : b.patterns) {
      swap(p.subject);
      swap(p.object);
    }
    for (auto& f : b.filters) f.target = a.at(f.target);
    out.push_back(std::move(b));
  }
  return out;
}

bool uniquely_answers(const QuestionInstance& inst, const TripleStore& g1) {
  if (count_answers(inst.spec, g1) != 1) return false;
  const ResultSet rs = evaluate(inst.spec, g1);
  return rs.bindings.size() == 1 && rs.bindings.front() == inst.gold;
}

}  // namespace

std::string_view to_string(ValidatorMode m) {
  switch (m) {
    case ValidatorMode::kLocal: return "local";
    case ValidatorMode::kRemote: return "remote";
    case ValidatorMode::kBoth: return "both";
  }
  return "";
}

std::optional<ValidatorMode> validator_mode_from_string(std::string_view s) {
  for (auto m : {ValidatorMode::kLocal, ValidatorMode::kRemote, ValidatorMode::kBoth}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

nlohmann::ordered_json FinalizeConfig::to_json() const {
  OrderedJson j;
  j["validator"] = std::string(to_string(validator));
  j["near_duplicate_threshold"] = near_duplicate_threshold;
  j["surface_regrounding"] = surface_regrounding;
  j["language"] = language;
  j["max_regrounding_combinations"] = max_regrounding_combinations;
  return j;
}

nlohmann::ordered_json FinalizeReport::to_json() const {
  OrderedJson j;
  j["input_count"] = input_count;
  j["kept_count"] = kept_count;
  j["dropped"] = dropped;
  j["drops"] = OrderedJson::array();
  for (const auto& [id, reason] : drops) j["drops"].push_back({{"id", id}, {"reason", reason}});
  j["aborted"] = aborted ? OrderedJson(*aborted) : OrderedJson(nullptr);
  return j;
}

double jaccard_similarity(const std::string& a, const std::string& b) {
  const auto ta = token_set(a);
  const auto tb = token_set(b);
  if (ta.empty() && tb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : ta) common += tb.count(t);
  return static_cast<double>(common) / static_cast<double>(ta.size() + tb.size() - common);
}

std::size_t regrounded_count(const sparql::QuerySpec& spec, const TripleStore& g1,
                             const std::string& language, std::size_t max_combinations) {
  std::vector<std::vector<ObjectValue>> per_block;
  for (const auto& block : spec.blocks) {
    std::set<ObjectValue> answers;
    for (const auto& variant : block_variants(block, g1, language, max_combinations)) {
      const auto part = block_answers(variant, spec.select_var, g1);
      answers.insert(part.begin(), part.end());
    }
    per_block.emplace_back(answers.begin(), answers.end());
  }
  return std::min<std::size_t>(combine_blocks(spec.grouping, per_block).size(), 2);
}

FinalizeResult finalize(const std::vector<QuestionInstance>& instances, const TripleStore& g1,
                        const FinalizeConfig& config, RemoteClient* remote) {
  const bool use_local = config.validator != ValidatorMode::kRemote;
  const bool use_remote = config.validator != ValidatorMode::kLocal;
  if (use_remote && !remote) {
    throw ConfigError("validator mode '" + std::string(to_string(config.validator)) +
                      "' needs an endpoint client");
  }
  FinalizeResult out;
  FinalizeReport& report = out.report;
  report.input_count = instances.size();
  auto drop = [&](const QuestionInstance& inst, const std::string& reason) {
    ++report.dropped[reason];
    report.drops.emplace_back(inst.id, reason);
  };

  // Deduplication is one ordered pass so the first occurrence always wins.
  std::unordered_set<std::string> texts;
  std::map<ObjectValue, std::vector<const QuestionInstance*>> by_gold;
  std::vector<const QuestionInstance*> unique;
  for (const auto& inst : instances) {
    if (!texts.insert(inst.question).second) {
      drop(inst, "duplicate_text");
      continue;
    }
    auto& same_gold = by_gold[inst.gold];
    const bool near = std::any_of(same_gold.begin(), same_gold.end(), [&](const auto* kept) {
      return jaccard_similarity(kept->question, inst.question) > config.near_duplicate_threshold;
    });
    if (near) {
      drop(inst, "near_duplicate");
      continue;
    }
    same_gold.push_back(&inst);
    unique.push_back(&inst);
  }

  for (const QuestionInstance* inst : unique) {
    if (use_local) {
      if (!uniquely_answers(*inst, g1)) {
        drop(*inst, "not_unique");
        continue;
      }
      if (config.surface_regrounding &&
          regrounded_count(inst->spec, g1, config.language, config.max_regrounding_combinations) !=
              1) {
        drop(*inst, "ambiguous_surface_form");
        continue;
      }
    }
    if (use_remote) {
      std::size_t remote_count = 0;
      try {
        remote_count = remote->count(inst->spec);
      } catch (const RemoteError& e) {
        report.kept_count = out.benchmark.size();
        report.aborted = std::string("remote validation failed at ") + inst->id + ": " + e.what();
        throw FinalizeAborted(*report.aborted, report);
      }
      if (remote_count != 1) {
        drop(*inst, use_local ? "validator_disagreement" : "remote_not_unique");
        continue;
      }
    }
    out.benchmark.push_back(*inst);
  }
  report.kept_count = out.benchmark.size();
  return out;
}

nlohmann::ordered_json BenchmarkManifest::to_json() const {
  OrderedJson j;
  j["hash_algorithm"] = hash_algorithm;
  j["from_snapshot"] = snapshot_json(from);
  j["to_snapshot"] = snapshot_json(to);
  j["config_digest"] = config_digest;
  j["rng_seed"] = rng_seed;
  j["quotas"] = level_map_json(quotas, false);
  j["counts"] = level_map_json(counts, true);
  j["instance_hashes"] = instance_hashes;
  j["created_at"] = created_at;
  return j;
}

BenchmarkManifest BenchmarkManifest::from_json(const nlohmann::json& j) {
  BenchmarkManifest m;
  try {
    m.hash_algorithm = j.at("hash_algorithm").get<std::string>();
    m.from = snapshot_from(j.at("from_snapshot"));
    m.to = snapshot_from(j.at("to_snapshot"));
    m.config_digest = j.at("config_digest").get<std::string>();
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    m.quotas = level_map_from(j.at("quotas"));
    m.counts = level_map_from(j.at("counts"));
    m.instance_hashes = j.at("instance_hashes").get<std::vector<std::string>>();
    m.created_at = j.at("created_at").get<std::string>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

nlohmann::ordered_json benchmark_record(const QuestionInstance& inst) {
  OrderedJson j = question_to_json(inst);
  OrderedJson r;
  r["id"] = inst.id;
  r["level"] = j["level"];
  r["question"] = inst.question;
  r["answer"] = object_to_json(inst.gold);
  r["answer_label"] = inst.gold_label;
  r["answer_aliases"] = inst.gold_aliases;
  r["sparql"] = inst.sparql;
  r["seed_triples"] = j["seed_triples"];
  r["constraints_used"] = j["constraints_used"];
  r["fuzz_applied"] = j["fuzz_applied"];
  r["provenance"] = j["provenance"];
  return r;
}

QuestionInstance benchmark_record_from_json(const nlohmann::json& j) {
  Json q = j;
  try {
    q["gold"] = j.at("answer");
    q["gold_label"] = j.at("answer_label");
    q["gold_aliases"] = j.value("answer_aliases", Json::array());
    q["spec"] = spec_to_json(sparql::parse_sparql(j.at("sparql").get<std::string>()));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed benchmark record: ") + e.what());
  } catch (const sparql::SyntaxError& e) {
    throw FormatError(std::string("benchmark record has invalid sparql: ") + e.what());
  }
  return question_from_json(q);
}

std::string benchmark_line(const QuestionInstance& inst) { return benchmark_record(inst).dump(); }

BenchmarkManifest make_manifest(const std::vector<QuestionInstance>& benchmark,
                                const SnapshotInfo& from, const SnapshotInfo& to,
                                const std::string& config_digest, std::uint64_t rng_seed,
                                const std::map<Level, std::size_t>& quotas,
                                const std::string& created_at) {
  BenchmarkManifest m;
  m.hash_algorithm = kDigestAlgorithm;
  m.from = from;
  m.to = to;
  m.config_digest = config_digest;
  m.rng_seed = rng_seed;
  m.quotas = quotas;
  m.created_at = created_at;
  for (Level l : kAllLevels) m.counts[l] = 0;
  for (const auto& inst : benchmark) {
    ++m.counts[inst.level];
    m.instance_hashes.push_back(sha256_hex(benchmark_line(inst) + "\n"));
  }
  return m;
}

void write_benchmark(const std::vector<QuestionInstance>& benchmark,
                     const std::filesystem::path& path) {
  TextWriter out(path);
  for (const auto& inst : benchmark) out.line(benchmark_line(inst));
  out.close();
}

std::vector<QuestionInstance> read_benchmark(const std::filesystem::path& path) {
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
    out.push_back(benchmark_record_from_json(j));
  }
  return out;
}

std::vector<QuestionInstance> stratified_sample(const std::vector<QuestionInstance>& benchmark,
                                                const std::map<Level, std::size_t>& quotas,
                                                std::uint64_t rng_seed) {
  std::map<Level, std::vector<std::size_t>> pools;
  for (std::size_t i = 0; i < benchmark.size(); ++i) pools[benchmark[i].level].push_back(i);

  std::map<Level, std::size_t> missing;
  for (const auto& [level, quota] : quotas) {
    const std::size_t have = pools[level].size();
    if (have < quota) missing[level] = quota - have;
  }
  if (!missing.empty()) {
    std::string msg = "insufficient pool:";
    for (const auto& [level, n] : missing) {
      msg += " " + std::string(to_string(level)) + " needs " + std::to_string(quotas.at(level)) +
             ", has " + std::to_string(pools[level].size()) + ";";
    }
    msg.pop_back();
    throw SampleShortfall(msg, missing);
  }

  std::mt19937_64 engine(rng_seed);
  std::vector<bool> chosen(benchmark.size(), false);
  for (Level level : kAllLevels) {
    auto q = quotas.find(level);
    if (q == quotas.end()) continue;
    auto& pool = pools[level];
    // Partial Fisher-Yates: the first `quota` slots become the sample.
    for (std::size_t i = 0; i < q->second; ++i) {
      const std::size_t j = i + bounded_uniform(engine, pool.size() - i);
      std::swap(pool[i], pool[j]);
      chosen[pool[i]] = true;
    }
  }
  std::vector<QuestionInstance> out;
  for (std::size_t i = 0; i < benchmark.size(); ++i) {
    if (chosen[i]) out.push_back(benchmark[i]);
  }
  return out;
}

}  // namespace kgdelta
