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


#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <random>
#include <sys/wait.h>

#include "kgdelta/ingest.hpp"

namespace kgdelta::testing {

namespace fs = std::filesystem;

fs::path data_dir() { return KGDELTA_TEST_DATA_DIR; }
fs::path repo_data_dir() { return KGDELTA_REPO_DATA_DIR; }
fs::path cli_path() { return KGDELTA_CLI_PATH; }

TempDir::TempDir() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("kgdelta-test-" + std::to_string(stamp) + "-" + std::to_string(rd()) + "-" +
           std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

Triple triple(EntityId s, EntityId p, ObjectValue o, Rank rank, std::optional<std::string> sid) {
  Triple t;
  t.subject = s;
  t.predicate = p;
  t.object = std::move(o);
  t.rank = rank;
  t.statement_id = std::move(sid);
  return t;
}

Literal str(std::string value) { return Literal{std::move(value), LiteralType::kString}; }

LabelRecord label(EntityId e, std::string text, std::vector<std::string> aliases,
                  std::string language) {
  return LabelRecord{e, std::move(text), std::move(aliases), std::move(language)};
}

TripleStore build_store(const std::vector<Triple>& triples, const std::vector<LabelRecord>& labels,
                        const std::string& id, const std::string& timestamp) {
  TripleStore::Builder b;
  b.snapshot_id(id).timestamp(timestamp);
  for (const auto& t : triples) b.add(t);
  for (const auto& l : labels) b.add_label(l);
  return std::move(b).build();
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

namespace football {

fs::path dump(int snapshot) {
  return data_dir() / (snapshot == 0 ? "football_t0.tsv" : "football_t1.tsv");
}

TripleStore store(int snapshot) {
  IngestConfig config;
  config.timestamp = snapshot == 0 ? kT0Timestamp : kT1Timestamp;
  return extract_triples(dump(snapshot), config).store;
}

TripleStore alias_collision_store() {
  const TripleStore base = store(1);
  std::vector<Triple> triples(base.triples().begin(), base.triples().end());
  std::vector<LabelRecord> labels(base.labels().begin(), base.labels().end());
  triples.push_back(triple(kJuventusWomen, P(31), Q(476028)));
  for (EntityId club : {kAlNassr, kRealMadrid, kJuventusWomen}) {
    triples.push_back(triple(kPietroSala, kTeam, club));
  }
  labels.push_back(label(kJuventusWomen, "Juventus Women", {"Juventus"}));
  labels.push_back(label(kPietroSala, "Pietro Sala"));
  return build_store(triples, labels, base.snapshot().id, base.snapshot().timestamp);
}

nlohmann::json config_json(const fs::path& output_dir) {
  return {{"dumps", {{"t0", dump(0).string()}, {"t1", dump(1).string()}}},
          {"snapshot_ids", {{"t0", "football_t0"}, {"t1", "football_t1"}}},
          {"timestamps", {{"t0", kT0Timestamp}, {"t1", kT1Timestamp}}},
          {"languages", {"en"}},
          {"excluded_predicates_file", (repo_data_dir() / "excluded_predicates.txt").string()},
          {"templates", (repo_data_dir() / "templates.json").string()},
          {"quotas", {{"L1", 1}, {"L2", 1}, {"L3", 1}}},
          {"rng_seed", 7},
          {"output_dir", output_dir.string()}};
}

PipelineConfig pipeline_config(const fs::path& output_dir) {
  PipelineConfig c;
  c.merge_json(config_json(output_dir), fs::current_path());
  return c;
}

}  // namespace football

}  // namespace kgdelta::testing
