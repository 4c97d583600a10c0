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

// Shared test fixtures: paths, temporary directories, small store builders
// and the football fixture ids.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/entity.hpp"
#include "kgdelta/pipeline.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta::testing {

std::filesystem::path data_dir();
std::filesystem::path repo_data_dir();
std::filesystem::path cli_path();

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

constexpr EntityId Q(std::uint64_t n) { return EntityId::item(n); }
constexpr EntityId P(std::uint64_t n) { return EntityId::property(n); }

Triple triple(EntityId s, EntityId p, ObjectValue o, Rank rank = Rank::kNormal,
              std::optional<std::string> sid = std::nullopt);
Literal str(std::string value);
LabelRecord label(EntityId e, std::string text, std::vector<std::string> aliases = {},
                  std::string language = "en");

TripleStore build_store(const std::vector<Triple>& triples,
                        const std::vector<LabelRecord>& labels = {},
                        const std::string& id = "test",
                        const std::string& timestamp = "2025-01-01T00:00:00Z");

// Runs a shell command and returns its exit status.
int run_command(const std::string& command);

namespace football {

inline constexpr const char* kT0Timestamp = "2025-01-01T00:00:00Z";
inline constexpr const char* kT1Timestamp = "2025-09-01T00:00:00Z";

std::filesystem::path dump(int snapshot);
TripleStore store(int snapshot);

inline constexpr EntityId kCountry = P(17);
inline constexpr EntityId kBirthPlace = P(19);
inline constexpr EntityId kCitizenship = P(27);
inline constexpr EntityId kTeam = P(54);
inline constexpr EntityId kImage = P(18);

inline constexpr EntityId kBrazil = Q(155);
inline constexpr EntityId kJuventus = Q(1422);
inline constexpr EntityId kRealMadrid = Q(8682);
inline constexpr EntityId kRonaldo = Q(11571);
inline constexpr EntityId kManUtd = Q(18656);
inline constexpr EntityId kAlNassr = Q(483880);
inline constexpr EntityId kAlHilal = Q(1000001);
inline constexpr EntityId kDunmore = Q(1000003);
inline constexpr EntityId kValdoria = Q(1000010);
inline constexpr EntityId kZedland = Q(1000030);
inline constexpr EntityId kSaudiClub = Q(2000001);
inline constexpr EntityId kConference = Q(2020153);
inline constexpr EntityId kTomasVarga = Q(3000010);
inline constexpr EntityId kTiborVarga = Q(3000011);
inline constexpr EntityId kIclr2026 = Q(125000000);
inline constexpr EntityId kJuventusWomen = Q(1000040);
inline constexpr EntityId kPietroSala = Q(3000020);

// The newer snapshot plus a club whose alias is "Juventus" and a player of
// that club who also played for Real Madrid and Al Nassr.
TripleStore alias_collision_store();

// Run configuration over the two fixture dumps with one question per level
// and seed 7.
nlohmann::json config_json(const std::filesystem::path& output_dir);
PipelineConfig pipeline_config(const std::filesystem::path& output_dir);

}  // namespace football

}  // namespace kgdelta::testing
