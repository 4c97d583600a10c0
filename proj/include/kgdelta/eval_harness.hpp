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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgdelta/errors.hpp"
#include "kgdelta/question.hpp"

namespace kgdelta::eval {

/// Exact rational number in lowest terms with a positive denominator.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Fraction() = default;
  Fraction(std::int64_t n, std::int64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  nlohmann::ordered_json to_json() const;

  friend Fraction operator-(const Fraction& a, const Fraction& b);
  friend Fraction operator+(const Fraction& a, const Fraction& b);
  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend bool operator<(const Fraction& a, const Fraction& b);
  friend bool operator<=(const Fraction& a, const Fraction& b) { return !(b < a); }
};

enum class Mode { kNoSearch, kSearch };
std::string_view to_string(Mode m);
std::optional<Mode> mode_from_string(std::string_view s);

struct PredictionRecord {
  std::string instance_id;
  Mode mode = Mode::kNoSearch;
  std::vector<std::string> samples;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

/// NFC, lowercase, whitespace trimmed and collapsed, surrounding punctuation
/// removed, standalone "a", "an", "the" dropped; repeated to a fixpoint so
/// the result is idempotent.
std::string normalize_answer(std::string_view s);

/// Exact match after normalization. Aliases count unless `strict`.
bool score_em(std::string_view pred, std::string_view gold,
              const std::vector<std::string>& aliases = {}, bool strict = false);

/// Gold strings for an instance: label plus aliases.
struct GoldAnswer {
  Level level = Level::kL1;
  std::string label;
  std::vector<std::string> aliases;
};
using GoldTable = std::map<std::string, GoldAnswer>;

GoldTable gold_table(const std::vector<QuestionInstance>& benchmark);

struct PassAtK {
  Fraction value;
  std::size_t scored = 0;
  /// Instances with fewer than k samples.
  std::vector<std::string> skipped;
};

/// Share of records where one of the first k samples is an exact match.
/// Throws EvalError for ids missing from the benchmark or k < 1.
PassAtK pass_at_k(const std::vector<PredictionRecord>& records, const GoldTable& gold,
                  std::size_t k, bool strict = false);

/// pass_at_k(no_search, k) - pass_at_k(search, 1). Throws EvalError when the
/// two record sets cover different instance ids.
Fraction delta_k(const std::vector<PredictionRecord>& no_search,
                 const std::vector<PredictionRecord>& search, const GoldTable& gold,
                 std::size_t k, bool strict = false);

/// The instruction prompt with the question appended.
std::string render_prompt(std::string_view question);
extern const std::string_view kPromptTemplate;

/// Content of the last complete <answer>...</answer> pair, trimmed.
std::optional<std::string> extract_answer(std::string_view transcript);

/// Reads JSONL records {instance_id, mode, samples} or {instance_id, mode,
/// transcripts}; transcripts are reduced with extract_answer (no answer
/// gives an empty sample).
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

struct Verdict {
  std::string instance_id;
  Level level = Level::kL1;
  Mode mode = Mode::kNoSearch;
  bool em_alias = false;
  bool em_strict = false;
};

struct ModeScores {
  std::map<Level, Fraction> em_per_level;
  Fraction em_overall;
  std::map<Level, Fraction> em_strict_per_level;
  Fraction em_strict_overall;
  std::map<std::size_t, PassAtK> pass_at_k;
};

struct ScoreReport {
  std::map<Mode, ModeScores> modes;
  std::vector<Verdict> verdicts;
  /// k -> delta, overall and per level; present only with both modes.
  std::map<std::size_t, Fraction> delta_k;
  std::map<Level, std::map<std::size_t, Fraction>> delta_k_per_level;

  nlohmann::ordered_json to_json() const;
  std::string verdicts_csv() const;
  std::string delta_grid_csv() const;
};

/// EM uses each record's first sample. Pass@k and delta are computed for
/// every k in `ks`.
ScoreReport score(const std::vector<QuestionInstance>& benchmark,
                  const std::vector<PredictionRecord>& records, const std::vector<std::size_t>& ks);

}  // namespace kgdelta::eval
