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

#include "kgdelta/eval_harness.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "kgdelta/canonical_io.hpp"
#include "kgdelta/text.hpp"

namespace kgdelta::eval {
namespace {

const std::set<std::string> kArticles = {"a", "an", "the"};

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string normalize_step(std::string_view s) {
  std::string t = join(text::split_whitespace(text::lower_nfc(s)));
  t = std::string(text::trim(text::strip_punct(t)));
  std::vector<std::string> kept;
  for (auto& tok : text::split_whitespace(t)) {
    if (!kArticles.count(tok)) kept.push_back(std::move(tok));
  }
  return join(kept);
}

const GoldAnswer& gold_for(const GoldTable& gold, const std::string& id) {
  auto it = gold.find(id);
  if (it == gold.end()) throw EvalError("prediction for unknown instance '" + id + "'");
  return it->second;
}

bool sample_correct(const std::string& sample, const GoldAnswer& g, bool strict) {
  return score_em(sample, g.label, g.aliases, strict);
}

std::vector<PredictionRecord> of_mode(const std::vector<PredictionRecord>& records, Mode m) {
  std::vector<PredictionRecord> out;
  for (const auto& r : records) {
    if (r.mode == m) out.push_back(r);
  }
  return out;
}

std::set<std::string> ids_of(const std::vector<PredictionRecord>& records) {
  std::set<std::string> out;
  for (const auto& r : records) out.insert(r.instance_id);
  return out;
}

Fraction mean(std::size_t hits, std::size_t total) {
  return total == 0 ? Fraction(0, 1)
                    : Fraction(static_cast<std::int64_t>(hits), static_cast<std::int64_t>(total));
}

GoldTable restrict_level(const GoldTable& gold, Level level) {
  GoldTable out;
  for (const auto& [id, g] : gold) {
    if (g.level == level) out.emplace(id, g);
  }
  return out;
}

std::vector<PredictionRecord> restrict_ids(const std::vector<PredictionRecord>& records,
                                           const GoldTable& gold) {
  std::vector<PredictionRecord> out;
  for (const auto& r : records) {
    if (gold.count(r.instance_id)) out.push_back(r);
  }
  return out;
}

}  // namespace

const std::string_view kPromptTemplate =
    "Answer the given question. You must conduct reasoning inside <think> and </think> first "
    "every time you get new information. After reasoning, if you find you lack some knowledge, "
    "you can call a search engine by <search> query </search>, and you should return the top "
    "searched results between <information> and </information>. You can search as many times "
    "as you want. If you find no further external knowledge needed, you can directly provide "
    "the answer inside <answer> and </answer> without detailed illustrations. For example, "
    "<answer> Beijing </answer>. Question: ";

Fraction::Fraction(std::int64_t n, std::int64_t d) {
  if (d == 0) throw EvalError("fraction with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

std::string Fraction::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

nlohmann::ordered_json Fraction::to_json() const {
  return {{"num", num}, {"den", den}, {"value", value()}};
}

Fraction operator-(const Fraction& a, const Fraction& b) {
  return Fraction(a.num * b.den - b.num * a.den, a.den * b.den);
}

Fraction operator+(const Fraction& a, const Fraction& b) {
  return Fraction(a.num * b.den + b.num * a.den, a.den * b.den);
}

bool operator<(const Fraction& a, const Fraction& b) { return a.num * b.den < b.num * a.den; }

std::string_view to_string(Mode m) { return m == Mode::kNoSearch ? "no_search" : "search"; }

std::optional<Mode> mode_from_string(std::string_view s) {
  if (s == "no_search") return Mode::kNoSearch;
  if (s == "search") return Mode::kSearch;
  return std::nullopt;
}

std::string normalize_answer(std::string_view s) {
  std::string cur = normalize_step(s);
  for (int i = 0; i < 64; ++i) {
    std::string next = normalize_step(cur);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

bool score_em(std::string_view pred, std::string_view gold, const std::vector<std::string>& aliases,
              bool strict) {
  const std::string p = normalize_answer(pred);
  if (p == normalize_answer(gold)) return true;
  if (strict) return false;
  return std::any_of(aliases.begin(), aliases.end(),
                     [&](const std::string& a) { return p == normalize_answer(a); });
}

GoldTable gold_table(const std::vector<QuestionInstance>& benchmark) {
  GoldTable out;
  for (const auto& inst : benchmark) {
    out[inst.id] = GoldAnswer{inst.level, inst.gold_label, inst.gold_aliases};
  }
  return out;
}

PassAtK pass_at_k(const std::vector<PredictionRecord>& records, const GoldTable& gold,
                  std::size_t k, bool strict) {
  if (k < 1) throw EvalError("k must be at least 1");
  PassAtK out;
  std::size_t hits = 0;
  for (const auto& r : records) {
    const GoldAnswer& g = gold_for(gold, r.instance_id);
    if (r.samples.size() < k) {
      out.skipped.push_back(r.instance_id);
      continue;
    }
    ++out.scored;
    const bool any = std::any_of(r.samples.begin(), r.samples.begin() + static_cast<std::ptrdiff_t>(k),
                                 [&](const std::string& s) { return sample_correct(s, g, strict); });
    hits += any ? 1 : 0;
  }
  out.value = mean(hits, out.scored);
  return out;
}

Fraction delta_k(const std::vector<PredictionRecord>& no_search,
                 const std::vector<PredictionRecord>& search, const GoldTable& gold,
                 std::size_t k, bool strict) {
  if (ids_of(no_search) != ids_of(search)) {
    throw EvalError("no-search and search predictions cover different instances");
  }
  return pass_at_k(no_search, gold, k, strict).value - pass_at_k(search, gold, 1, strict).value;
}

std::string render_prompt(std::string_view question) {
  return std::string(kPromptTemplate) + std::string(question);
}

std::optional<std::string> extract_answer(std::string_view transcript) {
  constexpr std::string_view open = "<answer>";
  constexpr std::string_view close = "</answer>";
  // The last closing tag preceded by an opening tag is the final answer.
  std::size_t end = transcript.size();
  while (true) {
    const std::size_t c = transcript.rfind(close, end);
    if (c == std::string_view::npos) return std::nullopt;
    const std::size_t o = transcript.rfind(open, c);
    if (o != std::string_view::npos) {
      const std::string_view body = transcript.substr(o + open.size(), c - o - open.size());
      if (body.find(close) == std::string_view::npos) return std::string(text::trim(body));
    }
    if (c == 0) return std::nullopt;
    end = c - 1;
  }
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::vector<PredictionRecord> out;
  LineReader in(path);
  std::string line;
  while (in.next(line)) {
    if (text::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(in.line_number());
    try {
      const Json j = Json::parse(line);
      PredictionRecord r;
      r.instance_id = j.at("instance_id").get<std::string>();
      auto mode = mode_from_string(j.at("mode").get<std::string>());
      if (!mode) throw EvalError(where + ": unknown mode");
      r.mode = *mode;
      if (j.contains("samples")) {
        r.samples = j["samples"].get<std::vector<std::string>>();
      } else {
        for (const auto& t : j.at("transcripts")) {
          r.samples.push_back(extract_answer(t.get<std::string>()).value_or(""));
        }
      }
      if (r.samples.empty()) throw EvalError(where + ": record has no samples");
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw EvalError(where + ": " + e.what());
    }
  }
  return out;
}

ScoreReport score(const std::vector<QuestionInstance>& benchmark,
                  const std::vector<PredictionRecord>& records, const std::vector<std::size_t>& ks) {
  const GoldTable gold = gold_table(benchmark);
  ScoreReport report;
  std::set<std::pair<Mode, std::string>> seen;
  for (const auto& r : records) {
    gold_for(gold, r.instance_id);
    if (!seen.insert({r.mode, r.instance_id}).second) {
      throw EvalError("duplicate prediction for " + r.instance_id + " (" +
                      std::string(to_string(r.mode)) + ")");
    }
  }

  for (Mode mode : {Mode::kNoSearch, Mode::kSearch}) {
    const auto recs = of_mode(records, mode);
    if (recs.empty()) continue;
    ModeScores scores;
    std::map<Level, std::pair<std::size_t, std::size_t>> alias_hits, strict_hits;
    std::size_t alias_total = 0, strict_total = 0;
    for (const auto& r : recs) {
      const GoldAnswer& g = gold.at(r.instance_id);
      Verdict v{r.instance_id, g.level, mode, sample_correct(r.samples.front(), g, false),
                sample_correct(r.samples.front(), g, true)};
      alias_hits[g.level].first += v.em_alias;
      alias_hits[g.level].second += 1;
      strict_hits[g.level].first += v.em_strict;
      strict_hits[g.level].second += 1;
      alias_total += v.em_alias;
      strict_total += v.em_strict;
      report.verdicts.push_back(std::move(v));
    }
    for (const auto& [level, hn] : alias_hits) scores.em_per_level[level] = mean(hn.first, hn.second);
    for (const auto& [level, hn] : strict_hits) {
      scores.em_strict_per_level[level] = mean(hn.first, hn.second);
    }
    scores.em_overall = mean(alias_total, recs.size());
    scores.em_strict_overall = mean(strict_total, recs.size());
    for (std::size_t k : ks) scores.pass_at_k[k] = pass_at_k(recs, gold, k);
    report.modes[mode] = std::move(scores);
  }

  if (report.modes.count(Mode::kNoSearch) && report.modes.count(Mode::kSearch)) {
    const auto ns = of_mode(records, Mode::kNoSearch);
    const auto s = of_mode(records, Mode::kSearch);
    for (std::size_t k : ks) {
      report.delta_k[k] = delta_k(ns, s, gold, k);
      for (Level level : kAllLevels) {
        const GoldTable lg = restrict_level(gold, level);
        const auto lns = restrict_ids(ns, lg);
        if (lns.empty()) continue;
        report.delta_k_per_level[level][k] = delta_k(lns, restrict_ids(s, lg), lg, k);
      }
    }
  }
  std::sort(report.verdicts.begin(), report.verdicts.end(), [](const Verdict& a, const Verdict& b) {
    return std::tie(a.instance_id, a.mode) < std::tie(b.instance_id, b.mode);
  });
  return report;
}

nlohmann::ordered_json ScoreReport::to_json() const {
  OrderedJson j;
  j["modes"] = OrderedJson::object();
  for (const auto& [mode, s] : modes) {
    OrderedJson m;
    auto levels = [](const std::map<Level, Fraction>& per_level) {
      OrderedJson out = OrderedJson::object();
      for (const auto& [l, f] : per_level) out[std::string(to_string(l))] = f.to_json();
      return out;
    };
    m["em"] = {{"overall", s.em_overall.to_json()}, {"per_level", levels(s.em_per_level)}};
    m["em_strict"] = {{"overall", s.em_strict_overall.to_json()},
                      {"per_level", levels(s.em_strict_per_level)}};
    m["pass_at_k"] = OrderedJson::object();
    for (const auto& [k, p] : s.pass_at_k) {
      OrderedJson pj = p.value.to_json();
      pj["scored"] = p.scored;
      pj["skipped"] = p.skipped;
      m["pass_at_k"][std::to_string(k)] = std::move(pj);
    }
    j["modes"][std::string(to_string(mode))] = std::move(m);
  }
  j["delta_k"] = OrderedJson::object();
  for (const auto& [k, f] : delta_k) j["delta_k"][std::to_string(k)] = f.to_json();
  j["delta_k_per_level"] = OrderedJson::object();
  for (const auto& [level, grid] : delta_k_per_level) {
    OrderedJson row = OrderedJson::object();
    for (const auto& [k, f] : grid) row[std::to_string(k)] = f.to_json();
    j["delta_k_per_level"][std::string(to_string(level))] = std::move(row);
  }
  return j;
}

std::string ScoreReport::verdicts_csv() const {
  std::ostringstream out;
  out << "instance_id,level,mode,em_alias,em_strict\n";
  for (const auto& v : verdicts) {
    out << v.instance_id << ',' << to_string(v.level) << ',' << to_string(v.mode) << ','
        << (v.em_alias ? 1 : 0) << ',' << (v.em_strict ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string ScoreReport::delta_grid_csv() const {
  std::ostringstream out;
  out << "level,k,delta_num,delta_den,delta\n";
  auto row = [&](std::string_view level, std::size_t k, const Fraction& f) {
    out << level << ',' << k << ',' << f.num << ',' << f.den << ',' << f.value() << '\n';
  };
  for (const auto& [k, f] : delta_k) row("all", k, f);
  for (const auto& [level, grid] : delta_k_per_level) {
    for (const auto& [k, f] : grid) row(to_string(level), k, f);
  }
  return out.str();
}

}  // namespace kgdelta::eval
