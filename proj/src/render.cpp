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

#include "kgdelta/render.hpp"

#include <algorithm>

#include "kgdelta/errors.hpp"

namespace kgdelta {
namespace {

using sparql::FilterKind;
using sparql::PatternBlock;
using sparql::Variable;

struct MissingLabel {
  EntityId entity;
};

struct Unrenderable {};

class Renderer {
 public:
  Renderer(const TemplateSet& templates, const TripleStore& g1)
      : t_(templates), g1_(g1) {}

  std::string label(EntityId e) const {
    const LabelRecord* rec = g1_.label(e, t_.language);
    if (!rec) throw MissingLabel{e};
    return rec->label;
  }

  std::string relation(EntityId p) const {
    if (auto it = t_.relation_phrases.find(p.str()); it != t_.relation_phrases.end()) {
      return it->second;
    }
    return label(p);
  }

  std::string value_text(const ObjectValue& v) const {
    if (const EntityId* e = v.entity_if()) return label(*e);
    return v.literal().value;
  }

  std::vector<EntityId> classes_of(EntityId e) const {
    std::vector<EntityId> out;
    for (const Triple& t : g1_.group(e, sparql::kInstanceOf)) {
      if (const EntityId* c = t.object.entity_if(); c && t.rank != Rank::kDeprecated) {
        out.push_back(*c);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::vector<std::string> keys(const std::string& base, const ObjectValue& entity) const {
    std::vector<std::string> out;
    if (const EntityId* e = entity.entity_if()) {
      for (EntityId c : classes_of(*e)) out.push_back(base + "@" + c.str());
    }
    out.push_back(base);
    return out;
  }

  struct BlockPhrase {
    std::string phrase_template;  // constraint phrase with {anchor} still open
    std::string anchor;
  };

  // Phrase for one block, plus the fuzz text when the block is broadened.
  BlockPhrase block_phrase(const PatternBlock& b, const std::string& target,
                           std::string& fuzz_phrase) const {
    auto is_target = [&](const sparql::Term& t) {
      auto v = std::get_if<Variable>(&t);
      return v && v->name == target;
    };
    if (b.patterns.empty()) throw Unrenderable{};
    const auto& first = b.patterns.front();
    const bool outgoing = is_target(first.subject);
    if (!outgoing && !is_target(first.object)) throw Unrenderable{};
    const sparql::Term& anchor_term = outgoing ? first.object : first.subject;

    std::string anchor;
    if (b.patterns.size() == 1 && b.filters.empty()) {
      if (std::holds_alternative<Variable>(anchor_term)) throw Unrenderable{};
      if (auto e = std::get_if<EntityId>(&anchor_term)) {
        anchor = label(*e);
      } else {
        anchor = std::get<Literal>(anchor_term).value;
      }
    } else if (b.patterns.size() == 1 && b.filters.size() == 1 &&
               b.filters[0].kind == FilterKind::kTypeConstraint) {
      anchor = with_indefinite_article(label(b.filters[0].target));
      fuzz_phrase = anchor;
    } else if (b.patterns.size() == 2 && b.filters.empty() && outgoing) {
      const auto& second = b.patterns[1];
      auto end = std::get_if<EntityId>(&second.object);
      if (!end || second.subject != first.object) throw Unrenderable{};
      anchor = "something whose " + relation(second.predicate) + " is " + label(*end);
    } else {
      throw Unrenderable{};
    }

    const std::string dir = outgoing ? ">" : "<";
    std::string phrase;
    if (auto it = t_.constraint_phrases.find(first.predicate.str() + dir);
        it != t_.constraint_phrases.end()) {
      phrase = it->second;
    } else {
      phrase = t_.constraint_phrases.at("default" + dir);
    }
    if (phrase.find("{relation_phrase}") != std::string::npos) {
      phrase = fill_slots(phrase, {{"anchor", "{anchor}"},
                                   {"relation_phrase", relation(first.predicate)}});
    }
    return {phrase, anchor};
  }

  std::string render(const QuestionInstance& inst) const {
    std::map<std::string, std::string> slots{{"subject_label", ""},
                                             {"relation_phrase", ""},
                                             {"constraint_phrases", ""},
                                             {"fuzz_phrase", ""}};
    const auto& blocks = inst.spec.blocks;
    if (inst.level == Level::kL1) {
      const auto& p = blocks.at(0).patterns.at(0);
      auto subject = std::get_if<EntityId>(&p.subject);
      if (!subject) throw Unrenderable{};
      const std::string& tmpl = t_.select(Level::kL1, keys(p.predicate.str(), *subject));
      slots["subject_label"] = label(*subject);
      if (tmpl.find("{relation_phrase}") != std::string::npos) {
        slots["relation_phrase"] = relation(p.predicate);
      }
      return fill_slots(tmpl, slots);
    }

    const std::string& target = inst.spec.select_var;
    std::string fuzz_phrase;
    std::vector<BlockPhrase> phrases;
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
      phrases.push_back(block_phrase(*it, target, fuzz_phrase));
    }
    // Consecutive blocks sharing a phrase collapse into one with a list of
    // anchors.
    std::vector<std::string> rendered;
    for (std::size_t i = 0; i < phrases.size();) {
      std::size_t j = i;
      std::vector<std::string> anchors;
      while (j < phrases.size() && phrases[j].phrase_template == phrases[i].phrase_template) {
        anchors.push_back(phrases[j].anchor);
        ++j;
      }
      rendered.push_back(fill_slots(phrases[i].phrase_template, {{"anchor", serial_join(anchors)}}));
      i = j;
    }
    slots["constraint_phrases"] = serial_join(rendered);
    slots["fuzz_phrase"] = fuzz_phrase;

    const auto& seed = blocks.front().patterns.front();
    auto sv = std::get_if<Variable>(&seed.subject);
    const std::string dir = sv && sv->name == target ? ">" : "<";
    const std::string& tmpl = t_.select(inst.level, keys(seed.predicate.str() + dir, inst.gold));
    if (tmpl.find("{subject_label}") != std::string::npos) slots["subject_label"] = value_text(inst.gold);
    if (tmpl.find("{relation_phrase}") != std::string::npos) {
      slots["relation_phrase"] = relation(seed.predicate);
    }
    return fill_slots(tmpl, slots);
  }

 private:
  const TemplateSet& t_;
  const TripleStore& g1_;
};

}  // namespace

RenderResult render_question(const QuestionInstance& inst, const TemplateSet& templates,
                             const TripleStore& g1) {
  RenderResult r;
  try {
    r.text = Renderer(templates, g1).render(inst);
  } catch (const MissingLabel& m) {
    r.reject_reason = "missing_label";
    r.missing = m.entity;
  } catch (const Unrenderable&) {
    r.reject_reason = "unrenderable_pattern";
  }
  return r;
}

nlohmann::ordered_json RenderReport::to_json() const {
  nlohmann::ordered_json j;
  j["input_count"] = input_count;
  j["rendered_count"] = rendered_count;
  j["rejected"] = rejected;
  return j;
}

RenderOutput render_all(const std::vector<QuestionInstance>& instances,
                        const TemplateSet& templates, const TripleStore& g1) {
  RenderOutput out;
  out.report.input_count = instances.size();
  for (const auto& inst : instances) {
    if (inst.gold.is_entity() && inst.gold_label.empty()) {
      ++out.report.rejected["missing_label"];
      continue;
    }
    RenderResult r = render_question(inst, templates, g1);
    if (!r.text) {
      ++out.report.rejected[*r.reject_reason];
      continue;
    }
    QuestionInstance rendered = inst;
    rendered.question = std::move(*r.text);
    out.instances.push_back(std::move(rendered));
  }
  out.report.rendered_count = out.instances.size();
  return out;
}

}  // namespace kgdelta
