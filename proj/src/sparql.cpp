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

#include "kgdelta/sparql.hpp"

#include <algorithm>

#include "kgdelta/canonical_io.hpp"
#include "sparql_lexer.hpp"

namespace kgdelta::sparql {
namespace {

using detail::Lexer;
using detail::Token;
using detail::TokenKind;

constexpr std::string_view kHopVar = "_hop";

bool valid_var_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool user_var_name(std::string_view name) {
  return valid_var_name(name) && name.front() != '_';
}

std::string_view datatype_iri(LiteralType t) {
  switch (t) {
    case LiteralType::kString: return "";
    case LiteralType::kQuantity: return "xsd:decimal";
    case LiteralType::kTime: return "xsd:dateTime";
    case LiteralType::kCoordinate: return "geo:wktLiteral";
    case LiteralType::kMonolingual: return "rdf:langString";
    case LiteralType::kOpaque: return "rdf:JSON";
  }
  return "";
}

std::optional<LiteralType> datatype_from_iri(std::string_view iri) {
  for (auto t : {LiteralType::kQuantity, LiteralType::kTime, LiteralType::kCoordinate,
                 LiteralType::kMonolingual, LiteralType::kOpaque}) {
    if (datatype_iri(t) == iri) return t;
  }
  return std::nullopt;
}

std::string escape_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default: out.push_back(c);
    }
  }
  out += '"';
  return out;
}

std::string filter_to_sparql(const FilterExpr& f) {
  const std::string v = "?" + f.var;
  switch (f.kind) {
    case FilterKind::kTypeConstraint:
      return "FILTER EXISTS { " + v + " wdt:P31/wdt:P279* wd:" + f.target.str() + " . }";
    case FilterKind::kAttributeEquals:
      return "FILTER EXISTS { " + v + " wdt:" + f.predicate.str() + " wd:" + f.target.str() +
             " . }";
    case FilterKind::kHopExists:
      return "FILTER EXISTS { " + v + " wdt:" + f.predicate.str() + " ?" +
             std::string(kHopVar) + " . ?" + std::string(kHopVar) + " wdt:" +
             f.hop_predicate.str() + " wd:" + f.target.str() + " . }";
  }
  return {};
}

std::string pattern_to_sparql(const Pattern& p) {
  return term_to_sparql(p.subject) + " wdt:" + p.predicate.str() + " " +
         term_to_sparql(p.object) + " .";
}

bool block_binds(const PatternBlock& b, std::string_view var) {
  auto vars = block_variables(b);
  return std::find(vars.begin(), vars.end(), var) != vars.end();
}

// Recursive-descent parser over the fragment.
class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  QuerySpec parse() {
    QuerySpec spec;
    const Token& first = lex_.peek();
    if (first.kind == TokenKind::kEnd) {
      throw SyntaxError(first.line, first.column, "empty query, expected SELECT");
    }
    if (first.kind == TokenKind::kWord) {
      for (auto kw : {"PREFIX", "BASE", "ASK", "CONSTRUCT", "DESCRIBE", "INSERT", "DELETE"}) {
        if (first.is_word(kw)) unsupported(first, kw);
      }
    }
    expect_word("SELECT");
    const Token& modifier = lex_.peek();
    if (modifier.is_word("DISTINCT") || modifier.is_word("REDUCED")) {
      unsupported(modifier, upper(modifier.text));
    }
    if (modifier.is_punct("*")) unsupported(modifier, "SELECT *");
    if (modifier.is_punct("(")) unsupported(modifier, "projection expression");
    spec.select_var = expect_var();
    if (lex_.peek().kind == TokenKind::kVar) unsupported(lex_.peek(), "multiple projection variables");
    expect_word("WHERE");
    expect_punct("{");
    if (lex_.peek().is_punct("{")) {
      spec.blocks.push_back(group_block());
      while (lex_.peek().is_word("UNION")) {
        lex_.take();
        spec.blocks.push_back(group_block());
      }
      expect_punct("}");
    } else {
      PatternBlock block;
      block_contents(block);
      expect_punct("}");
      spec.blocks.push_back(std::move(block));
    }
    modifiers(spec);
    const Token& end = lex_.peek();
    if (end.kind != TokenKind::kEnd) fail(end, "unexpected trailing input '" + end.text + "'");
    try {
      validate(spec);
    } catch (const InvalidSpec& e) {
      throw SyntaxError(1, 1, e.what());
    }
    return spec;
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw SyntaxError(t.line, t.column, msg);
  }
  [[noreturn]] static void unsupported(const Token& t, std::string construct) {
    throw UnsupportedConstruct(t.line, t.column, std::move(construct));
  }
  static std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }
  static std::string describe(const Token& t) {
    return t.kind == TokenKind::kEnd ? "end of input" : "'" + t.text + "'";
  }

  void expect_word(std::string_view w) {
    Token t = lex_.take();
    if (!t.is_word(w)) fail(t, "expected " + std::string(w) + ", found " + describe(t));
  }
  void expect_punct(std::string_view p) {
    Token t = lex_.take();
    if (!t.is_punct(p)) fail(t, "expected '" + std::string(p) + "', found " + describe(t));
  }
  std::string expect_var() {
    Token t = lex_.take();
    if (t.kind != TokenKind::kVar) fail(t, "expected variable, found " + describe(t));
    return t.text;
  }
  std::size_t expect_integer() {
    Token t = lex_.take();
    if (t.kind != TokenKind::kInteger) fail(t, "expected integer, found " + describe(t));
    try {
      return static_cast<std::size_t>(std::stoull(t.text));
    } catch (const std::exception&) {
      fail(t, "integer out of range");
    }
  }

  EntityId expect_prefixed(std::string_view prefix, bool property) {
    Token t = lex_.take();
    if (t.kind == TokenKind::kVar && property) unsupported(t, "variable predicate");
    if (t.kind == TokenKind::kIri) unsupported(t, "IRI reference");
    if (t.kind != TokenKind::kPrefixed) {
      fail(t, "expected " + std::string(prefix) + ":… name, found " + describe(t));
    }
    const auto colon = t.text.find(':');
    const std::string_view pfx = std::string_view(t.text).substr(0, colon);
    if (pfx != prefix) unsupported(t, "prefix '" + std::string(pfx) + ":'");
    auto id = EntityId::try_parse(std::string_view(t.text).substr(colon + 1));
    if (!id || id->is_property() != property) {
      fail(t, "invalid " + std::string(property ? "property" : "entity") + " id in '" + t.text + "'");
    }
    return *id;
  }

  EntityId predicate() {
    const EntityId p = expect_prefixed("wdt", true);
    const Token& after = lex_.peek();
    if (after.is_punct("/") || after.is_punct("*") || after.is_punct("+") ||
        after.is_punct("|") || after.is_punct("^")) {
      unsupported(after, "property path");
    }
    return p;
  }

  Term term() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case TokenKind::kVar: return Variable{lex_.take().text};
      case TokenKind::kPrefixed: return expect_prefixed("wd", false);
      case TokenKind::kString: {
        Token s = lex_.take();
        Literal lit{s.text, LiteralType::kString};
        if (lex_.peek().is_punct("^^")) {
          lex_.take();
          Token dt = lex_.take();
          if (dt.kind != TokenKind::kPrefixed) fail(dt, "expected datatype name after ^^");
          auto type = datatype_from_iri(dt.text);
          if (!type) unsupported(dt, "datatype " + dt.text);
          lit.type = *type;
        } else if (lex_.peek().kind == TokenKind::kLangTag) {
          unsupported(lex_.peek(), "language-tagged literal");
        }
        return lit;
      }
      case TokenKind::kInteger: unsupported(t, "numeric literal");
      case TokenKind::kIri: unsupported(t, "IRI reference");
      default: fail(t, "expected term, found " + describe(t));
    }
  }

  PatternBlock group_block() {
    expect_punct("{");
    PatternBlock block;
    block_contents(block);
    expect_punct("}");
    return block;
  }

  void block_contents(PatternBlock& block) {
    for (;;) {
      const Token& t = lex_.peek();
      if (t.is_punct("}") || t.kind == TokenKind::kEnd) return;
      if (t.is_word("FILTER")) {
        block.filters.push_back(filter());
        continue;
      }
      if (t.kind == TokenKind::kWord) {
        for (auto kw : {"OPTIONAL", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "UNION"}) {
          if (t.is_word(kw)) unsupported(t, kw);
        }
        fail(t, "unexpected keyword '" + t.text + "'");
      }
      if (t.is_punct("{")) unsupported(t, "nested group pattern");
      Pattern p;
      p.subject = term();
      p.predicate = predicate();
      p.object = term();
      if (lex_.peek().is_punct(";") || lex_.peek().is_punct(",")) {
        unsupported(lex_.peek(), "predicate-object list");
      }
      block.patterns.push_back(std::move(p));
      if (lex_.peek().is_punct(".")) {
        lex_.take();
      } else if (!lex_.peek().is_punct("}") && !lex_.peek().is_word("FILTER")) {
        fail(lex_.peek(), "expected '.' after triple pattern, found " + describe(lex_.peek()));
      }
    }
  }

  FilterExpr filter() {
    lex_.take();  // FILTER
    const Token& t = lex_.peek();
    if (t.is_word("NOT")) unsupported(t, "FILTER NOT EXISTS");
    if (!t.is_word("EXISTS")) unsupported(t, "FILTER expression");
    lex_.take();
    expect_punct("{");
    FilterExpr f;
    f.var = expect_var();
    const EntityId p = expect_prefixed("wdt", true);
    if (lex_.peek().is_punct("/")) {
      lex_.take();
      const Token& sub = lex_.peek();
      const EntityId p2 = expect_prefixed("wdt", true);
      if (p != kInstanceOf || p2 != kSubclassOf) unsupported(sub, "property path");
      expect_punct("*");
      f.kind = FilterKind::kTypeConstraint;
      f.target = expect_prefixed("wd", false);
    } else if (lex_.peek().kind == TokenKind::kVar) {
      const std::string hop = lex_.take().text;
      expect_punct(".");
      const Token& again = lex_.peek();
      if (expect_var() != hop) fail(again, "hop filter must chain through ?" + hop);
      f.kind = FilterKind::kHopExists;
      f.predicate = p;
      f.hop_predicate = expect_prefixed("wdt", true);
      f.target = expect_prefixed("wd", false);
    } else {
      f.kind = FilterKind::kAttributeEquals;
      f.predicate = p;
      f.target = expect_prefixed("wd", false);
    }
    if (lex_.peek().is_punct(".")) lex_.take();
    expect_punct("}");
    return f;
  }

  void modifiers(QuerySpec& spec) {
    for (;;) {
      const Token& t = lex_.peek();
      if (t.is_word("GROUP")) {
        if (spec.grouping || spec.limit) fail(t, "GROUP BY must precede LIMIT and appear once");
        lex_.take();
        expect_word("BY");
        Grouping g;
        g.group_var = expect_var();
        expect_word("HAVING");
        expect_punct("(");
        expect_word("COUNT");
        expect_punct("(");
        const Token& counted = lex_.peek();
        if (expect_var() != g.group_var) fail(counted, "COUNT must count the grouping variable");
        expect_punct(")");
        Token op = lex_.take();
        if (op.is_punct("=")) {
          g.op = CountOp::kEqual;
        } else if (op.is_punct(">=")) {
          g.op = CountOp::kAtLeast;
        } else {
          unsupported(op, "HAVING comparison '" + op.text + "'");
        }
        g.threshold = expect_integer();
        expect_punct(")");
        spec.grouping = std::move(g);
      } else if (t.is_word("LIMIT")) {
        if (spec.limit) fail(t, "duplicate LIMIT");
        lex_.take();
        spec.limit = expect_integer();
      } else if (t.is_word("ORDER") || t.is_word("OFFSET")) {
        unsupported(t, upper(t.text));
      } else {
        return;
      }
    }
  }

  Lexer lex_;
};

}  // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

UnsupportedConstruct::UnsupportedConstruct(std::size_t line, std::size_t column,
                                           std::string construct)
    : SyntaxError(line, column, "unsupported construct: " + construct),
      construct_(std::move(construct)) {}

std::vector<std::string> block_variables(const PatternBlock& block) {
  std::vector<std::string> vars;
  auto add = [&](const Term& t) {
    if (auto v = std::get_if<Variable>(&t)) {
      if (std::find(vars.begin(), vars.end(), v->name) == vars.end()) vars.push_back(v->name);
    }
  };
  for (const auto& p : block.patterns) {
    add(p.subject);
    add(p.object);
  }
  return vars;
}

void validate(const QuerySpec& spec) {
  if (!user_var_name(spec.select_var)) {
    throw InvalidSpec("invalid select variable '?" + spec.select_var + "'");
  }
  if (spec.blocks.empty()) throw InvalidSpec("query has no pattern blocks");
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& block = spec.blocks[i];
    const std::string where = "block " + std::to_string(i) + ": ";
    if (block.patterns.empty()) throw InvalidSpec(where + "no patterns");
    for (const auto& p : block.patterns) {
      if (std::holds_alternative<Literal>(p.subject)) {
        throw InvalidSpec(where + "literal in subject position");
      }
      if (!p.predicate.is_property() || !p.predicate.valid()) {
        throw InvalidSpec(where + "predicate must be a property id");
      }
      for (const Term* t : {&p.subject, &p.object}) {
        if (auto v = std::get_if<Variable>(t); v && (!valid_var_name(v->name) || v->name == kHopVar)) {
          throw InvalidSpec(where + "invalid variable '?" + v->name + "'");
        }
        if (auto e = std::get_if<EntityId>(t); e && !e->valid()) {
          throw InvalidSpec(where + "invalid entity id");
        }
      }
    }
    if (!block_binds(block, spec.select_var)) {
      throw InvalidSpec(where + "does not bind ?" + spec.select_var);
    }
    for (const auto& f : block.filters) {
      if (!block_binds(block, f.var)) {
        throw InvalidSpec(where + "filter variable ?" + f.var + " is not bound by a pattern");
      }
      if (!f.target.valid()) throw InvalidSpec(where + "filter target missing");
      if (f.kind != FilterKind::kTypeConstraint && !f.predicate.is_property()) {
        throw InvalidSpec(where + "filter predicate must be a property");
      }
      if (f.kind == FilterKind::kHopExists && !f.hop_predicate.is_property()) {
        throw InvalidSpec(where + "hop predicate must be a property");
      }
    }
  }
  if (spec.grouping) {
    if (spec.grouping->group_var != spec.select_var) {
      throw InvalidSpec("GROUP BY variable must be the selected variable");
    }
    if (spec.grouping->threshold < 1) throw InvalidSpec("HAVING threshold must be at least 1");
  }
  if (spec.limit && *spec.limit < 1) throw InvalidSpec("LIMIT must be at least 1");
}

std::string term_to_sparql(const Term& t) {
  if (auto v = std::get_if<Variable>(&t)) return "?" + v->name;
  if (auto e = std::get_if<EntityId>(&t)) return "wd:" + e->str();
  const auto& lit = std::get<Literal>(t);
  std::string out = escape_string(lit.value);
  if (auto dt = datatype_iri(lit.type); !dt.empty()) {
    out += "^^";
    out += dt;
  }
  return out;
}

std::string build_sparql(const QuerySpec& spec) {
  validate(spec);
  std::string out = "SELECT ?" + spec.select_var + " WHERE {\n";
  if (spec.blocks.size() == 1) {
    for (const auto& p : spec.blocks.front().patterns) out += "  " + pattern_to_sparql(p) + "\n";
    for (const auto& f : spec.blocks.front().filters) out += "  " + filter_to_sparql(f) + "\n";
  } else {
    for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
      if (i > 0) out += "  UNION\n";
      out += "  {";
      for (const auto& p : spec.blocks[i].patterns) out += " " + pattern_to_sparql(p);
      for (const auto& f : spec.blocks[i].filters) out += " " + filter_to_sparql(f);
      out += " }\n";
    }
  }
  out += "}";
  if (spec.grouping) {
    const auto& g = *spec.grouping;
    out += " GROUP BY ?" + g.group_var + " HAVING (COUNT(?" + g.group_var + ")" +
           (g.op == CountOp::kEqual ? "=" : ">=") + std::to_string(g.threshold) + ")";
  }
  if (spec.limit) out += " LIMIT " + std::to_string(*spec.limit);
  return out;
}

QuerySpec parse_sparql(std::string_view text) { return Parser(text).parse(); }

namespace {

OrderedJson term_json(const Term& t) {
  OrderedJson j;
  if (auto v = std::get_if<Variable>(&t)) {
    j["var"] = v->name;
  } else if (auto e = std::get_if<EntityId>(&t)) {
    j["entity"] = e->str();
  } else {
    const auto& lit = std::get<Literal>(t);
    j["literal"] = lit.value;
    j["datatype"] = std::string(to_string(lit.type));
  }
  return j;
}

Term term_from_json(const Json& j) {
  if (j.contains("var")) return Variable{j["var"].get<std::string>()};
  if (j.contains("entity")) return EntityId::parse(j["entity"].get<std::string>());
  auto type = literal_type_from_string(j.value("datatype", "string"));
  if (!type) throw FormatError("unknown literal datatype");
  return Literal{j.at("literal").get<std::string>(), *type};
}

std::string_view kind_name(FilterKind k) {
  switch (k) {
    case FilterKind::kTypeConstraint: return "type_constraint";
    case FilterKind::kAttributeEquals: return "attribute_equals";
    case FilterKind::kHopExists: return "hop_exists";
  }
  return "";
}

}  // namespace

nlohmann::ordered_json filter_to_json(const FilterExpr& f) {
  OrderedJson j;
  j["kind"] = std::string(kind_name(f.kind));
  j["var"] = f.var;
  if (f.kind != FilterKind::kTypeConstraint) j["predicate"] = f.predicate.str();
  if (f.kind == FilterKind::kHopExists) j["hop_predicate"] = f.hop_predicate.str();
  j["target"] = f.target.str();
  return j;
}

FilterExpr filter_from_json(const nlohmann::json& j) {
  FilterExpr f;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "type_constraint") {
    f.kind = FilterKind::kTypeConstraint;
  } else if (kind == "attribute_equals") {
    f.kind = FilterKind::kAttributeEquals;
  } else if (kind == "hop_exists") {
    f.kind = FilterKind::kHopExists;
  } else {
    throw FormatError("unknown filter kind '" + kind + "'");
  }
  f.var = j.at("var").get<std::string>();
  if (j.contains("predicate")) f.predicate = EntityId::parse(j["predicate"].get<std::string>());
  if (j.contains("hop_predicate")) {
    f.hop_predicate = EntityId::parse(j["hop_predicate"].get<std::string>());
  }
  f.target = EntityId::parse(j.at("target").get<std::string>());
  return f;
}

nlohmann::ordered_json block_to_json(const PatternBlock& block) {
  OrderedJson j;
  j["patterns"] = OrderedJson::array();
  for (const auto& p : block.patterns) {
    OrderedJson pj;
    pj["s"] = term_json(p.subject);
    pj["p"] = p.predicate.str();
    pj["o"] = term_json(p.object);
    j["patterns"].push_back(std::move(pj));
  }
  j["filters"] = OrderedJson::array();
  for (const auto& f : block.filters) j["filters"].push_back(filter_to_json(f));
  return j;
}

PatternBlock block_from_json(const nlohmann::json& j) {
  PatternBlock b;
  for (const auto& pj : j.at("patterns")) {
    b.patterns.push_back(Pattern{term_from_json(pj.at("s")),
                                 EntityId::parse(pj.at("p").get<std::string>()),
                                 term_from_json(pj.at("o"))});
  }
  if (j.contains("filters")) {
    for (const auto& fj : j["filters"]) b.filters.push_back(filter_from_json(fj));
  }
  return b;
}

}  // namespace kgdelta::sparql
