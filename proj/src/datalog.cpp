// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>

#include "names/check.hpp"
#include "names/parser.hpp"

namespace names {

Constant key_constant(const Key& k) {
  return Constant{Constant::Space::Key, k.id};
}

Constant global_constant(const GlobalName& g) {
  return Constant{Constant::Space::Global, g.id};
}

Constant local_constant(const LocalName& n) {
  return Constant{Constant::Space::Local, n.id};
}

Constant self_constant() { return Constant{Constant::Space::Self, ""}; }

namespace {

// First pass of the flattening: fresh variables get placeholder names
// ("@0", "@1", ...) in allocation order, which is not presentation order.
void flatten_expr(const ExprPtr& e, const Term& x, const Term& y,
                  std::size_t& counter, std::vector<Atom>& out) {
  if (e->kind() == PrincipalExpr::Kind::Compound) {
    Term mid{Variable{"@" + std::to_string(counter++)}};
    flatten_expr(e->left(), x, mid, counter, out);
    flatten_expr(e->right(), mid, y, counter, out);
    return;
  }
  Constant c;
  switch (e->kind()) {
    case PrincipalExpr::Kind::Key:
      c = key_constant(e->key_name());
      break;
    case PrincipalExpr::Kind::Global:
      c = global_constant(e->global_name());
      break;
    case PrincipalExpr::Kind::Local:
      c = local_constant(e->local_name());
      break;
    case PrincipalExpr::Kind::Self:
      c = self_constant();
      break;
    case PrincipalExpr::Kind::Compound:
      NAMES_CHECK(false, "compound handled above");
      break;
  }
  out.push_back(Atom{x, Term{c}, y});
}

}  // namespace

std::vector<Atom> expr_to_query(const ExprPtr& e, const Term& x,
                                const Term& y) {
  std::vector<Atom> atoms;
  std::size_t counter = 0;
  flatten_expr(e, x, y, counter, atoms);

  // Second pass: rename placeholders to Z1, Z2, ... by first appearance in
  // the atom list, skipping names the endpoints already use.
  std::set<std::string> used;
  if (const Variable* v = std::get_if<Variable>(&x)) used.insert(v->name);
  if (const Variable* v = std::get_if<Variable>(&y)) used.insert(v->name);
  std::map<std::string, std::string> renamed;
  std::size_t next = 1;
  auto rename = [&](Term& t) {
    Variable* v = std::get_if<Variable>(&t);
    if (!v || v->name.empty() || v->name[0] != '@') return;
    auto it = renamed.find(v->name);
    if (it == renamed.end()) {
      std::string fresh;
      do {
        fresh = "Z" + std::to_string(next++);
      } while (used.count(fresh) != 0);
      it = renamed.emplace(v->name, std::move(fresh)).first;
    }
    v->name = it->second;
  };
  for (Atom& a : atoms) {
    rename(a.principal);
    rename(a.name);
    rename(a.value);
  }
  return atoms;
}

std::vector<HornClause> world_to_program(const World& w) {
  std::vector<HornClause> prog;
  auto add_fact = [&prog](Constant a, Constant b, Constant c) {
    prog.push_back(HornClause{
        Atom{Term{std::move(a)}, Term{std::move(b)}, Term{std::move(c)}}, {}});
  };
  for (const Key& k1 : w.declared_keys) {
    for (const Key& k2 : w.declared_keys) {
      add_fact(key_constant(k1), key_constant(k2), key_constant(k2));
    }
  }
  for (const auto& [g, bound] : w.globals) {
    for (const Key& k1 : w.declared_keys) {
      for (const Key& k2 : bound) {
        add_fact(key_constant(k1), global_constant(g), key_constant(k2));
      }
    }
  }
  for (const Key& k : w.declared_keys) {
    add_fact(key_constant(k), self_constant(), key_constant(k));
  }
  for (const auto& [issuer, certs] : w.certificates) {
    for (const FormulaPtr& c : certs) {
      auto binding = as_local_binding(*c);
      if (!binding) continue;
      Term issuer_term{key_constant(issuer)};
      Term result{Variable{"Y"}};
      HornClause rule;
      rule.head =
          Atom{issuer_term, Term{local_constant(binding->first)}, result};
      rule.body = expr_to_query(binding->second, issuer_term, result);
      prog.push_back(std::move(rule));
    }
  }
  return prog;
}

namespace {

bool bind_term(const Term& t, const Constant& c, Substitution& sub) {
  if (const Constant* ground = std::get_if<Constant>(&t)) return *ground == c;
  const Variable& v = std::get<Variable>(t);
  auto [it, inserted] = sub.emplace(v, c);
  return inserted || it->second == c;
}

bool match_fact(const Atom& a, const Fact& f, Substitution& sub) {
  return bind_term(a.principal, f.principal, sub) &&
         bind_term(a.name, f.name, sub) && bind_term(a.value, f.value, sub);
}

Constant apply_term(const Term& t, const Substitution& sub) {
  if (const Constant* ground = std::get_if<Constant>(&t)) return *ground;
  auto it = sub.find(std::get<Variable>(t));
  NAMES_CHECK(it != sub.end(),
              "head variable unbound; clause is not range restricted");
  return it->second;
}

Fact ground_head(const Atom& head, const Substitution& sub) {
  return Fact{apply_term(head.principal, sub), apply_term(head.name, sub),
              apply_term(head.value, sub)};
}

// Joins body atoms left to right. The pivot atom draws candidates from the
// delta of the previous round, the rest from the full fact set; a derivation
// that uses at least one delta fact is found with the pivot on one of them.
void join_rule(const HornClause& rule, std::size_t i, std::size_t pivot,
               const FactSet& total, const std::vector<Fact>& delta,
               const Substitution& sub, FactSet& staged) {
  if (i == rule.body.size()) {
    Fact f = ground_head(rule.head, sub);
    if (total.count(f) == 0) staged.insert(f);
    return;
  }
  auto consider = [&](const Fact& f) {
    Substitution extended = sub;
    if (match_fact(rule.body[i], f, extended)) {
      join_rule(rule, i + 1, pivot, total, delta, extended, staged);
    }
  };
  if (i == pivot) {
    for (const Fact& f : delta) consider(f);
  } else {
    for (const Fact& f : total) consider(f);
  }
}

}  // namespace

FactSet minimal_model(const std::vector<HornClause>& prog) {
  FactSet total;
  std::vector<Fact> delta;
  std::vector<const HornClause*> rules;
  for (const HornClause& c : prog) {
    if (!c.body.empty()) {
      rules.push_back(&c);
      continue;
    }
    Fact f = ground_head(c.head, Substitution{});
    if (total.insert(f).second) delta.push_back(f);
  }
  while (!delta.empty()) {
    FactSet staged;
    for (const HornClause* r : rules) {
      for (std::size_t pivot = 0; pivot < r->body.size(); ++pivot) {
        join_rule(*r, 0, pivot, total, delta, Substitution{}, staged);
      }
    }
    delta.assign(staged.begin(), staged.end());
    total.insert(staged.begin(), staged.end());
  }
  return total;
}

namespace {

void join_query(const std::vector<Atom>& q,
                const std::vector<std::size_t>& order, std::size_t j,
                const FactSet& m, const Substitution& sub,
                std::set<Substitution>& out) {
  if (j == order.size()) {
    out.insert(sub);
    return;
  }
  const Atom& a = q[order[j]];
  for (const Fact& f : m) {
    Substitution extended = sub;
    if (match_fact(a, f, extended)) join_query(q, order, j + 1, m, extended, out);
  }
}

}  // namespace

std::set<Substitution> answer_query(const FactSet& m,
                                    const std::vector<Atom>& q) {
  NAMES_CHECK(!q.empty(), "a conjunctive query needs at least one atom");
  std::vector<std::size_t> matches(q.size(), 0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (const Fact& f : m) {
      Substitution probe;
      if (match_fact(q[i], f, probe)) ++matches[i];
    }
  }
  std::vector<std::size_t> order(q.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&matches](std::size_t a, std::size_t b) {
                     return matches[a] < matches[b];
                   });
  std::set<Substitution> out;
  join_query(q, order, 0, m, Substitution{}, out);
  return out;
}

namespace {

void note_constant(const Term& t,
                   std::map<std::string, std::set<Constant::Space>>& by_id) {
  const Constant* c = std::get_if<Constant>(&t);
  if (!c || c->space == Constant::Space::Self) return;
  by_id[c->id].insert(c->space);
}

std::string render_term(const Term& t, const std::set<std::string>& clashing) {
  if (const Variable* v = std::get_if<Variable>(&t)) return v->name;
  const Constant& c = std::get<Constant>(t);
  if (c.space == Constant::Space::Self) return "self";
  const bool bare = !c.id.empty() &&
                    std::islower(static_cast<unsigned char>(c.id[0])) != 0 &&
                    c.id != "self" && clashing.count(c.id) == 0;
  if (bare) return c.id;
  std::string prefixed;
  switch (c.space) {
    case Constant::Space::Key:
      prefixed = "#" + c.id;
      break;
    case Constant::Space::Global:
      prefixed = "!" + c.id;
      break;
    default:
      prefixed = c.id;
      break;
  }
  return "'" + prefixed + "'";
}

std::string render_atom(const Atom& a, const std::set<std::string>& clashing) {
  return "name(" + render_term(a.principal, clashing) + ", " +
         render_term(a.name, clashing) + ", " + render_term(a.value, clashing) +
         ")";
}

}  // namespace

std::string emit_program(const std::vector<HornClause>& prog) {
  std::map<std::string, std::set<Constant::Space>> by_id;
  for (const HornClause& c : prog) {
    note_constant(c.head.principal, by_id);
    note_constant(c.head.name, by_id);
    note_constant(c.head.value, by_id);
    for (const Atom& a : c.body) {
      note_constant(a.principal, by_id);
      note_constant(a.name, by_id);
      note_constant(a.value, by_id);
    }
  }
  std::set<std::string> clashing;
  for (const auto& [id, spaces] : by_id) {
    if (spaces.size() > 1) clashing.insert(id);
  }

  FactSet facts;
  std::vector<const HornClause*> rules;
  for (const HornClause& c : prog) {
    if (!c.body.empty()) {
      rules.push_back(&c);
      continue;
    }
    const Constant* a = std::get_if<Constant>(&c.head.principal);
    const Constant* b = std::get_if<Constant>(&c.head.name);
    const Constant* v = std::get_if<Constant>(&c.head.value);
    NAMES_CHECK(a && b && v, "facts must be ground");
    facts.insert(Fact{*a, *b, *v});
  }

  std::string out;
  for (const Fact& f : facts) {
    out += render_atom(Atom{Term{f.principal}, Term{f.name}, Term{f.value}},
                       clashing);
    out += ".\n";
  }
  for (const HornClause* r : rules) {
    out += render_atom(r->head, clashing) + " :- ";
    for (std::size_t i = 0; i < r->body.size(); ++i) {
      if (i > 0) out += ", ";
      out += render_atom(r->body[i], clashing);
    }
    out += ".\n";
  }
  return out;
}

namespace {

// Minimal recursive-descent parser for query text. Spans are reported on
// line 1 since queries are single line.
class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  std::vector<Atom> parse() {
    std::vector<Atom> atoms;
    atoms.push_back(parse_atom());
    skip_ws();
    while (peek() == ',') {
      ++pos_;
      atoms.push_back(parse_atom());
      skip_ws();
    }
    if (peek() == '.') {
      ++pos_;
      skip_ws();
    }
    if (pos_ != text_.size()) {
      fail(pos_, 1, "expected end of query");
    }
    return atoms;
  }

 private:
  [[noreturn]] void fail(std::size_t at, std::size_t len,
                         const std::string& message) {
    throw ParseError(ParseErrorKind::UnexpectedToken,
                     SourceSpan{1, static_cast<int>(at) + 1,
                                static_cast<int>(len)},
                     message);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
  }

  void expect(char c, const std::string& what) {
    skip_ws();
    if (peek() != c) fail(pos_, 1, "expected " + what);
    ++pos_;
  }

  std::string read_ident() {
    std::size_t start = pos_;
    auto head = [](char c) {
      return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
    };
    auto tail = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' ||
             c == '-';
    };
    if (pos_ >= text_.size() || !head(text_[pos_])) {
      fail(pos_, 1, "expected an identifier");
    }
    ++pos_;
    while (pos_ < text_.size() && tail(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Atom parse_atom() {
    skip_ws();
    std::size_t start = pos_;
    if (peek() != 'n' || text_.substr(pos_).substr(0, 4) != "name") {
      fail(start, 1,
           "expected a positive atom of the form name(t, t, t); negation is "
           "not part of the query language");
    }
    pos_ += 4;
    expect('(', "'(' after the predicate name");
    Term a = parse_term();
    expect(',', "','");
    Term b = parse_term();
    expect(',', "','");
    Term c = parse_term();
    expect(')', "')'");
    return Atom{std::move(a), std::move(b), std::move(c)};
  }

  Term parse_term() {
    skip_ws();
    std::size_t start = pos_;
    char c = peek();
    if (c == '#') {
      ++pos_;
      return Term{key_constant(Key{read_ident()})};
    }
    if (c == '!') {
      ++pos_;
      return Term{global_constant(GlobalName{read_ident()})};
    }
    std::string id = read_ident();
    if (id == "self") return Term{self_constant()};
    if (std::isupper(static_cast<unsigned char>(id[0])) != 0) {
      return Term{Variable{std::move(id)}};
    }
    if (id[0] == '_') {
      fail(start, id.size(),
           "variables start with an uppercase letter; local name constants "
           "with a lowercase one");
    }
    return Term{local_constant(LocalName{std::move(id)})};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<Atom> parse_query(std::string_view text) {
  return QueryParser(text).parse();
}

KeySet resolve_via_datalog(const Key& k, const World& w, const ExprPtr& e) {
  World scoped = w;
  scoped.declare_key(k);
  scoped.declare_keys(keys_of(*e));
  FactSet model = minimal_model(world_to_program(scoped));
  Variable result{"Y"};
  std::vector<Atom> query =
      expr_to_query(e, Term{key_constant(k)}, Term{result});
  KeySet out;
  for (const Substitution& sub : answer_query(model, query)) {
    const Constant& c = sub.at(result);
    NAMES_CHECK(c.space == Constant::Space::Key,
                "resolution query bound its result to a non-key constant");
    out.insert(Key{c.id});
  }
  return out;
}

}  // namespace names
