// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "names/core.hpp"

namespace names {

// The whole encoding uses a single ternary predicate:
//   name(x, p, y)   reads   "y is one of the keys p denotes from viewpoint x".
// Constants come from the four principal namespaces; a constant knows which
// namespace it belongs to, so a key #n, a global !n, and a local n never
// collide even when their ids match.
struct Constant {
  enum class Space { Key, Global, Local, Self };

  Space space = Space::Self;
  std::string id;  // empty for Self

  auto operator<=>(const Constant&) const = default;
};

Constant key_constant(const Key& k);
Constant global_constant(const GlobalName& g);
Constant local_constant(const LocalName& n);
Constant self_constant();

struct Variable {
  std::string name;  // uppercase first letter
  auto operator<=>(const Variable&) const = default;
};

using Term = std::variant<Constant, Variable>;

// name(principal, name, value), in that argument order.
struct Atom {
  Term principal;
  Term name;
  Term value;
};

// A definite clause; an empty body makes it a fact. Range restriction holds
// for every clause this module produces: head variables occur in the body.
struct HornClause {
  Atom head;
  std::vector<Atom> body;
};

// A ground atom. Orderable so fact sets and emitted text are deterministic.
struct Fact {
  Constant principal;
  Constant name;
  Constant value;

  auto operator<=>(const Fact&) const = default;
};

using FactSet = std::set<Fact>;
using Substitution = std::map<Variable, Constant>;

// Flattens e into a conjunctive query asserting "y is in the denotation of e
// from x": an atomic expression becomes the single atom name(x, e, y); a
// compound "q . r" chains through a fresh existential variable. Fresh
// variables are named Z1, Z2, ... in order of first appearance in the
// returned list, skipping any name x or y already uses.
std::vector<Atom> expr_to_query(const ExprPtr& e, const Term& x,
                                const Term& y);

// The clause set whose minimal model represents w. Over the universe
// U = w.declared_keys it contains: the identity fact name(k1, k2, k2) for
// every pair of universe keys (a key denotes itself from anywhere); the fact
// name(k1, g, k2) for every k1 in U and k2 bound to the global g; the fact
// name(k, self, k) for every universe key; and, for each certificate
// "n >= q" issued by k, the rule  name(k, n, Y) :- expr_to_query(q, k, Y).
// Certificates that are not local-name bindings contribute nothing.
//
// The universe is the world's declared keys rather than the space of all
// possible keys, so open queries such as name(X, !g, #k) enumerate declared
// keys only.
std::vector<HornClause> world_to_program(const World& w);

// Least fixpoint of the immediate-consequence operator, by semi-naive
// (delta-driven) evaluation. Terminates unconditionally: there are no
// function symbols, so the Herbrand base is finite.
FactSet minimal_model(const std::vector<HornClause>& prog);

// Every substitution of the query's variables that makes all atoms members
// of m. Atoms are joined smallest matching relation first.
std::set<Substitution> answer_query(const FactSet& m,
                                    const std::vector<Atom>& q);

// Textual Datalog, one clause per line: "name(a, b, c)." for facts,
// "head :- body1, body2." for rules. Facts print sorted; rules keep program
// order. A constant prints bare when its id starts with a lowercase letter,
// is not the word "self", and no other namespace in the program uses the
// same id; otherwise it prints single-quoted with its namespace prefix
// ('#K1', '!DNS', 'n'). The self constant always prints as "self".
std::string emit_program(const std::vector<HornClause>& prog);

// Parses a conjunctive query: comma-separated atoms "name(t, t, t)" with an
// optional trailing period. A term is a key "#id", a global "!id", the word
// "self", a lowercase identifier (local name constant), or an uppercase-led
// identifier (variable). Negation is not part of the query language and is
// rejected. Throws ParseError.
std::vector<Atom> parse_query(std::string_view text);

// The denotation of e from viewpoint k, answered through the clause
// encoding: build the program, compute its minimal model, run
// expr_to_query(e, k, Y), and collect the bindings of Y. The program is
// built over w with k and the keys of e declared, so the result matches the
// other resolution routes even when e mentions keys the world has not seen.
KeySet resolve_via_datalog(const Key& k, const World& w, const ExprPtr& e);

}  // namespace names
