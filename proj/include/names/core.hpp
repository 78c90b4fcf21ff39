// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace names {

// Keys, global names, and local names live in disjoint lexical namespaces:
// keys are written "#id", globals "!id", locals are bare lowercase
// identifiers. The reserved word "self" is none of the three.
struct Key {
  std::string id;
  auto operator<=>(const Key&) const = default;
};

struct GlobalName {
  std::string id;
  auto operator<=>(const GlobalName&) const = default;
};

struct LocalName {
  std::string id;
  auto operator<=>(const LocalName&) const = default;
};

using KeySet = std::set<Key>;

// Raised for domain-level misuse that is not a syntax error: an unknown key
// where a declared one is required, a schema slot filled with the wrong sort,
// a finite universe that does not cover a formula's keys.
class SemanticError : public std::runtime_error {
 public:
  explicit SemanticError(const std::string& what) : std::runtime_error(what) {}
};

class PrincipalExpr;
using ExprPtr = std::shared_ptr<const PrincipalExpr>;

// A principal expression: a key, a global name, a local name, "self", or a
// linked compound "p . q" (read: q interpreted from the principals p denotes).
// Immutable; shared subtrees are fine.
class PrincipalExpr {
 public:
  enum class Kind { Key, Global, Local, Self, Compound };

  static ExprPtr key(Key k);
  static ExprPtr global(GlobalName g);
  static ExprPtr local(LocalName n);
  static ExprPtr self();
  static ExprPtr compound(ExprPtr left, ExprPtr right);

  Kind kind() const { return kind_; }
  const Key& key_name() const;
  const GlobalName& global_name() const;
  const LocalName& local_name() const;
  const ExprPtr& left() const;
  const ExprPtr& right() const;

 private:
  PrincipalExpr() = default;

  Kind kind_ = Kind::Self;
  Key key_{};
  GlobalName global_{};
  LocalName local_{};
  ExprPtr left_{};
  ExprPtr right_{};
};

// Total structural order; 0 means structurally equal.
int compare(const PrincipalExpr& a, const PrincipalExpr& b);
bool operator==(const PrincipalExpr& a, const PrincipalExpr& b);
inline bool operator!=(const PrincipalExpr& a, const PrincipalExpr& b) {
  return !(a == b);
}

// Comparator for containers keyed by expression structure.
struct ExprLess {
  bool operator()(const ExprPtr& a, const ExprPtr& b) const {
    return compare(*a, *b) < 0;
  }
};

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// A formula: containment between principal expressions, a certificate
// assertion by a key, negation, or conjunction. Disjunction, implication,
// biconditional, and the constant false are construction-time sugar; no node
// kinds exist for them.
class Formula {
 public:
  enum class Kind { Contains, Cert, Not, And };

  // "sup >= sub": every principal denoted by sub is denoted by sup.
  static FormulaPtr contains(ExprPtr sup, ExprPtr sub);
  // "issuer certs body": the issuer has issued exactly this formula.
  static FormulaPtr cert(Key issuer, FormulaPtr body);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conjunction(FormulaPtr a, FormulaPtr b);

  // Sugar, expanded immediately:
  //   or(a, b)      = !(!a & !b)
  //   implies(a, b) = !(a & !b)
  //   iff(a, b)     = implies(a, b) & implies(b, a)
  //   falsum()      = !(self >= self)
  static FormulaPtr disjunction(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implication(FormulaPtr a, FormulaPtr b);
  static FormulaPtr biconditional(FormulaPtr a, FormulaPtr b);
  static FormulaPtr falsum();

  Kind kind() const { return kind_; }
  const ExprPtr& sup() const;
  const ExprPtr& sub() const;
  const Key& issuer() const;
  const FormulaPtr& body() const;
  const FormulaPtr& child() const;
  const FormulaPtr& lhs() const;
  const FormulaPtr& rhs() const;

 private:
  Formula() = default;

  Kind kind_ = Kind::And;
  ExprPtr sup_{};
  ExprPtr sub_{};
  Key issuer_{};
  FormulaPtr a_{};
  FormulaPtr b_{};
};

int compare(const Formula& a, const Formula& b);
bool operator==(const Formula& a, const Formula& b);
inline bool operator!=(const Formula& a, const Formula& b) {
  return !(a == b);
}

struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return compare(*a, *b) < 0;
  }
};

// If f has the shape "n >= p" for a local name n, returns (n, p).
// Only certificates of this shape influence name resolution.
std::optional<std::pair<LocalName, ExprPtr>> as_local_binding(const Formula& f);

// A certificate store plus global-name bindings. declared_keys is the key
// universe of the world; it always covers every key occurring in the bindings
// and certificates (maintained by the mutators below).
struct World {
  KeySet declared_keys;
  std::map<GlobalName, KeySet> globals;
  std::map<Key, std::vector<FormulaPtr>> certificates;

  void declare_key(const Key& k);
  void declare_keys(const KeySet& ks);
  // Unions into any existing binding; declares the keys.
  void bind_global(const GlobalName& g, const KeySet& ks);
  // Set semantics: returns false (and changes nothing) on a duplicate.
  bool add_certificate(const Key& issuer, FormulaPtr body);

  const KeySet& global_binding(const GlobalName& g) const;
  const std::vector<FormulaPtr>& certificates_of(const Key& issuer) const;
  bool has_certificate(const Key& issuer, const Formula& body) const;
};

bool operator==(const World& a, const World& b);
inline bool operator!=(const World& a, const World& b) { return !(a == b); }

// True when "bigger" extends "smaller": at least the same declared keys,
// global bindings pointwise supersets, certificate sets pointwise supersets.
bool extends(const World& bigger, const World& smaller);

// Finite map (key, local name) -> key set, total by defaulting to the empty
// set. Empty values are never stored, so equality is canonical.
class LocalNameAssignment {
 public:
  using Entry = std::pair<Key, LocalName>;

  const KeySet& lookup(const Key& k, const LocalName& n) const;
  void assign(const Key& k, const LocalName& n, KeySet value);
  void add(const Key& k, const LocalName& n, const Key& member);
  bool below_or_equal(const LocalNameAssignment& other) const;
  bool empty() const { return bindings_.empty(); }
  const std::map<Entry, KeySet>& entries() const { return bindings_; }

  friend bool operator==(const LocalNameAssignment& a,
                         const LocalNameAssignment& b) {
    return a.bindings_ == b.bindings_;
  }

 private:
  std::map<Entry, KeySet> bindings_;
};

// The key universe a satisfiability search ranges over: either an explicit
// finite key set or unbounded (fresh keys materialized up to a sound bound).
struct KeyUniverse {
  enum class Mode { Finite, Unbounded };

  Mode mode = Mode::Unbounded;
  KeySet keys;

  static KeyUniverse finite(KeySet ks) {
    return KeyUniverse{Mode::Finite, std::move(ks)};
  }
  static KeyUniverse unbounded() { return KeyUniverse{Mode::Unbounded, {}}; }
};

// Generates "count" keys whose ids do not collide with "avoid"
// (ids _f0, _f1, ... with collisions skipped). Deterministic.
std::vector<Key> fresh_keys(const KeySet& avoid, std::size_t count);

// The denotation of e from viewpoint k: a key denotes itself, a global its
// world binding, a local name its assignment entry at k, self the viewpoint,
// and a compound "p . q" the union of q's denotations from each key p
// denotes. Pure; memoizes internally per call.
KeySet interpret(const ExprPtr& e, const World& w, const LocalNameAssignment& l,
                 const Key& k);

// Fully left-associated variant: a . (b . c) becomes (a . b) . c. Denotation
// is unchanged for every world, assignment, and viewpoint.
ExprPtr normalize_left(const ExprPtr& e);

// Symbol counts: every key, global, local, and self occurrence is one symbol;
// every containment, certificate, negation, and conjunction node is one
// symbol; the compound operator itself is not counted.
std::size_t symbol_count(const PrincipalExpr& e);
std::size_t symbol_count(const Formula& f);

void collect_keys(const PrincipalExpr& e, KeySet& out);
void collect_keys(const Formula& f, KeySet& out);
KeySet keys_of(const PrincipalExpr& e);
KeySet keys_of(const Formula& f);

void collect_locals(const PrincipalExpr& e, std::set<LocalName>& out);
void collect_locals(const Formula& f, std::set<LocalName>& out);
std::set<LocalName> locals_of(const Formula& f);

void collect_globals(const PrincipalExpr& e, std::set<GlobalName>& out);
void collect_globals(const Formula& f, std::set<GlobalName>& out);
std::set<GlobalName> globals_of(const Formula& f);

bool mentions_self(const PrincipalExpr& e);
bool mentions_self(const Formula& f);
bool mentions_local(const PrincipalExpr& e);

}  // namespace names
