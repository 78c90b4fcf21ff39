// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/axioms.hpp"

#include <algorithm>
#include <random>
#include <utility>

namespace names {

namespace {

// Slot access with sort checking; every accessor throws KindMismatchError
// with the schema and slot name when the binding is missing or ill-sorted.
struct Resolved {
  const Schema& schema;
  const SchemaBindings& b;

  [[noreturn]] void fail(const std::string& slot,
                         const std::string& need) const {
    throw KindMismatchError("schema " + schema.name + ": slot '" + slot +
                            "' needs " + need);
  }

  ExprPtr expr(const std::string& slot) const {
    auto it = b.exprs.find(slot);
    if (it == b.exprs.end() || !it->second) {
      fail(slot, "a principal expression");
    }
    return it->second;
  }

  ExprPtr global_or_key(const std::string& slot) const {
    ExprPtr e = expr(slot);
    if (e->kind() != PrincipalExpr::Kind::Global &&
        e->kind() != PrincipalExpr::Kind::Key) {
      fail(slot, "a global name or a key");
    }
    return e;
  }

  ExprPtr key(const std::string& slot) const {
    auto it = b.keys.find(slot);
    if (it == b.keys.end()) fail(slot, "a key");
    return PrincipalExpr::key(it->second);
  }

  Key key_name(const std::string& slot) const {
    auto it = b.keys.find(slot);
    if (it == b.keys.end()) fail(slot, "a key");
    return it->second;
  }

  ExprPtr local(const std::string& slot) const {
    auto it = b.locals.find(slot);
    if (it == b.locals.end()) fail(slot, "a local name");
    return PrincipalExpr::local(it->second);
  }

  const KeySet& universe() const {
    if (b.universe.empty()) fail("K", "a nonempty key universe");
    return b.universe;
  }

  std::pair<LocalName, Key> row(const Key& k) const {
    auto it = b.rows.find(k);
    if (it == b.rows.end()) {
      fail("rows", "a (local name, key) pair for universe key #" + k.id);
    }
    return it->second;
  }
};

ExprPtr dot(const ExprPtr& a, const ExprPtr& b) {
  return PrincipalExpr::compound(a, b);
}

FormulaPtr fold_or(std::vector<FormulaPtr> arms) {
  FormulaPtr out = arms.front();
  for (std::size_t i = 1; i < arms.size(); ++i) {
    out = Formula::disjunction(out, arms[i]);
  }
  return out;
}

std::vector<Schema> make_registry() {
  using F = Formula;
  std::vector<Schema> reg;

  reg.push_back(Schema{
      "Reflexivity",
      "p >= p",
      {{"p", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p");
        return F::contains(p, p);
      }});

  reg.push_back(Schema{
      "Transitivity",
      "(p >= q) => ((q >= r) => (p >= r))",
      {{"p", SlotKind::Expr}, {"q", SlotKind::Expr}, {"r", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q"), e = r.expr("r");
        return F::implication(
            F::contains(p, q),
            F::implication(F::contains(q, e), F::contains(p, e)));
      }});

  reg.push_back(Schema{
      "LeftMonotonicity",
      "(p >= q) => ((p . r) >= (q . r))",
      {{"p", SlotKind::Expr}, {"q", SlotKind::Expr}, {"r", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q"), e = r.expr("r");
        return F::implication(F::contains(p, q),
                              F::contains(dot(p, e), dot(q, e)));
      }});

  reg.push_back(Schema{
      "Associativity1",
      "((p . q) . r) >= (p . (q . r))",
      {{"p", SlotKind::Expr}, {"q", SlotKind::Expr}, {"r", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q"), e = r.expr("r");
        return F::contains(dot(dot(p, q), e), dot(p, dot(q, e)));
      }});

  reg.push_back(Schema{
      "Associativity2",
      "(p . (q . r)) >= ((p . q) . r)",
      {{"p", SlotKind::Expr}, {"q", SlotKind::Expr}, {"r", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q"), e = r.expr("r");
        return F::contains(dot(p, dot(q, e)), dot(dot(p, q), e));
      }});

  reg.push_back(Schema{
      "KeyGlobality",
      "(k . g) >= g   [k a key, g a global name or a key]",
      {{"k", SlotKind::Key}, {"g", SlotKind::GlobalOrKey}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr k = r.key("k"), g = r.global_or_key("g");
        return F::contains(dot(k, g), g);
      }});

  reg.push_back(Schema{
      "Globality",
      "((p . k) >= k) => ((p . g) >= g)   [k a key, g a global name or a key]",
      {{"p", SlotKind::Expr}, {"k", SlotKind::Key}, {"g", SlotKind::GlobalOrKey}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), k = r.key("k"), g = r.global_or_key("g");
        return F::implication(F::contains(dot(p, k), k),
                              F::contains(dot(p, g), g));
      }});

  reg.push_back(Schema{
      "ConverseGlobality",
      "g >= (p . g)   [g a global name or a key]",
      {{"g", SlotKind::GlobalOrKey}, {"p", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr g = r.global_or_key("g"), p = r.expr("p");
        return F::contains(g, dot(p, g));
      }});

  reg.push_back(Schema{
      "KeyLinking",
      "(#k certs (n >= r)) => ((#k . n) >= (#k . r))   [k a key, n a local "
      "name]",
      {{"k", SlotKind::Key}, {"n", SlotKind::Local}, {"r", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        Key k = r.key_name("k");
        ExprPtr ke = PrincipalExpr::key(k);
        ExprPtr n = r.local("n");
        ExprPtr body = r.expr("r");
        return F::implication(F::cert(k, F::contains(n, body)),
                              F::contains(dot(ke, n), dot(ke, body)));
      }});

  reg.push_back(Schema{
      "NonemptinessA",
      "(p >= k1) => ((p . k) >= k)   [k, k1 keys]",
      {{"p", SlotKind::Expr}, {"k1", SlotKind::Key}, {"k", SlotKind::Key}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), k1 = r.key("k1"), k = r.key("k");
        return F::implication(F::contains(p, k1),
                              F::contains(dot(p, k), k));
      }});

  reg.push_back(Schema{
      "NonemptinessB",
      "!(p >= q) => ((q . k) >= k)   [k a key]",
      {{"p", SlotKind::Expr}, {"q", SlotKind::Expr}, {"k", SlotKind::Key}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q"), k = r.key("k");
        return F::implication(F::negation(F::contains(p, q)),
                              F::contains(dot(q, k), k));
      }});

  reg.push_back(Schema{
      "NonemptinessC",
      "((p . q) >= k1) => ((p . k) >= k)   [k, k1 keys]",
      {{"p", SlotKind::Expr},
       {"q", SlotKind::Expr},
       {"k1", SlotKind::Key},
       {"k", SlotKind::Key}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q");
        ExprPtr k1 = r.key("k1"), k = r.key("k");
        return F::implication(F::contains(dot(p, q), k1),
                              F::contains(dot(p, k), k));
      }});

  reg.push_back(Schema{
      "NonemptinessD",
      "(((p . k) >= k) & (k1 >= p)) => (p >= k1)   [k, k1 keys]",
      {{"p", SlotKind::Expr}, {"k", SlotKind::Key}, {"k1", SlotKind::Key}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), k = r.key("k"), k1 = r.key("k1");
        return F::implication(
            F::conjunction(F::contains(dot(p, k), k), F::contains(k1, p)),
            F::contains(p, k1));
      }});

  reg.push_back(Schema{
      "KeyDistinctness",
      "!(k1 >= k2)   [k1, k2 distinct keys]",
      {{"k1", SlotKind::Key}, {"k2", SlotKind::Key}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        Key k1 = r.key_name("k1"), k2 = r.key_name("k2");
        if (k1 == k2) {
          throw KindMismatchError(
              "schema KeyDistinctness: slots 'k1' and 'k2' need two "
              "distinct keys");
        }
        return F::negation(
            F::contains(PrincipalExpr::key(k1), PrincipalExpr::key(k2)));
      }});

  reg.push_back(Schema{
      "Witnesses1",
      "!(p >= q) => OR over k in K of (!(p >= k) & (q >= k))",
      {{"p", SlotKind::Expr}, {"q", SlotKind::Expr}, {"K", SlotKind::Universe}},
      true,
      true,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q");
        std::vector<FormulaPtr> arms;
        for (const Key& k : r.universe()) {
          ExprPtr ke = PrincipalExpr::key(k);
          arms.push_back(F::conjunction(F::negation(F::contains(p, ke)),
                                        F::contains(q, ke)));
        }
        return F::implication(F::negation(F::contains(p, q)),
                              fold_or(std::move(arms)));
      }});

  reg.push_back(Schema{
      "Witnesses2",
      "((p . q) >= k1) => OR over k in K of ((p >= k) & ((k . q) >= k1))",
      {{"p", SlotKind::Expr},
       {"q", SlotKind::Expr},
       {"k1", SlotKind::Key},
       {"K", SlotKind::Universe}},
      true,
      true,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), q = r.expr("q"), k1 = r.key("k1");
        std::vector<FormulaPtr> arms;
        for (const Key& k : r.universe()) {
          ExprPtr ke = PrincipalExpr::key(k);
          arms.push_back(F::conjunction(F::contains(p, ke),
                                        F::contains(dot(ke, q), k1)));
        }
        return F::implication(F::contains(dot(p, q), k1),
                              fold_or(std::move(arms)));
      }});

  reg.push_back(Schema{
      "CurrentPrincipal",
      "OR over k in K of ((n_k >= l_k) <=> ((k . n_k) >= l_k))   [one local "
      "name n_k and key l_k per universe key]",
      {{"K", SlotKind::Universe}, {"rows", SlotKind::PerKeyRows}},
      true,
      true,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        std::vector<FormulaPtr> arms;
        for (const Key& k : r.universe()) {
          auto [n, l] = r.row(k);
          ExprPtr ne = PrincipalExpr::local(n);
          ExprPtr le = PrincipalExpr::key(l);
          arms.push_back(F::biconditional(
              F::contains(ne, le),
              F::contains(dot(PrincipalExpr::key(k), ne), le)));
        }
        return fold_or(std::move(arms));
      }});

  reg.push_back(Schema{
      "Identity1",
      "(self . p) >= p",
      {{"p", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p");
        return F::contains(dot(PrincipalExpr::self(), p), p);
      }});

  reg.push_back(Schema{
      "Identity2",
      "p >= (self . p)",
      {{"p", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p");
        return F::contains(p, dot(PrincipalExpr::self(), p));
      }});

  reg.push_back(Schema{
      "Identity3",
      "(p . self) >= p",
      {{"p", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p");
        return F::contains(dot(p, PrincipalExpr::self()), p);
      }});

  reg.push_back(Schema{
      "Identity4",
      "p >= (p . self)",
      {{"p", SlotKind::Expr}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p");
        return F::contains(p, dot(p, PrincipalExpr::self()));
      }});

  reg.push_back(Schema{
      "SelfIsKey",
      "((self >= p) & ((p . k) >= k)) => (p >= self)   [k a key]",
      {{"p", SlotKind::Expr}, {"k", SlotKind::Key}},
      true,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), k = r.key("k");
        ExprPtr self = PrincipalExpr::self();
        return F::implication(
            F::conjunction(F::contains(self, p), F::contains(dot(p, k), k)),
            F::contains(p, self));
      }});

  // Registered non-axioms: plausible-looking generalizations that admit
  // countermodels, kept for demonstrations and negative tests.
  reg.push_back(Schema{
      "GeneralizedLinking",
      "(#k certs (p1 >= p2)) => ((#k . p1) >= (#k . p2))   [not an axiom: "
      "fails when p1 is not a local name]",
      {{"k", SlotKind::Key}, {"p1", SlotKind::Expr}, {"p2", SlotKind::Expr}},
      false,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        Key k = r.key_name("k");
        ExprPtr ke = PrincipalExpr::key(k);
        ExprPtr p1 = r.expr("p1"), p2 = r.expr("p2");
        return F::implication(F::cert(k, F::contains(p1, p2)),
                              F::contains(dot(ke, p1), dot(ke, p2)));
      }});

  reg.push_back(Schema{
      "UnrestrictedGlobality",
      "(p . g) >= g   [not an axiom: fails when p is not a key]",
      {{"p", SlotKind::Expr}, {"g", SlotKind::GlobalOrKey}},
      false,
      false,
      [](const Schema& s, const SchemaBindings& b) {
        Resolved r{s, b};
        ExprPtr p = r.expr("p"), g = r.global_or_key("g");
        return F::contains(dot(p, g), g);
      }});

  return reg;
}

}  // namespace

const std::vector<Schema>& schema_registry() {
  static const std::vector<Schema> registry = make_registry();
  return registry;
}

const Schema& schema_by_name(const std::string& name) {
  for (const Schema& s : schema_registry()) {
    if (s.name == name) return s;
  }
  throw SemanticError("unknown schema: " + name);
}

FormulaPtr instantiate(const Schema& s, const SchemaBindings& b) {
  return s.build(s, b);
}

FormulaPtr random_instance(const Schema& s, const InstancePool& pool,
                           std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  // Modulo draws keep the sequence reproducible across standard libraries;
  // uniformity is unimportant here.
  auto draw = [&eng](std::size_t size) {
    return static_cast<std::size_t>(eng() % size);
  };

  SchemaBindings b;
  std::vector<Key> distinct_keys(pool.keys.begin(), pool.keys.end());
  std::sort(distinct_keys.begin(), distinct_keys.end());
  distinct_keys.erase(std::unique(distinct_keys.begin(), distinct_keys.end()),
                      distinct_keys.end());

  if (s.name == "KeyDistinctness") {
    if (distinct_keys.size() < 2) {
      throw KindMismatchError(
          "schema KeyDistinctness: the pool needs two distinct keys");
    }
    std::size_t i = draw(distinct_keys.size());
    std::size_t j = draw(distinct_keys.size() - 1);
    if (j >= i) ++j;
    return instantiate(s, SchemaBindings{}
                              .with_key("k1", distinct_keys[i])
                              .with_key("k2", distinct_keys[j]));
  }

  for (const SchemaSlot& slot : s.slots) {
    switch (slot.kind) {
      case SlotKind::Expr: {
        if (pool.exprs.empty()) {
          throw KindMismatchError("schema " + s.name +
                                  ": the pool has no expressions");
        }
        b.with_expr(slot.name, pool.exprs[draw(pool.exprs.size())]);
        break;
      }
      case SlotKind::Key: {
        if (pool.keys.empty()) {
          throw KindMismatchError("schema " + s.name +
                                  ": the pool has no keys");
        }
        b.with_key(slot.name, pool.keys[draw(pool.keys.size())]);
        break;
      }
      case SlotKind::Local: {
        if (pool.locals.empty()) {
          throw KindMismatchError("schema " + s.name +
                                  ": the pool has no local names");
        }
        b.with_local(slot.name, pool.locals[draw(pool.locals.size())]);
        break;
      }
      case SlotKind::GlobalOrKey: {
        const std::size_t total = pool.globals.size() + pool.keys.size();
        if (total == 0) {
          throw KindMismatchError("schema " + s.name +
                                  ": the pool has no globals and no keys");
        }
        const std::size_t pick = draw(total);
        if (pick < pool.globals.size()) {
          b.with_expr(slot.name, PrincipalExpr::global(pool.globals[pick]));
        } else {
          b.with_expr(slot.name, PrincipalExpr::key(
                                     pool.keys[pick - pool.globals.size()]));
        }
        break;
      }
      case SlotKind::Universe: {
        if (pool.universe.empty()) {
          throw KindMismatchError("schema " + s.name +
                                  ": the pool has no key universe");
        }
        b.with_universe(pool.universe);
        break;
      }
      case SlotKind::PerKeyRows: {
        if (pool.universe.empty() || pool.locals.empty() ||
            pool.keys.empty()) {
          throw KindMismatchError(
              "schema " + s.name +
              ": per-key rows need a universe, local names, and keys");
        }
        for (const Key& k : pool.universe) {
          b.with_row(k, pool.locals[draw(pool.locals.size())],
                     pool.keys[draw(pool.keys.size())]);
        }
        break;
      }
    }
  }
  return instantiate(s, b);
}

}  // namespace names
