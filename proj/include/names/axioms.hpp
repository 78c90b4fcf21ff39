// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.
//
// A registry of named formula schemas: the containment axioms, the extra
// schemas that are sound only over a fixed finite key universe, the
// self-principal schemas, and two registered non-axioms kept around as
// countermodel demonstrations. Schemas are data so that callers can
// enumerate, instantiate, and property-test every one of them.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "names/core.hpp"

namespace names {

// A schema slot received a value of the wrong sort (or none at all), for
// example a compound expression where a schema needs a bare local name.
class KindMismatchError : public SemanticError {
 public:
  explicit KindMismatchError(const std::string& what) : SemanticError(what) {}
};

// What a schema slot accepts.
//  - Expr: any principal expression.
//  - Key: a key.
//  - Local: a local name.
//  - GlobalOrKey: an expression that is a global name or a key.
//  - Universe: the finite key set a finite-universe schema quantifies over.
//  - PerKeyRows: one (local name, key) pair per universe key.
enum class SlotKind : std::uint8_t {
  Expr,
  Key,
  Local,
  GlobalOrKey,
  Universe,
  PerKeyRows,
};

struct SchemaSlot {
  std::string name;
  SlotKind kind = SlotKind::Expr;
};

// Values for a schema's slots. GlobalOrKey slots are supplied through
// `exprs` and checked for the right expression kind at instantiation time.
struct SchemaBindings {
  std::map<std::string, ExprPtr> exprs;
  std::map<std::string, Key> keys;
  std::map<std::string, LocalName> locals;
  KeySet universe;
  std::map<Key, std::pair<LocalName, Key>> rows;

  SchemaBindings& with_expr(const std::string& slot, ExprPtr e) {
    exprs[slot] = std::move(e);
    return *this;
  }
  SchemaBindings& with_key(const std::string& slot, Key k) {
    keys[slot] = std::move(k);
    return *this;
  }
  SchemaBindings& with_local(const std::string& slot, LocalName n) {
    locals[slot] = std::move(n);
    return *this;
  }
  SchemaBindings& with_universe(KeySet u) {
    universe = std::move(u);
    return *this;
  }
  SchemaBindings& with_row(const Key& k, LocalName n, Key l) {
    rows[k] = {std::move(n), std::move(l)};
    return *this;
  }
};

struct Schema {
  std::string name;
  // Template text for listings, written in the language's surface syntax
  // with metavariables in slot positions.
  std::string display;
  std::vector<SchemaSlot> slots;
  // False for registered non-axioms kept for countermodel demonstrations.
  bool axiom = true;
  // True for schemas sound only when the key universe is exactly the
  // finite set they quantify over.
  bool finite_only = false;
  std::function<FormulaPtr(const Schema&, const SchemaBindings&)> build;
};

// All registered schemas, in a stable listing order.
const std::vector<Schema>& schema_registry();

// Looks a schema up by its registered name; throws SemanticError when the
// name is unknown.
const Schema& schema_by_name(const std::string& name);

// Substitutes the bindings into the schema template. Throws
// KindMismatchError when a slot is missing or has the wrong sort, including
// the distinctness requirement of the key-distinctness schema.
FormulaPtr instantiate(const Schema& s, const SchemaBindings& b);

// Source material for randomized instantiation.
struct InstancePool {
  std::vector<ExprPtr> exprs;
  std::vector<Key> keys;
  std::vector<GlobalName> globals;
  std::vector<LocalName> locals;
  KeySet universe;
};

// Draws a kind-correct instance of the schema from the pool, deterministic
// in the seed. Throws KindMismatchError when the pool lacks a sort the
// schema needs (for example fewer than two distinct keys for the
// key-distinctness schema).
FormulaPtr random_instance(const Schema& s, const InstancePool& pool,
                           std::uint64_t seed);

}  // namespace names
