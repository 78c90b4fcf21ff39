// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include "names/core.hpp"

namespace names {

// One step of the binding operator: for every certificate "n >= p" issued by
// k, the result maps (k, n) to the union of the denotations of the bound
// expressions under l; every other entry is empty. Certificates whose body is
// not a local-name binding contribute nothing.
LocalNameAssignment apply_step(const World& w, const LocalNameAssignment& l);

// Least fixpoint of apply_step, starting from the empty assignment. This is
// the assignment the closed semantics evaluates against.
LocalNameAssignment minimal_assignment(const World& w);

// True when l honors every issued binding: for each certificate "n >= p" of
// issuer k, interpret(p, w, l, k) is a subset of l(k, n). Equivalently,
// apply_step(w, l) is pointwise below l.
bool is_consistent(const World& w, const LocalNameAssignment& l);

// Truth of f at (w, l, k) with no consistency requirement. Containment
// compares denotations; a certificate atom holds iff its body is structurally
// among the issuer's certificates (no expression normalization is applied:
// "n >= a . (b . c)" and "n >= (a . b) . c" are different certificates).
bool holds(const World& w, const LocalNameAssignment& l, const Key& k,
           const Formula& f);

// Open-semantics outcome. An inconsistent assignment is reported as its own
// outcome so callers can tell "false" from "not an admissible model".
enum class OpenOutcome { True, False, InconsistentAssignment };

OpenOutcome models_open(const World& w, const LocalNameAssignment& l,
                        const Key& k, const Formula& f);

// Closed semantics: truth at the minimal assignment.
bool models_closed(const World& w, const Key& k, const Formula& f);

// Selects which semantics a model-checking call uses; Open carries the
// assignment to evaluate against.
struct SemanticsMode {
  enum class Kind { Open, Closed };

  Kind kind = Kind::Closed;
  LocalNameAssignment assignment;

  static SemanticsMode open(LocalNameAssignment l) {
    return SemanticsMode{Kind::Open, std::move(l)};
  }
  static SemanticsMode closed() { return SemanticsMode{}; }
};

// Closed mode never yields InconsistentAssignment.
OpenOutcome models(const World& w, const SemanticsMode& mode, const Key& k,
                   const Formula& f);

}  // namespace names
