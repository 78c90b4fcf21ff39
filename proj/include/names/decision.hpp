// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "names/core.hpp"
#include "names/semantics.hpp"

namespace names {

// Raised when the satisfiability search exceeds its node budget. A distinct
// outcome from Unsatisfiable: the search was cut short, not exhausted.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(std::uint64_t budget);
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t budget_;
};

struct SearchLimits {
  // Counts candidate realizations (truth-pattern attempts and witness
  // choices). The worst case is exponential, so a hang is cut into a
  // reportable outcome instead.
  std::uint64_t node_budget = 10'000'000;
};

// Syntactic inventory of a formula, collected in one pass.
struct ClosureInfo {
  std::set<FormulaPtr, FormulaLess> subformulas;
  KeySet keys;
  std::set<LocalName> locals;
  std::set<GlobalName> globals;
  // Issuer -> bodies of its certificate subformulas that are local-name
  // bindings ("n >= p"). These are the certificates a satisfying world can
  // usefully contain for resolution purposes.
  std::map<Key, std::set<FormulaPtr, FormulaLess>> cert_candidates;
  std::size_t length = 0;  // symbol count
};

ClosureInfo closure(const FormulaPtr& f);

// A satisfying (or falsifying) triple: evaluate the formula at this world,
// assignment, and viewpoint.
struct Witness {
  World world;
  LocalNameAssignment assignment;
  Key viewpoint;
};

struct SatResult {
  std::optional<Witness> witness;  // empty means unsatisfiable
  bool is_satisfiable() const { return witness.has_value(); }
};

// Decides whether some triple (world, assignment, viewpoint) makes f true
// under the open semantics with a consistent assignment.
//
// The search space is finite. In Finite mode the key universe is exactly
// u.keys, which must cover the formula's keys. In Unbounded mode the
// universe is the formula's keys plus fresh keys up to a bound that is
// sufficient for completeness: the number of distinct principal expressions
// a model could be forced to distinguish (capped by twice the squared symbol
// count). Candidate worlds issue only certificates whose bodies are
// certificate subformulas of f; candidate assignments and global bindings
// range over the universe slice.
//
// The implementation enumerates truth patterns for the certificate and
// containment atoms outermost (certificates first), then viewpoints, then
// realizes each pattern by constraint propagation over membership cells with
// backtracking on existential witnesses. Interchangeable fresh keys are
// pruned by symmetry: a choice considers the keys already distinguished plus
// one representative fresh key. The outcome and the reported witness are
// deterministic: the first success in this fixed enumeration order.
//
// Throws SemanticError in Finite mode when u.keys misses a formula key;
// ResourceLimitError when the node budget runs out.
SatResult satisfiable(const FormulaPtr& f, const KeyUniverse& u,
                      const SearchLimits& limits = {});

struct ValidityResult {
  std::optional<Witness> countermodel;  // empty means valid
  bool is_valid() const { return !countermodel.has_value(); }
};

// f is valid when its negation is unsatisfiable; otherwise the negation's
// witness falsifies f. Errors as satisfiable.
ValidityResult valid_check(const FormulaPtr& f, const KeyUniverse& u,
                           const SearchLimits& limits = {});

}  // namespace names
