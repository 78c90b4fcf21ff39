// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "names/core.hpp"

namespace names {

// Evidence that one key is a possible output of resolving an expression from
// a viewpoint. Each node is justified by exactly one rule:
//   KeyLeaf:    expr is a key; result is that key; no children.
//   GlobalLeaf: expr is a global name; result is one of its bound keys.
//   SelfLeaf:   expr is self; result is the viewpoint.
//   CertStep:   expr is a local name n; the viewpoint issued "n >= q"; the
//               single child derives result from q at the same viewpoint.
//   LinkStep:   expr is "q . r"; the first child derives an intermediate key
//               from q at the viewpoint, the second derives result from r at
//               that intermediate key.
struct ComputationTree {
  enum class Rule { KeyLeaf, GlobalLeaf, SelfLeaf, CertStep, LinkStep };

  Key result;
  Key viewpoint;
  ExprPtr expr;
  Rule rule = Rule::KeyLeaf;
  FormulaPtr cert;  // the certificate used; CertStep only
  std::vector<ComputationTree> children;
};

// Every key derivable from e at viewpoint k: the complete output set of the
// nondeterministic resolution procedure. Computed by tabled top-down search
// with memoization on (viewpoint, local name); cyclic certificate stores get
// the least-fixpoint reading (a cycle with no base case derives nothing).
KeySet ref2_all(const Key& k, const World& w, const ExprPtr& e);

// One well-formed derivation of target from (k, e), or nothing when none
// exists. Deterministic: certificates are tried in issue order and
// intermediate keys in sorted order, at the earliest fixpoint stage that
// derives the target.
std::optional<ComputationTree> ref2_trace(const Key& k, const World& w,
                                          const ExprPtr& e, const Key& target);

// Structural validity of a derivation against a world: every node satisfies
// its rule's side conditions and its children line up.
bool validate_tree(const ComputationTree& t, const World& w);

// Indented text form, one node per line:
//   result ∈ REF2(viewpoint, expr) [rule]
std::string render_tree(const ComputationTree& t);

}  // namespace names
