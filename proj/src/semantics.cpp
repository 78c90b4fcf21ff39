// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/semantics.hpp"

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include "names/check.hpp"

namespace names {

namespace {

using ReadSet = std::set<std::pair<Key, LocalName>>;

// interpret() with instrumentation: records every (key, local name) cell the
// evaluation reads, so the fixpoint loop can skip certificates whose inputs
// did not change.
KeySet interpret_tracing(const ExprPtr& e, const World& w,
                         const LocalNameAssignment& l, const Key& k,
                         ReadSet& reads) {
  switch (e->kind()) {
    case PrincipalExpr::Kind::Key:
      return {e->key_name()};
    case PrincipalExpr::Kind::Global:
      return w.global_binding(e->global_name());
    case PrincipalExpr::Kind::Local:
      reads.insert({k, e->local_name()});
      return l.lookup(k, e->local_name());
    case PrincipalExpr::Kind::Self:
      return {k};
    case PrincipalExpr::Kind::Compound: {
      KeySet heads = interpret_tracing(e->left(), w, l, k, reads);
      KeySet out;
      for (const Key& mid : heads) {
        KeySet tails = interpret_tracing(e->right(), w, l, mid, reads);
        out.insert(tails.begin(), tails.end());
      }
      return out;
    }
  }
  return {};
}

struct BindingRule {
  Key issuer;
  LocalName target;
  ExprPtr expr;
  KeySet value;   // contribution under the assignment last evaluated against
  ReadSet reads;  // cells that evaluation consulted
};

std::vector<BindingRule> collect_binding_rules(const World& w) {
  std::vector<BindingRule> rules;
  for (const auto& [issuer, certs] : w.certificates) {
    for (const auto& body : certs) {
      if (auto binding = as_local_binding(*body)) {
        rules.push_back(
            BindingRule{issuer, binding->first, binding->second, {}, {}});
      }
    }
  }
  return rules;
}

LocalNameAssignment assignment_from_rules(
    const std::vector<BindingRule>& rules) {
  LocalNameAssignment out;
  for (const auto& r : rules) {
    for (const Key& k : r.value) out.add(r.issuer, r.target, k);
  }
  return out;
}

}  // namespace

LocalNameAssignment apply_step(const World& w, const LocalNameAssignment& l) {
  auto rules = collect_binding_rules(w);
  for (auto& r : rules) {
    r.value = interpret(r.expr, w, l, r.issuer);
  }
  return assignment_from_rules(rules);
}

LocalNameAssignment minimal_assignment(const World& w) {
  auto rules = collect_binding_rules(w);
  if (rules.empty()) return {};

  // The chain (empty, T(empty), T(T(empty)), ...) grows pointwise, and each
  // strict step adds at least one key to one cell, so the number of rounds is
  // bounded by the number of cells times the universe size.
  std::size_t growth_cap = 1;
  {
    std::set<LocalName> locals;
    for (const auto& r : rules) locals.insert(r.target);
    growth_cap += w.declared_keys.size() * locals.size() *
                  std::max<std::size_t>(w.declared_keys.size(), 1);
  }

  LocalNameAssignment current;
  ReadSet changed;  // cells that grew in the previous round
  bool first_round = true;
  std::size_t rounds = 0;

  while (true) {
    ++rounds;
    NAMES_CHECK(rounds <= growth_cap + 1, "fixpoint failed to converge");
    bool any_rule_grew = false;
    for (auto& r : rules) {
      bool stale =
          first_round ||
          std::any_of(r.reads.begin(), r.reads.end(),
                      [&](const auto& cell) { return changed.contains(cell); });
      if (!stale) continue;
      r.reads.clear();
      KeySet value = interpret_tracing(r.expr, w, current, r.issuer, r.reads);
      // Interpretation is monotone in the assignment, so re-evaluation can
      // only grow a rule's contribution.
      NAMES_CHECK(std::includes(value.begin(), value.end(), r.value.begin(),
                                r.value.end()),
                  "binding contribution shrank across rounds");
      if (value != r.value) {
        r.value = std::move(value);
        any_rule_grew = true;
      }
    }
    first_round = false;
    if (!any_rule_grew) break;

    LocalNameAssignment next = assignment_from_rules(rules);
    changed.clear();
    for (const auto& [cell, value] : next.entries()) {
      if (current.lookup(cell.first, cell.second) != value) {
        changed.insert(cell);
      }
    }
    if (changed.empty()) break;
    current = std::move(next);
  }
  return current;
}

bool is_consistent(const World& w, const LocalNameAssignment& l) {
  for (const auto& [issuer, certs] : w.certificates) {
    for (const auto& body : certs) {
      auto binding = as_local_binding(*body);
      if (!binding) continue;
      KeySet required = interpret(binding->second, w, l, issuer);
      const KeySet& have = l.lookup(issuer, binding->first);
      if (!std::includes(have.begin(), have.end(), required.begin(),
                         required.end())) {
        return false;
      }
    }
  }
  return true;
}

bool holds(const World& w, const LocalNameAssignment& l, const Key& k,
           const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Contains: {
      KeySet sup = interpret(f.sup(), w, l, k);
      KeySet sub = interpret(f.sub(), w, l, k);
      return std::includes(sup.begin(), sup.end(), sub.begin(), sub.end());
    }
    case Formula::Kind::Cert:
      return w.has_certificate(f.issuer(), *f.body());
    case Formula::Kind::Not:
      return !holds(w, l, k, *f.child());
    case Formula::Kind::And:
      return holds(w, l, k, *f.lhs()) && holds(w, l, k, *f.rhs());
  }
  return false;
}

OpenOutcome models_open(const World& w, const LocalNameAssignment& l,
                        const Key& k, const Formula& f) {
  if (!is_consistent(w, l)) return OpenOutcome::InconsistentAssignment;
  return holds(w, l, k, f) ? OpenOutcome::True : OpenOutcome::False;
}

bool models_closed(const World& w, const Key& k, const Formula& f) {
  return holds(w, minimal_assignment(w), k, f);
}

OpenOutcome models(const World& w, const SemanticsMode& mode, const Key& k,
                   const Formula& f) {
  if (mode.kind == SemanticsMode::Kind::Open) {
    return models_open(w, mode.assignment, k, f);
  }
  return models_closed(w, k, f) ? OpenOutcome::True : OpenOutcome::False;
}

}  // namespace names
