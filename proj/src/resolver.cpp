// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/resolver.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "names/check.hpp"
#include "names/parser.hpp"
#include "names/semantics.hpp"

namespace names {

namespace {

using Cell = std::pair<Key, LocalName>;

// Memo table for the tabled top-down search. A cell holds the keys derived so
// far for (viewpoint, local name). "active" marks cells currently on the
// recursion stack; hitting one returns its current approximation instead of
// recursing, which cuts cycles. "settled" marks cells already recomputed in
// the current pass. Because an active or settled cell may still be an
// under-approximation, passes repeat until no cell grows.
struct Table {
  std::map<Cell, KeySet> values;
  std::set<Cell> active;
  std::set<Cell> settled;
  bool grew = false;
};

KeySet eval(const Key& k, const ExprPtr& e, const World& w, Table& tab) {
  switch (e->kind()) {
    case PrincipalExpr::Kind::Key:
      return {e->key_name()};
    case PrincipalExpr::Kind::Global:
      return w.global_binding(e->global_name());
    case PrincipalExpr::Kind::Self:
      return {k};
    case PrincipalExpr::Kind::Compound: {
      KeySet heads = eval(k, e->left(), w, tab);
      KeySet out;
      for (const Key& mid : heads) {
        KeySet part = eval(mid, e->right(), w, tab);
        out.insert(part.begin(), part.end());
      }
      return out;
    }
    case PrincipalExpr::Kind::Local: {
      Cell cell{k, e->local_name()};
      if (tab.active.count(cell) != 0 || tab.settled.count(cell) != 0) {
        return tab.values[cell];
      }
      tab.active.insert(cell);
      KeySet out;
      for (const FormulaPtr& c : w.certificates_of(k)) {
        auto binding = as_local_binding(*c);
        if (!binding || binding->first != e->local_name()) continue;
        KeySet part = eval(k, binding->second, w, tab);
        out.insert(part.begin(), part.end());
      }
      tab.active.erase(cell);
      tab.settled.insert(cell);
      KeySet& stored = tab.values[cell];
      NAMES_CHECK(std::includes(out.begin(), out.end(), stored.begin(),
                                stored.end()),
                  "a resolution table cell shrank between passes");
      if (out.size() != stored.size()) {
        stored = std::move(out);
        tab.grew = true;
      }
      return stored;
    }
  }
  NAMES_CHECK(false, "unhandled expression kind in resolution");
  return {};
}

}  // namespace

KeySet ref2_all(const Key& k, const World& w, const ExprPtr& e) {
  // Upper bound on useful passes: every pass but the last adds at least one
  // key to some cell, and both the reachable cells and the keys that can land
  // in them are drawn from the sets counted here.
  KeySet key_pool = w.declared_keys;
  key_pool.insert(k);
  collect_keys(*e, key_pool);
  std::set<LocalName> locals;
  collect_locals(*e, locals);
  for (const auto& [issuer, certs] : w.certificates) {
    (void)issuer;
    for (const FormulaPtr& c : certs) collect_locals(*c, locals);
  }
  const std::size_t cells =
      key_pool.size() * std::max<std::size_t>(locals.size(), 1);
  const std::size_t cap = cells * key_pool.size() + 2;

  Table tab;
  KeySet result;
  std::size_t passes = 0;
  do {
    tab.grew = false;
    tab.settled.clear();
    result = eval(k, e, w, tab);
    ++passes;
    NAMES_CHECK(passes <= cap, "resolution passes exceeded the growth bound");
  } while (tab.grew);
  return result;
}

namespace {

// The ascending chain of assignments the resolution fixpoint walks through,
// from the empty assignment up to and including the fixpoint itself.
std::vector<LocalNameAssignment> fixpoint_stages(const World& w) {
  std::vector<LocalNameAssignment> stages;
  LocalNameAssignment l;
  for (;;) {
    stages.push_back(l);
    LocalNameAssignment next = apply_step(w, l);
    if (next == l) break;
    l = std::move(next);
  }
  return stages;
}

std::optional<std::size_t> first_stage(
    const std::vector<LocalNameAssignment>& stages, const World& w,
    const Key& k, const ExprPtr& e, const Key& target) {
  for (std::size_t m = 0; m < stages.size(); ++m) {
    if (interpret(e, w, stages[m], k).count(target) != 0) return m;
  }
  return std::nullopt;
}

// Builds a derivation of target from (k2, e), given that target is in the
// denotation of e at stage m. Local names step back one stage through the
// first matching certificate in issue order; compounds stay at the same
// stage and pick the smallest intermediate key, recursing on strictly
// smaller expressions. The pair (stage, expression size) decreases on every
// recursive call, so this terminates.
ComputationTree trace_bounded(const Key& k2, const ExprPtr& e, const Key& k1,
                              std::size_t m,
                              const std::vector<LocalNameAssignment>& stages,
                              const World& w) {
  ComputationTree node;
  node.result = k1;
  node.viewpoint = k2;
  node.expr = e;
  switch (e->kind()) {
    case PrincipalExpr::Kind::Key:
      NAMES_CHECK(e->key_name() == k1, "key leaf does not name its result");
      node.rule = ComputationTree::Rule::KeyLeaf;
      return node;
    case PrincipalExpr::Kind::Global:
      NAMES_CHECK(w.global_binding(e->global_name()).count(k1) != 0,
                  "global leaf result is not bound to the global name");
      node.rule = ComputationTree::Rule::GlobalLeaf;
      return node;
    case PrincipalExpr::Kind::Self:
      NAMES_CHECK(k2 == k1, "self leaf result differs from the viewpoint");
      node.rule = ComputationTree::Rule::SelfLeaf;
      return node;
    case PrincipalExpr::Kind::Local: {
      NAMES_CHECK(m >= 1, "a local name derives nothing at stage zero");
      const LocalNameAssignment& prev = stages[m - 1];
      for (const FormulaPtr& c : w.certificates_of(k2)) {
        auto binding = as_local_binding(*c);
        if (!binding || binding->first != e->local_name()) continue;
        if (interpret(binding->second, w, prev, k2).count(k1) == 0) continue;
        node.rule = ComputationTree::Rule::CertStep;
        node.cert = c;
        node.children.push_back(
            trace_bounded(k2, binding->second, k1, m - 1, stages, w));
        return node;
      }
      NAMES_CHECK(false, "no certificate justifies the local name step");
      return node;
    }
    case PrincipalExpr::Kind::Compound: {
      const LocalNameAssignment& cur = stages[m];
      KeySet heads = interpret(e->left(), w, cur, k2);
      for (const Key& mid : heads) {
        if (interpret(e->right(), w, cur, mid).count(k1) == 0) continue;
        node.rule = ComputationTree::Rule::LinkStep;
        node.children.push_back(trace_bounded(k2, e->left(), mid, m, stages, w));
        node.children.push_back(trace_bounded(mid, e->right(), k1, m, stages, w));
        return node;
      }
      NAMES_CHECK(false, "no intermediate key justifies the link step");
      return node;
    }
  }
  NAMES_CHECK(false, "unhandled expression kind in trace construction");
  return node;
}

}  // namespace

std::optional<ComputationTree> ref2_trace(const Key& k, const World& w,
                                          const ExprPtr& e,
                                          const Key& target) {
  std::vector<LocalNameAssignment> stages = fixpoint_stages(w);
  std::optional<std::size_t> m = first_stage(stages, w, k, e, target);
  if (!m) return std::nullopt;
  return trace_bounded(k, e, target, *m, stages, w);
}

bool validate_tree(const ComputationTree& t, const World& w) {
  if (!t.expr) return false;
  switch (t.rule) {
    case ComputationTree::Rule::KeyLeaf:
      // A key denotes itself from every viewpoint, so no viewpoint condition.
      return t.expr->kind() == PrincipalExpr::Kind::Key &&
             t.expr->key_name() == t.result && t.children.empty() && !t.cert;
    case ComputationTree::Rule::GlobalLeaf:
      return t.expr->kind() == PrincipalExpr::Kind::Global &&
             w.global_binding(t.expr->global_name()).count(t.result) != 0 &&
             t.children.empty() && !t.cert;
    case ComputationTree::Rule::SelfLeaf:
      return t.expr->kind() == PrincipalExpr::Kind::Self &&
             t.result == t.viewpoint && t.children.empty() && !t.cert;
    case ComputationTree::Rule::CertStep: {
      if (t.expr->kind() != PrincipalExpr::Kind::Local ||
          t.children.size() != 1 || !t.cert) {
        return false;
      }
      if (!w.has_certificate(t.viewpoint, *t.cert)) return false;
      auto binding = as_local_binding(*t.cert);
      if (!binding || binding->first != t.expr->local_name()) return false;
      const ComputationTree& c = t.children[0];
      return c.result == t.result && c.viewpoint == t.viewpoint &&
             *c.expr == *binding->second && validate_tree(c, w);
    }
    case ComputationTree::Rule::LinkStep: {
      if (t.expr->kind() != PrincipalExpr::Kind::Compound ||
          t.children.size() != 2 || t.cert) {
        return false;
      }
      const ComputationTree& a = t.children[0];
      const ComputationTree& b = t.children[1];
      return a.viewpoint == t.viewpoint && *a.expr == *t.expr->left() &&
             b.viewpoint == a.result && *b.expr == *t.expr->right() &&
             b.result == t.result && validate_tree(a, w) &&
             validate_tree(b, w);
    }
  }
  return false;
}

namespace {

void render_node(const ComputationTree& t, std::size_t depth,
                 std::string& out) {
  out.append(2 * depth, ' ');
  out += "#" + t.result.id + " ∈ REF2(#" + t.viewpoint.id + ", " +
         render(t.expr) + ") ";
  switch (t.rule) {
    case ComputationTree::Rule::KeyLeaf:
      out += "[key]";
      break;
    case ComputationTree::Rule::GlobalLeaf:
      out += "[global]";
      break;
    case ComputationTree::Rule::SelfLeaf:
      out += "[self]";
      break;
    case ComputationTree::Rule::CertStep:
      out += t.cert ? "[cert: " + render(t.cert) + "]" : "[cert]";
      break;
    case ComputationTree::Rule::LinkStep:
      out += t.children.empty() ? "[link]"
                                : "[link via #" + t.children[0].result.id + "]";
      break;
  }
  out += "\n";
  for (const ComputationTree& c : t.children) render_node(c, depth + 1, out);
}

}  // namespace

std::string render_tree(const ComputationTree& t) {
  std::string out;
  render_node(t, 0, out);
  return out;
}

}  // namespace names
