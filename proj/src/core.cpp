// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/core.hpp"

#include <algorithm>
#include <cassert>

namespace names {

// ---------------------------------------------------------------------------
// PrincipalExpr

ExprPtr PrincipalExpr::key(Key k) {
  auto e = std::shared_ptr<PrincipalExpr>(new PrincipalExpr());
  e->kind_ = Kind::Key;
  e->key_ = std::move(k);
  return e;
}

ExprPtr PrincipalExpr::global(GlobalName g) {
  auto e = std::shared_ptr<PrincipalExpr>(new PrincipalExpr());
  e->kind_ = Kind::Global;
  e->global_ = std::move(g);
  return e;
}

ExprPtr PrincipalExpr::local(LocalName n) {
  auto e = std::shared_ptr<PrincipalExpr>(new PrincipalExpr());
  e->kind_ = Kind::Local;
  e->local_ = std::move(n);
  return e;
}

ExprPtr PrincipalExpr::self() {
  auto e = std::shared_ptr<PrincipalExpr>(new PrincipalExpr());
  e->kind_ = Kind::Self;
  return e;
}

ExprPtr PrincipalExpr::compound(ExprPtr left, ExprPtr right) {
  assert(left && right);
  auto e = std::shared_ptr<PrincipalExpr>(new PrincipalExpr());
  e->kind_ = Kind::Compound;
  e->left_ = std::move(left);
  e->right_ = std::move(right);
  return e;
}

const Key& PrincipalExpr::key_name() const {
  assert(kind_ == Kind::Key);
  return key_;
}

const GlobalName& PrincipalExpr::global_name() const {
  assert(kind_ == Kind::Global);
  return global_;
}

const LocalName& PrincipalExpr::local_name() const {
  assert(kind_ == Kind::Local);
  return local_;
}

const ExprPtr& PrincipalExpr::left() const {
  assert(kind_ == Kind::Compound);
  return left_;
}

const ExprPtr& PrincipalExpr::right() const {
  assert(kind_ == Kind::Compound);
  return right_;
}

int compare(const PrincipalExpr& a, const PrincipalExpr& b) {
  if (&a == &b) return 0;
  if (a.kind() != b.kind()) {
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  }
  switch (a.kind()) {
    case PrincipalExpr::Kind::Key:
      return a.key_name().id.compare(b.key_name().id);
    case PrincipalExpr::Kind::Global:
      return a.global_name().id.compare(b.global_name().id);
    case PrincipalExpr::Kind::Local:
      return a.local_name().id.compare(b.local_name().id);
    case PrincipalExpr::Kind::Self:
      return 0;
    case PrincipalExpr::Kind::Compound: {
      int c = compare(*a.left(), *b.left());
      if (c != 0) return c;
      return compare(*a.right(), *b.right());
    }
  }
  return 0;
}

bool operator==(const PrincipalExpr& a, const PrincipalExpr& b) {
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------------------
// Formula

FormulaPtr Formula::contains(ExprPtr sup, ExprPtr sub) {
  assert(sup && sub);
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Contains;
  f->sup_ = std::move(sup);
  f->sub_ = std::move(sub);
  return f;
}

FormulaPtr Formula::cert(Key issuer, FormulaPtr body) {
  assert(body);
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Cert;
  f->issuer_ = std::move(issuer);
  f->a_ = std::move(body);
  return f;
}

FormulaPtr Formula::negation(FormulaPtr g) {
  assert(g);
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::Not;
  f->a_ = std::move(g);
  return f;
}

FormulaPtr Formula::conjunction(FormulaPtr a, FormulaPtr b) {
  assert(a && b);
  auto f = std::shared_ptr<Formula>(new Formula());
  f->kind_ = Kind::And;
  f->a_ = std::move(a);
  f->b_ = std::move(b);
  return f;
}

FormulaPtr Formula::disjunction(FormulaPtr a, FormulaPtr b) {
  return negation(conjunction(negation(std::move(a)), negation(std::move(b))));
}

FormulaPtr Formula::implication(FormulaPtr a, FormulaPtr b) {
  return negation(conjunction(std::move(a), negation(std::move(b))));
}

FormulaPtr Formula::biconditional(FormulaPtr a, FormulaPtr b) {
  FormulaPtr forward = implication(a, b);
  return conjunction(std::move(forward),
                     implication(std::move(b), std::move(a)));
}

FormulaPtr Formula::falsum() {
  return negation(contains(PrincipalExpr::self(), PrincipalExpr::self()));
}

const ExprPtr& Formula::sup() const {
  assert(kind_ == Kind::Contains);
  return sup_;
}

const ExprPtr& Formula::sub() const {
  assert(kind_ == Kind::Contains);
  return sub_;
}

const Key& Formula::issuer() const {
  assert(kind_ == Kind::Cert);
  return issuer_;
}

const FormulaPtr& Formula::body() const {
  assert(kind_ == Kind::Cert);
  return a_;
}

const FormulaPtr& Formula::child() const {
  assert(kind_ == Kind::Not);
  return a_;
}

const FormulaPtr& Formula::lhs() const {
  assert(kind_ == Kind::And);
  return a_;
}

const FormulaPtr& Formula::rhs() const {
  assert(kind_ == Kind::And);
  return b_;
}

int compare(const Formula& a, const Formula& b) {
  if (&a == &b) return 0;
  if (a.kind() != b.kind()) {
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  }
  switch (a.kind()) {
    case Formula::Kind::Contains: {
      int c = compare(*a.sup(), *b.sup());
      if (c != 0) return c;
      return compare(*a.sub(), *b.sub());
    }
    case Formula::Kind::Cert: {
      int c = a.issuer().id.compare(b.issuer().id);
      if (c != 0) return c;
      return compare(*a.body(), *b.body());
    }
    case Formula::Kind::Not:
      return compare(*a.child(), *b.child());
    case Formula::Kind::And: {
      int c = compare(*a.lhs(), *b.lhs());
      if (c != 0) return c;
      return compare(*a.rhs(), *b.rhs());
    }
  }
  return 0;
}

bool operator==(const Formula& a, const Formula& b) {
  return compare(a, b) == 0;
}

std::optional<std::pair<LocalName, ExprPtr>> as_local_binding(
    const Formula& f) {
  if (f.kind() != Formula::Kind::Contains) return std::nullopt;
  if (f.sup()->kind() != PrincipalExpr::Kind::Local) return std::nullopt;
  return std::make_pair(f.sup()->local_name(), f.sub());
}

// ---------------------------------------------------------------------------
// World

void World::declare_key(const Key& k) { declared_keys.insert(k); }

void World::declare_keys(const KeySet& ks) {
  declared_keys.insert(ks.begin(), ks.end());
}

void World::bind_global(const GlobalName& g, const KeySet& ks) {
  declare_keys(ks);
  if (ks.empty()) return;
  globals[g].insert(ks.begin(), ks.end());
}

bool World::add_certificate(const Key& issuer, FormulaPtr body) {
  assert(body);
  declare_key(issuer);
  collect_keys(*body, declared_keys);
  auto& list = certificates[issuer];
  for (const auto& existing : list) {
    if (*existing == *body) return false;
  }
  list.push_back(std::move(body));
  return true;
}

const KeySet& World::global_binding(const GlobalName& g) const {
  static const KeySet kEmpty;
  auto it = globals.find(g);
  return it == globals.end() ? kEmpty : it->second;
}

const std::vector<FormulaPtr>& World::certificates_of(const Key& issuer) const {
  static const std::vector<FormulaPtr> kEmpty;
  auto it = certificates.find(issuer);
  return it == certificates.end() ? kEmpty : it->second;
}

bool World::has_certificate(const Key& issuer, const Formula& body) const {
  for (const auto& f : certificates_of(issuer)) {
    if (*f == body) return true;
  }
  return false;
}

namespace {

std::set<FormulaPtr, FormulaLess> as_formula_set(
    const std::vector<FormulaPtr>& v) {
  return {v.begin(), v.end()};
}

}  // namespace

bool operator==(const World& a, const World& b) {
  if (a.declared_keys != b.declared_keys) return false;
  if (a.globals != b.globals) return false;
  if (a.certificates.size() != b.certificates.size()) return false;
  for (const auto& [issuer, certs] : a.certificates) {
    auto it = b.certificates.find(issuer);
    if (it == b.certificates.end()) return false;
    auto sa = as_formula_set(certs);
    auto sb = as_formula_set(it->second);
    if (sa.size() != sb.size()) return false;
    auto ia = sa.begin();
    auto ib = sb.begin();
    for (; ia != sa.end(); ++ia, ++ib) {
      if (**ia != **ib) return false;
    }
  }
  return true;
}

bool extends(const World& bigger, const World& smaller) {
  if (!std::includes(bigger.declared_keys.begin(), bigger.declared_keys.end(),
                     smaller.declared_keys.begin(),
                     smaller.declared_keys.end())) {
    return false;
  }
  for (const auto& [g, ks] : smaller.globals) {
    const KeySet& bks = bigger.global_binding(g);
    if (!std::includes(bks.begin(), bks.end(), ks.begin(), ks.end())) {
      return false;
    }
  }
  for (const auto& [issuer, certs] : smaller.certificates) {
    for (const auto& f : certs) {
      if (!bigger.has_certificate(issuer, *f)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// LocalNameAssignment

const KeySet& LocalNameAssignment::lookup(const Key& k,
                                          const LocalName& n) const {
  static const KeySet kEmpty;
  auto it = bindings_.find({k, n});
  return it == bindings_.end() ? kEmpty : it->second;
}

void LocalNameAssignment::assign(const Key& k, const LocalName& n,
                                 KeySet value) {
  if (value.empty()) {
    bindings_.erase({k, n});
  } else {
    bindings_[{k, n}] = std::move(value);
  }
}

void LocalNameAssignment::add(const Key& k, const LocalName& n,
                              const Key& member) {
  bindings_[{k, n}].insert(member);
}

bool LocalNameAssignment::below_or_equal(
    const LocalNameAssignment& other) const {
  for (const auto& [entry, value] : bindings_) {
    const KeySet& ov = other.lookup(entry.first, entry.second);
    if (!std::includes(ov.begin(), ov.end(), value.begin(), value.end())) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Interpretation

std::vector<Key> fresh_keys(const KeySet& avoid, std::size_t count) {
  std::vector<Key> out;
  std::size_t i = 0;
  while (out.size() < count) {
    Key candidate{"_f" + std::to_string(i++)};
    if (!avoid.contains(candidate)) out.push_back(std::move(candidate));
  }
  return out;
}

namespace {

using Memo = std::map<std::pair<const PrincipalExpr*, Key>, KeySet>;

// Memoization on (node identity, viewpoint) keeps right-nested compounds
// polynomial: without it every key reached by the left side re-evaluates the
// whole right subtree.
const KeySet& interpret_memo(const ExprPtr& e, const World& w,
                             const LocalNameAssignment& l, const Key& k,
                             Memo& memo) {
  auto probe = memo.find({e.get(), k});
  if (probe != memo.end()) return probe->second;

  KeySet result;
  switch (e->kind()) {
    case PrincipalExpr::Kind::Key:
      result.insert(e->key_name());
      break;
    case PrincipalExpr::Kind::Global:
      result = w.global_binding(e->global_name());
      break;
    case PrincipalExpr::Kind::Local:
      result = l.lookup(k, e->local_name());
      break;
    case PrincipalExpr::Kind::Self:
      result.insert(k);
      break;
    case PrincipalExpr::Kind::Compound: {
      const KeySet& heads = interpret_memo(e->left(), w, l, k, memo);
      for (const Key& mid : heads) {
        const KeySet& tails = interpret_memo(e->right(), w, l, mid, memo);
        result.insert(tails.begin(), tails.end());
      }
      break;
    }
  }
  return memo.emplace(std::make_pair(e.get(), k), std::move(result))
      .first->second;
}

}  // namespace

KeySet interpret(const ExprPtr& e, const World& w, const LocalNameAssignment& l,
                 const Key& k) {
  Memo memo;
  return interpret_memo(e, w, l, k, memo);
}

namespace {

void collect_leaves(const ExprPtr& e, std::vector<ExprPtr>& out) {
  if (e->kind() == PrincipalExpr::Kind::Compound) {
    collect_leaves(e->left(), out);
    collect_leaves(e->right(), out);
  } else {
    out.push_back(e);
  }
}

}  // namespace

ExprPtr normalize_left(const ExprPtr& e) {
  if (e->kind() != PrincipalExpr::Kind::Compound) return e;
  std::vector<ExprPtr> leaves;
  collect_leaves(e, leaves);
  ExprPtr acc = leaves.front();
  for (std::size_t i = 1; i < leaves.size(); ++i) {
    acc = PrincipalExpr::compound(acc, leaves[i]);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Measures and collectors

std::size_t symbol_count(const PrincipalExpr& e) {
  switch (e.kind()) {
    case PrincipalExpr::Kind::Key:
    case PrincipalExpr::Kind::Global:
    case PrincipalExpr::Kind::Local:
    case PrincipalExpr::Kind::Self:
      return 1;
    case PrincipalExpr::Kind::Compound:
      return symbol_count(*e.left()) + symbol_count(*e.right());
  }
  return 0;
}

std::size_t symbol_count(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Contains:
      return 1 + symbol_count(*f.sup()) + symbol_count(*f.sub());
    case Formula::Kind::Cert:
      return 2 + symbol_count(*f.body());
    case Formula::Kind::Not:
      return 1 + symbol_count(*f.child());
    case Formula::Kind::And:
      return 1 + symbol_count(*f.lhs()) + symbol_count(*f.rhs());
  }
  return 0;
}

void collect_keys(const PrincipalExpr& e, KeySet& out) {
  switch (e.kind()) {
    case PrincipalExpr::Kind::Key:
      out.insert(e.key_name());
      break;
    case PrincipalExpr::Kind::Compound:
      collect_keys(*e.left(), out);
      collect_keys(*e.right(), out);
      break;
    default:
      break;
  }
}

void collect_keys(const Formula& f, KeySet& out) {
  switch (f.kind()) {
    case Formula::Kind::Contains:
      collect_keys(*f.sup(), out);
      collect_keys(*f.sub(), out);
      break;
    case Formula::Kind::Cert:
      out.insert(f.issuer());
      collect_keys(*f.body(), out);
      break;
    case Formula::Kind::Not:
      collect_keys(*f.child(), out);
      break;
    case Formula::Kind::And:
      collect_keys(*f.lhs(), out);
      collect_keys(*f.rhs(), out);
      break;
  }
}

KeySet keys_of(const PrincipalExpr& e) {
  KeySet out;
  collect_keys(e, out);
  return out;
}

KeySet keys_of(const Formula& f) {
  KeySet out;
  collect_keys(f, out);
  return out;
}

void collect_locals(const PrincipalExpr& e, std::set<LocalName>& out) {
  switch (e.kind()) {
    case PrincipalExpr::Kind::Local:
      out.insert(e.local_name());
      break;
    case PrincipalExpr::Kind::Compound:
      collect_locals(*e.left(), out);
      collect_locals(*e.right(), out);
      break;
    default:
      break;
  }
}

void collect_locals(const Formula& f, std::set<LocalName>& out) {
  switch (f.kind()) {
    case Formula::Kind::Contains:
      collect_locals(*f.sup(), out);
      collect_locals(*f.sub(), out);
      break;
    case Formula::Kind::Cert:
      collect_locals(*f.body(), out);
      break;
    case Formula::Kind::Not:
      collect_locals(*f.child(), out);
      break;
    case Formula::Kind::And:
      collect_locals(*f.lhs(), out);
      collect_locals(*f.rhs(), out);
      break;
  }
}

std::set<LocalName> locals_of(const Formula& f) {
  std::set<LocalName> out;
  collect_locals(f, out);
  return out;
}

void collect_globals(const PrincipalExpr& e, std::set<GlobalName>& out) {
  switch (e.kind()) {
    case PrincipalExpr::Kind::Global:
      out.insert(e.global_name());
      break;
    case PrincipalExpr::Kind::Compound:
      collect_globals(*e.left(), out);
      collect_globals(*e.right(), out);
      break;
    default:
      break;
  }
}

void collect_globals(const Formula& f, std::set<GlobalName>& out) {
  switch (f.kind()) {
    case Formula::Kind::Contains:
      collect_globals(*f.sup(), out);
      collect_globals(*f.sub(), out);
      break;
    case Formula::Kind::Cert:
      collect_globals(*f.body(), out);
      break;
    case Formula::Kind::Not:
      collect_globals(*f.child(), out);
      break;
    case Formula::Kind::And:
      collect_globals(*f.lhs(), out);
      collect_globals(*f.rhs(), out);
      break;
  }
}

std::set<GlobalName> globals_of(const Formula& f) {
  std::set<GlobalName> out;
  collect_globals(f, out);
  return out;
}

bool mentions_self(const PrincipalExpr& e) {
  switch (e.kind()) {
    case PrincipalExpr::Kind::Self:
      return true;
    case PrincipalExpr::Kind::Compound:
      return mentions_self(*e.left()) || mentions_self(*e.right());
    default:
      return false;
  }
}

bool mentions_self(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Contains:
      return mentions_self(*f.sup()) || mentions_self(*f.sub());
    case Formula::Kind::Cert:
      return mentions_self(*f.body());
    case Formula::Kind::Not:
      return mentions_self(*f.child());
    case Formula::Kind::And:
      return mentions_self(*f.lhs()) || mentions_self(*f.rhs());
  }
  return false;
}

bool mentions_local(const PrincipalExpr& e) {
  switch (e.kind()) {
    case PrincipalExpr::Kind::Local:
      return true;
    case PrincipalExpr::Kind::Compound:
      return mentions_local(*e.left()) || mentions_local(*e.right());
    default:
      return false;
  }
}

}  // namespace names
