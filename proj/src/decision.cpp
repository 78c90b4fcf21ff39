// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/decision.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "names/check.hpp"

namespace names {

ResourceLimitError::ResourceLimitError(std::uint64_t budget)
    : std::runtime_error("search budget of " + std::to_string(budget) +
                         " nodes exceeded"),
      budget_(budget) {}

namespace {

void collect_subformulas(const FormulaPtr& f,
                         std::set<FormulaPtr, FormulaLess>& out) {
  if (!out.insert(f).second) return;
  switch (f->kind()) {
    case Formula::Kind::Contains:
      return;
    case Formula::Kind::Cert:
      collect_subformulas(f->body(), out);
      return;
    case Formula::Kind::Not:
      collect_subformulas(f->child(), out);
      return;
    case Formula::Kind::And:
      collect_subformulas(f->lhs(), out);
      collect_subformulas(f->rhs(), out);
      return;
  }
}

// Atoms in evaluation position: certificate atoms are opaque (their bodies
// are compared structurally, never evaluated), so the walk does not descend
// into them when collecting containment atoms.
void collect_atoms(const FormulaPtr& f,
                   std::set<FormulaPtr, FormulaLess>& cert_atoms,
                   std::set<FormulaPtr, FormulaLess>& containment_atoms) {
  switch (f->kind()) {
    case Formula::Kind::Contains:
      containment_atoms.insert(f);
      return;
    case Formula::Kind::Cert:
      cert_atoms.insert(f);
      return;
    case Formula::Kind::Not:
      collect_atoms(f->child(), cert_atoms, containment_atoms);
      return;
    case Formula::Kind::And:
      collect_atoms(f->lhs(), cert_atoms, containment_atoms);
      collect_atoms(f->rhs(), cert_atoms, containment_atoms);
      return;
  }
}

using AtomIndex = std::map<FormulaPtr, std::size_t, FormulaLess>;

bool skeleton_true(const FormulaPtr& f, const AtomIndex& cert_idx,
                   const AtomIndex& cont_idx, std::uint64_t tau,
                   std::uint64_t sigma) {
  switch (f->kind()) {
    case Formula::Kind::Contains:
      return ((sigma >> cont_idx.at(f)) & 1) != 0;
    case Formula::Kind::Cert:
      return ((tau >> cert_idx.at(f)) & 1) != 0;
    case Formula::Kind::Not:
      return !skeleton_true(f->child(), cert_idx, cont_idx, tau, sigma);
    case Formula::Kind::And:
      return skeleton_true(f->lhs(), cert_idx, cont_idx, tau, sigma) &&
             skeleton_true(f->rhs(), cert_idx, cont_idx, tau, sigma);
  }
  NAMES_CHECK(false, "unhandled formula kind in skeleton evaluation");
  return false;
}

// How many distinct non-key principals a model of f could be forced to keep
// apart. A satisfying model never needs more fresh keys than that (plus one
// for the viewpoint): every key in it either names one of these expressions'
// denotation representatives or is indistinguishable from one that does.
// The set is closed under: containment sides and certificate-binding
// combinations ("k's n", "k's p"), subexpressions, full left association,
// pairing every member key with every member local name, self, and "self's
// n" for member local names.
std::size_t distinguishable_nonkey_count(const FormulaPtr& f) {
  std::set<ExprPtr, ExprLess> members;
  std::vector<ExprPtr> work;
  std::vector<ExprPtr> key_members;
  std::vector<ExprPtr> local_members;
  auto add = [&members, &work](const ExprPtr& e) {
    if (members.insert(e).second) work.push_back(e);
  };

  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    switch (g->kind()) {
      case Formula::Kind::Contains:
        add(g->sup());
        add(g->sub());
        return;
      case Formula::Kind::Cert: {
        if (auto binding = as_local_binding(*g->body())) {
          ExprPtr issuer = PrincipalExpr::key(g->issuer());
          add(PrincipalExpr::compound(issuer,
                                      PrincipalExpr::local(binding->first)));
          add(PrincipalExpr::compound(issuer, binding->second));
        }
        walk(g->body());
        return;
      }
      case Formula::Kind::Not:
        walk(g->child());
        return;
      case Formula::Kind::And:
        walk(g->lhs());
        walk(g->rhs());
        return;
    }
  };
  walk(f);
  add(PrincipalExpr::self());

  while (!work.empty()) {
    ExprPtr e = work.back();
    work.pop_back();
    add(normalize_left(e));
    switch (e->kind()) {
      case PrincipalExpr::Kind::Compound:
        add(e->left());
        add(e->right());
        break;
      case PrincipalExpr::Kind::Key:
        key_members.push_back(e);
        for (const ExprPtr& n : local_members) {
          add(PrincipalExpr::compound(e, n));
        }
        break;
      case PrincipalExpr::Kind::Local:
        local_members.push_back(e);
        add(PrincipalExpr::compound(PrincipalExpr::self(), e));
        for (const ExprPtr& k : key_members) {
          add(PrincipalExpr::compound(k, e));
        }
        break;
      default:
        break;
    }
  }

  std::size_t nonkeys = 0;
  for (const ExprPtr& e : members) {
    if (e->kind() != PrincipalExpr::Kind::Key) ++nonkeys;
  }
  return nonkeys;
}

// The expressions whose membership cells the realization tracks: both sides
// of every containment atom, every certificate-binding body and its bound
// local name, and all subexpressions of those.
std::vector<ExprPtr> build_expr_universe(
    const std::vector<FormulaPtr>& containment_atoms,
    const std::vector<FormulaPtr>& cert_atoms) {
  std::set<ExprPtr, ExprLess> eset;
  std::vector<ExprPtr> work;
  auto add = [&eset, &work](const ExprPtr& e) {
    if (eset.insert(e).second) work.push_back(e);
  };
  for (const FormulaPtr& a : containment_atoms) {
    add(a->sup());
    add(a->sub());
  }
  for (const FormulaPtr& c : cert_atoms) {
    if (auto binding = as_local_binding(*c->body())) {
      add(binding->second);
      add(PrincipalExpr::local(binding->first));
    }
  }
  while (!work.empty()) {
    ExprPtr e = work.back();
    work.pop_back();
    if (e->kind() == PrincipalExpr::Kind::Compound) {
      add(e->left());
      add(e->right());
    }
  }
  return std::vector<ExprPtr>(eset.begin(), eset.end());
}

enum class CellVal : std::uint8_t { Unknown, True, False };

// Realizes one truth pattern by propagation over membership cells
// cell(e, j, x) = "key x is in the denotation of e from viewpoint j",
// three-valued. Key and self cells are computed, global cells ignore the
// viewpoint, local and compound cells are stored per (viewpoint, key).
// Subset links propagate truth forward and falsity backward; compound cells
// are tied to their children in both directions; existential requirements
// (a compound that must be inhabited, a containment that must fail) are
// obligations resolved by backtracking choices over candidate keys.
// Interchangeable fresh keys are pruned: a choice considers distinguished
// keys plus one representative not yet distinguished.
class Solver {
 public:
  struct Marks {
    std::size_t trail;
    std::size_t obligations;
    std::size_t links;
    std::size_t dist;
  };

  Solver(std::vector<ExprPtr> exprs, std::vector<Key> keys,
         const KeySet& initially_distinguished, std::uint64_t budget)
      : exprs_(std::move(exprs)), keys_(std::move(keys)), budget_(budget) {
    const std::size_t n = exprs_.size();
    const std::size_t kcount = keys_.size();
    for (std::size_t i = 0; i < n; ++i) expr_index_[exprs_[i]] = i;
    for (std::size_t i = 0; i < kcount; ++i) key_index_[keys_[i]] = i;

    storage_.resize(n);
    kind_.resize(n);
    left_.assign(n, 0);
    right_.assign(n, 0);
    key_of_.assign(n, 0);
    parents_left_.resize(n);
    parents_right_.resize(n);
    cells_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const PrincipalExpr& e = *exprs_[i];
      kind_[i] = e.kind();
      switch (e.kind()) {
        case PrincipalExpr::Kind::Key: {
          storage_[i] = Storage::None;
          auto it = key_index_.find(e.key_name());
          NAMES_CHECK(it != key_index_.end(),
                      "expression key missing from the universe slice");
          key_of_[i] = static_cast<std::uint32_t>(it->second);
          break;
        }
        case PrincipalExpr::Kind::Self:
          storage_[i] = Storage::None;
          break;
        case PrincipalExpr::Kind::Global:
          storage_[i] = Storage::PerX;
          cells_[i].assign(kcount, CellVal::Unknown);
          break;
        case PrincipalExpr::Kind::Local:
          storage_[i] = Storage::PerJX;
          cells_[i].assign(kcount * kcount, CellVal::Unknown);
          break;
        case PrincipalExpr::Kind::Compound: {
          storage_[i] = Storage::PerJX;
          cells_[i].assign(kcount * kcount, CellVal::Unknown);
          left_[i] = static_cast<std::uint32_t>(expr_index_.at(e.left()));
          right_[i] = static_cast<std::uint32_t>(expr_index_.at(e.right()));
          parents_left_[left_[i]].push_back(static_cast<std::uint32_t>(i));
          parents_right_[right_[i]].push_back(static_cast<std::uint32_t>(i));
          break;
        }
      }
    }

    distinguished_.assign(kcount, 0);
    for (const Key& k : initially_distinguished) {
      auto it = key_index_.find(k);
      NAMES_CHECK(it != key_index_.end(),
                  "formula key missing from the universe slice");
      distinguished_[it->second] = 1;
    }

    // Compounds of two computed children have forced members; everything
    // else cascades from these seeds through the usual rules.
    for (std::size_t i = 0; i < n; ++i) {
      if (kind_[i] != PrincipalExpr::Kind::Compound) continue;
      if (storage_[left_[i]] != Storage::None ||
          storage_[right_[i]] != Storage::None) {
        continue;
      }
      for (std::uint32_t j = 0; j < kcount; ++j) {
        const std::uint32_t y =
            kind_[left_[i]] == PrincipalExpr::Kind::Key ? key_of_[left_[i]] : j;
        const std::uint32_t x = kind_[right_[i]] == PrincipalExpr::Kind::Key
                                    ? key_of_[right_[i]]
                                    : y;
        enqueue(static_cast<std::uint32_t>(i), j, x, CellVal::True, false);
      }
    }
    NAMES_CHECK(drain(), "constant compound seeding cannot conflict");
  }

  std::size_t expr_index(const ExprPtr& e) const { return expr_index_.at(e); }
  std::size_t key_index(const Key& k) const { return key_index_.at(k); }
  const std::vector<ExprPtr>& exprs() const { return exprs_; }
  const std::vector<Key>& keys() const { return keys_; }

  void count_node() {
    if (++nodes_ > budget_) throw ResourceLimitError(budget_);
  }

  Marks marks() const {
    return Marks{trail_.size(), obligations_.size(), links_.size(),
                 dist_trail_.size()};
  }

  void rollback(const Marks& m) {
    while (trail_.size() > m.trail) {
      auto [e, slot] = trail_.back();
      trail_.pop_back();
      cells_[e][slot] = CellVal::Unknown;
    }
    obligations_.resize(m.obligations);
    links_.resize(m.links);
    while (dist_trail_.size() > m.dist) {
      distinguished_[dist_trail_.back()] = 0;
      dist_trail_.pop_back();
    }
  }

  void mark_distinguished(std::size_t key_idx) {
    if (distinguished_[key_idx] == 0) {
      distinguished_[key_idx] = 1;
      dist_trail_.push_back(static_cast<std::uint32_t>(key_idx));
    }
  }

  // "Everything in lhs is in rhs", both read from viewpoint j. Sweeps the
  // current cells so the link also applies to facts established earlier.
  void add_link(std::size_t lhs, std::size_t rhs, std::size_t j) {
    links_.push_back(Link{static_cast<std::uint32_t>(lhs),
                          static_cast<std::uint32_t>(rhs),
                          static_cast<std::uint32_t>(j)});
    const std::uint32_t jj = static_cast<std::uint32_t>(j);
    for (std::uint32_t x = 0; x < keys_.size(); ++x) {
      if (value_of(lhs, jj, x) == CellVal::True) {
        enqueue(static_cast<std::uint32_t>(rhs), jj, x, CellVal::True, true);
      }
      if (value_of(rhs, jj, x) == CellVal::False) {
        enqueue(static_cast<std::uint32_t>(lhs), jj, x, CellVal::False, false);
      }
    }
  }

  void require_noncontainment(std::size_t sub, std::size_t sup,
                              std::size_t j) {
    obligations_.push_back(Obligation{
        Obligation::Kind::NonContainment, static_cast<std::uint32_t>(sub),
        static_cast<std::uint32_t>(sup), static_cast<std::uint32_t>(j), 0});
  }

  CellVal value_of(std::size_t e, std::uint32_t j, std::uint32_t x) const {
    switch (storage_[e]) {
      case Storage::None:
        if (kind_[e] == PrincipalExpr::Kind::Key) {
          return key_of_[e] == x ? CellVal::True : CellVal::False;
        }
        return j == x ? CellVal::True : CellVal::False;
      case Storage::PerX:
        return cells_[e][x];
      case Storage::PerJX:
        return cells_[e][static_cast<std::size_t>(j) * keys_.size() + x];
    }
    return CellVal::Unknown;
  }

  bool drain() {
    while (qhead_ < queue_.size()) {
      const Pending p = queue_[qhead_++];
      const CellVal cur = value_of(p.e, p.j, p.x);
      if (cur == p.v) continue;
      if (cur != CellVal::Unknown) {
        queue_.clear();
        qhead_ = 0;
        return false;
      }
      const std::size_t slot =
          storage_[p.e] == Storage::PerX
              ? p.x
              : static_cast<std::size_t>(p.j) * keys_.size() + p.x;
      cells_[p.e][slot] = p.v;
      trail_.emplace_back(p.e, static_cast<std::uint32_t>(slot));
      fire(p);
    }
    queue_.clear();
    qhead_ = 0;
    return true;
  }

  // Resolves all outstanding obligations by depth-first choice, or reports
  // that the current pattern cannot be realized.
  bool solve() {
    for (std::size_t i = 0; i < obligations_.size(); ++i) {
      if (satisfied(obligations_[i])) continue;
      const Obligation ob = obligations_[i];
      bool fresh_seen = false;
      for (std::uint32_t cand = 0; cand < keys_.size(); ++cand) {
        if (distinguished_[cand] == 0) {
          if (fresh_seen) continue;
          fresh_seen = true;
        }
        if (!compatible(ob, cand)) continue;
        count_node();
        const Marks m = marks();
        mark_distinguished(ob.j);
        if (ob.kind == Obligation::Kind::Witness) mark_distinguished(ob.x);
        mark_distinguished(cand);
        apply_choice(ob, cand);
        if (drain() && solve()) return true;
        rollback(m);
      }
      return false;
    }
    return true;
  }

 private:
  enum class Storage : std::uint8_t { None, PerX, PerJX };

  struct Link {
    std::uint32_t lhs, rhs, j;
  };

  struct Obligation {
    enum class Kind : std::uint8_t { NonContainment, Witness };
    Kind kind;
    // NonContainment: some x must be in a=sub but not in b=sup, seen from j.
    // Witness: the compound cell (j, x) is true, so some y must be in the
    // left child a from j while x is in the right child b from y.
    std::uint32_t a, b, j, x;
  };

  struct Pending {
    std::uint32_t e, j, x;
    CellVal v;
    bool witness_on_true;
  };

  void enqueue(std::uint32_t e, std::uint32_t j, std::uint32_t x, CellVal v,
               bool witness_on_true) {
    queue_.push_back(Pending{e, j, x, v, witness_on_true});
  }

  bool satisfied(const Obligation& ob) const {
    for (std::uint32_t k = 0; k < keys_.size(); ++k) {
      if (ob.kind == Obligation::Kind::NonContainment) {
        if (value_of(ob.a, ob.j, k) == CellVal::True &&
            value_of(ob.b, ob.j, k) == CellVal::False) {
          return true;
        }
      } else {
        if (value_of(ob.a, ob.j, k) == CellVal::True &&
            value_of(ob.b, k, ob.x) == CellVal::True) {
          return true;
        }
      }
    }
    return false;
  }

  bool compatible(const Obligation& ob, std::uint32_t k) const {
    if (ob.kind == Obligation::Kind::NonContainment) {
      return value_of(ob.a, ob.j, k) != CellVal::False &&
             value_of(ob.b, ob.j, k) != CellVal::True;
    }
    return value_of(ob.a, ob.j, k) != CellVal::False &&
           value_of(ob.b, k, ob.x) != CellVal::False;
  }

  void apply_choice(const Obligation& ob, std::uint32_t cand) {
    if (ob.kind == Obligation::Kind::NonContainment) {
      enqueue(ob.a, ob.j, cand, CellVal::True, true);
      enqueue(ob.b, ob.j, cand, CellVal::False, false);
    } else {
      enqueue(ob.a, ob.j, cand, CellVal::True, true);
      enqueue(ob.b, cand, ob.x, CellVal::True, true);
    }
  }

  // A true left-child cell (j, y): every true right cell (y, x2) forces the
  // compound true at (j, x2); a false compound cell forces the right child
  // false there.
  void fire_left_true(std::uint32_t c, std::uint32_t b, std::uint32_t j,
                      std::uint32_t y) {
    for (std::uint32_t x2 = 0; x2 < keys_.size(); ++x2) {
      if (value_of(b, y, x2) == CellVal::True) {
        enqueue(c, j, x2, CellVal::True, false);
      }
      if (value_of(c, j, x2) == CellVal::False) {
        enqueue(b, y, x2, CellVal::False, false);
      }
    }
  }

  // A true right-child cell (y, x2), mirrored across viewpoints.
  void fire_right_true(std::uint32_t c, std::uint32_t a, std::uint32_t y,
                       std::uint32_t x2) {
    for (std::uint32_t j2 = 0; j2 < keys_.size(); ++j2) {
      if (value_of(a, j2, y) == CellVal::True) {
        enqueue(c, j2, x2, CellVal::True, false);
      }
      if (value_of(c, j2, x2) == CellVal::False) {
        enqueue(a, j2, y, CellVal::False, false);
      }
    }
  }

  void fire(const Pending& p) {
    const bool global = storage_[p.e] == Storage::PerX;
    if (p.v == CellVal::True) {
      for (const Link& link : links_) {
        if (link.lhs == p.e && (global || link.j == p.j)) {
          enqueue(link.rhs, link.j, p.x, CellVal::True, true);
        }
      }
      for (std::uint32_t c : parents_left_[p.e]) {
        if (global) {
          for (std::uint32_t j2 = 0; j2 < keys_.size(); ++j2) {
            fire_left_true(c, right_[c], j2, p.x);
          }
        } else {
          fire_left_true(c, right_[c], p.j, p.x);
        }
      }
      for (std::uint32_t c : parents_right_[p.e]) {
        if (global) {
          for (std::uint32_t y = 0; y < keys_.size(); ++y) {
            fire_right_true(c, left_[c], y, p.x);
          }
        } else {
          fire_right_true(c, left_[c], p.j, p.x);
        }
      }
      if (p.witness_on_true && kind_[p.e] == PrincipalExpr::Kind::Compound) {
        obligations_.push_back(Obligation{Obligation::Kind::Witness,
                                          left_[p.e], right_[p.e], p.j, p.x});
      }
    } else {
      for (const Link& link : links_) {
        if (link.rhs == p.e && (global || link.j == p.j)) {
          enqueue(link.lhs, link.j, p.x, CellVal::False, false);
        }
      }
      if (kind_[p.e] == PrincipalExpr::Kind::Compound) {
        const std::uint32_t a = left_[p.e];
        const std::uint32_t b = right_[p.e];
        for (std::uint32_t y = 0; y < keys_.size(); ++y) {
          if (value_of(a, p.j, y) == CellVal::True) {
            enqueue(b, y, p.x, CellVal::False, false);
          }
          if (value_of(b, y, p.x) == CellVal::True) {
            enqueue(a, p.j, y, CellVal::False, false);
          }
        }
      }
    }
  }

  std::vector<ExprPtr> exprs_;
  std::map<ExprPtr, std::size_t, ExprLess> expr_index_;
  std::vector<Key> keys_;
  std::map<Key, std::size_t> key_index_;
  std::vector<Storage> storage_;
  std::vector<PrincipalExpr::Kind> kind_;
  std::vector<std::uint32_t> left_, right_, key_of_;
  std::vector<std::vector<std::uint32_t>> parents_left_, parents_right_;
  std::vector<std::vector<CellVal>> cells_;
  std::vector<Link> links_;
  std::vector<Obligation> obligations_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> trail_;
  std::vector<char> distinguished_;
  std::vector<std::uint32_t> dist_trail_;
  std::vector<Pending> queue_;
  std::size_t qhead_ = 0;
  std::uint64_t nodes_ = 0;
  std::uint64_t budget_;
};

}  // namespace

ClosureInfo closure(const FormulaPtr& f) {
  ClosureInfo info;
  collect_subformulas(f, info.subformulas);
  info.keys = keys_of(*f);
  info.locals = locals_of(*f);
  info.globals = globals_of(*f);
  info.length = symbol_count(*f);
  for (const FormulaPtr& g : info.subformulas) {
    if (g->kind() != Formula::Kind::Cert) continue;
    if (as_local_binding(*g->body())) {
      info.cert_candidates[g->issuer()].insert(g->body());
    }
  }
  return info;
}

SatResult satisfiable(const FormulaPtr& f, const KeyUniverse& u,
                      const SearchLimits& limits) {
  NAMES_CHECK(f != nullptr, "satisfiable requires a formula");

  std::set<FormulaPtr, FormulaLess> cert_set, cont_set;
  collect_atoms(f, cert_set, cont_set);
  const std::vector<FormulaPtr> cert_atoms(cert_set.begin(), cert_set.end());
  const std::vector<FormulaPtr> cont_atoms(cont_set.begin(), cont_set.end());
  if (cert_atoms.size() >= 63 || cont_atoms.size() >= 63) {
    // Enumerating truth patterns for that many atoms dwarfs any budget.
    throw ResourceLimitError(limits.node_budget);
  }
  AtomIndex cert_idx, cont_idx;
  for (std::size_t i = 0; i < cert_atoms.size(); ++i) cert_idx[cert_atoms[i]] = i;
  for (std::size_t i = 0; i < cont_atoms.size(); ++i) cont_idx[cont_atoms[i]] = i;

  const KeySet kphi = keys_of(*f);
  KeySet slice_set = kphi;
  std::vector<Key> fresh;
  if (u.mode == KeyUniverse::Mode::Finite) {
    for (const Key& k : kphi) {
      if (u.keys.count(k) == 0) {
        throw SemanticError("finite universe is missing formula key #" + k.id);
      }
    }
    slice_set = u.keys;
  } else {
    const std::size_t length = symbol_count(*f);
    const std::size_t quadratic = 2 * length * length - kphi.size();
    const std::size_t refined = distinguishable_nonkey_count(f) + 1;
    fresh = fresh_keys(kphi, std::min(quadratic, refined));
    slice_set.insert(fresh.begin(), fresh.end());
  }
  if (slice_set.empty()) return SatResult{};  // no viewpoint can exist
  const std::vector<Key> slice(slice_set.begin(), slice_set.end());

  std::vector<Key> viewpoints;
  if (u.mode == KeyUniverse::Mode::Finite) {
    viewpoints = slice;
  } else {
    viewpoints.assign(kphi.begin(), kphi.end());
    viewpoints.push_back(fresh.front());  // one fresh representative
  }

  Solver solver(build_expr_universe(cont_atoms, cert_atoms), slice, kphi,
                limits.node_budget);

  struct ContAtom {
    std::size_t sup, sub;
  };
  std::vector<ContAtom> cont(cont_atoms.size());
  for (std::size_t i = 0; i < cont_atoms.size(); ++i) {
    cont[i] = ContAtom{solver.expr_index(cont_atoms[i]->sup()),
                       solver.expr_index(cont_atoms[i]->sub())};
  }
  struct CertAtom {
    bool binding = false;
    std::size_t issuer_key = 0, body_expr = 0, local_expr = 0;
  };
  std::vector<CertAtom> cert(cert_atoms.size());
  for (std::size_t i = 0; i < cert_atoms.size(); ++i) {
    auto binding = as_local_binding(*cert_atoms[i]->body());
    if (!binding) continue;
    cert[i] = CertAtom{true, solver.key_index(cert_atoms[i]->issuer()),
                       solver.expr_index(binding->second),
                       solver.expr_index(PrincipalExpr::local(binding->first))};
  }

  const std::uint64_t tau_limit = std::uint64_t{1} << cert_atoms.size();
  const std::uint64_t sigma_limit = std::uint64_t{1} << cont_atoms.size();
  for (std::uint64_t tau = 0; tau < tau_limit; ++tau) {
    std::vector<std::uint64_t> feasible;
    for (std::uint64_t sigma = 0; sigma < sigma_limit; ++sigma) {
      solver.count_node();
      if (skeleton_true(f, cert_idx, cont_idx, tau, sigma)) {
        feasible.push_back(sigma);
      }
    }
    if (feasible.empty()) continue;

    const Solver::Marks tau_mark = solver.marks();
    // Issued bindings must be honored by the assignment.
    for (std::size_t i = 0; i < cert_atoms.size(); ++i) {
      if (((tau >> i) & 1) != 0 && cert[i].binding) {
        solver.add_link(cert[i].body_expr, cert[i].local_expr,
                        cert[i].issuer_key);
      }
    }
    if (!solver.drain()) {
      solver.rollback(tau_mark);
      continue;
    }

    for (const Key& viewpoint : viewpoints) {
      const std::size_t v = solver.key_index(viewpoint);
      const Solver::Marks view_mark = solver.marks();
      solver.mark_distinguished(v);

      for (std::uint64_t sigma : feasible) {
        solver.count_node();
        const Solver::Marks sigma_mark = solver.marks();
        for (std::size_t i = 0; i < cont.size(); ++i) {
          if (((sigma >> i) & 1) != 0) {
            solver.add_link(cont[i].sub, cont[i].sup, v);
          } else {
            solver.require_noncontainment(cont[i].sub, cont[i].sup, v);
          }
        }
        if (solver.drain() && solver.solve()) {
          // Realized: read the model off the cells.
          World w;
          if (u.mode == KeyUniverse::Mode::Finite) w.declare_keys(u.keys);
          for (std::size_t i = 0; i < cert_atoms.size(); ++i) {
            if (((tau >> i) & 1) != 0) {
              w.add_certificate(cert_atoms[i]->issuer(),
                                cert_atoms[i]->body());
            }
          }
          LocalNameAssignment lna;
          const std::vector<Key>& keys = solver.keys();
          for (std::size_t e = 0; e < solver.exprs().size(); ++e) {
            const PrincipalExpr& pe = *solver.exprs()[e];
            if (pe.kind() == PrincipalExpr::Kind::Global) {
              KeySet members;
              for (std::uint32_t x = 0; x < keys.size(); ++x) {
                if (solver.value_of(e, 0, x) == CellVal::True) {
                  members.insert(keys[x]);
                }
              }
              w.bind_global(pe.global_name(), members);
            } else if (pe.kind() == PrincipalExpr::Kind::Local) {
              for (std::uint32_t j = 0; j < keys.size(); ++j) {
                for (std::uint32_t x = 0; x < keys.size(); ++x) {
                  if (solver.value_of(e, j, x) == CellVal::True) {
                    lna.add(keys[j], pe.local_name(), keys[x]);
                  }
                }
              }
            }
          }
          w.declare_keys(kphi);
          w.declare_key(viewpoint);
          for (const auto& [cell, values] : lna.entries()) {
            w.declare_key(cell.first);
            w.declare_keys(values);
          }
          NAMES_CHECK(models_open(w, lna, viewpoint, *f) == OpenOutcome::True,
                      "extracted witness fails to satisfy the formula");
          return SatResult{Witness{std::move(w), std::move(lna), viewpoint}};
        }
        solver.rollback(sigma_mark);
      }
      solver.rollback(view_mark);
    }
    solver.rollback(tau_mark);
  }
  return SatResult{};
}

ValidityResult valid_check(const FormulaPtr& f, const KeyUniverse& u,
                           const SearchLimits& limits) {
  SatResult refutation = satisfiable(Formula::negation(f), u, limits);
  return ValidityResult{std::move(refutation.witness)};
}

}  // namespace names
