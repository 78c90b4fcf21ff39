// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.
//
// Acceptance checks for the resolution and reasoning engine. Each criterion
// prints exactly one PASS or FAIL line; the process exits nonzero when any
// criterion fails. Every check measures its own wall time against the
// budget stated in its entry.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "names/axioms.hpp"
#include "names/core.hpp"
#include "names/datalog.hpp"
#include "names/decision.hpp"
#include "names/parser.hpp"
#include "names/resolver.hpp"
#include "names/semantics.hpp"
#include "oracles.hpp"

using namespace names;
using names::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string detail) { return Outcome{false, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// ---------------------------------------------------------------------------
// 1. Running example: a dead-end resolution is empty and the containment is
//    false under the closed semantics.

Outcome criterion_running_example() {
  World w = names::testing::lampson_world();
  const Key k{"k"};
  ExprPtr dead = parse_expr("#k . lampson . ron");

  KeySet by_ref2 = ref2_all(k, w, dead);
  KeySet by_fixpoint = interpret(dead, w, minimal_assignment(w), k);
  KeySet by_datalog = resolve_via_datalog(k, w, dead);
  if (!by_ref2.empty() || !by_fixpoint.empty() || !by_datalog.empty()) {
    return fail("a dead-end chain resolved to a nonempty set");
  }
  if (models_closed(w, k, *parse_formula("#k . lampson . ron >= #k3"))) {
    return fail("the dead-end containment evaluated to true");
  }
  return Outcome{true, "all three routes empty, containment false"};
}

// ---------------------------------------------------------------------------
// 2. An empty certificate store cannot resolve through a local name.

Outcome criterion_empty_store() {
  World w;
  w.declare_keys(KeySet{Key{"k"}, Key{"k1"}});
  KeySet got = ref2_all(Key{"k"}, w, parse_expr("lampson . #k1"));
  if (!got.empty()) return fail("resolution invented members");
  return Outcome{true, "local-name chain unresolvable without certificates"};
}

// ---------------------------------------------------------------------------
// 3. The three resolution routes agree everywhere.

Outcome criterion_three_routes() {
  Rng rng(303030);
  auto globals = names::testing::global_pool(2);
  auto locals = names::testing::local_pool(4);
  long triples = 0;
  for (int i = 0; i < 1000; ++i) {
    World w = names::testing::random_world(rng);
    if (w.declared_keys.empty()) continue;
    LocalNameAssignment l = minimal_assignment(w);
    std::vector<Key> keys(w.declared_keys.begin(), w.declared_keys.end());
    for (int j = 0; j < 20; ++j) {
      ExprPtr e = names::testing::random_expr(rng, keys, globals, locals, 3);
      for (const Key& vp : w.declared_keys) {
        if (ref2_all(vp, w, e) != interpret(e, w, l, vp)) {
          return fail("enumeration and fixpoint disagreed on " + render(e));
        }
      }
      const Key& vp = keys[rng.below(keys.size())];
      KeySet expected = interpret(e, w, l, vp);
      if (resolve_via_datalog(vp, w, e) != expected) {
        return fail("clause route disagreed on " + render(e));
      }
      ++triples;
    }
  }
  std::ostringstream d;
  d << "1000 worlds, " << triples << " expressions, zero disagreements";
  return Outcome{true, d.str()};
}

// ---------------------------------------------------------------------------
// 4. Closed-semantics containment conclusions persist under world extension.

Outcome criterion_monotone_extension() {
  Rng rng(404040);
  auto globals = names::testing::global_pool(2);
  auto locals = names::testing::local_pool(4);
  long checked = 0;
  for (int i = 0; i < 300; ++i) {
    World w = names::testing::random_world(rng);
    if (w.declared_keys.empty()) continue;
    World bigger = names::testing::extend_world(rng, w);
    if (!extends(bigger, w)) return fail("generator produced a non-extension");
    LocalNameAssignment l = minimal_assignment(w);
    LocalNameAssignment lb = minimal_assignment(bigger);
    std::vector<Key> keys(w.declared_keys.begin(), w.declared_keys.end());
    for (int j = 0; j < 30; ++j) {
      ExprPtr p = names::testing::random_expr(rng, keys, globals, locals, 3);
      for (const Key& vp : w.declared_keys) {
        KeySet before = interpret(p, w, l, vp);
        KeySet after = interpret(p, bigger, lb, vp);
        for (const Key& member : before) {
          if (after.count(member) == 0) {
            return fail("membership of #" + member.id + " in " + render(p) +
                        " was lost after extension");
          }
        }
        ++checked;
      }
    }
  }
  std::ostringstream d;
  d << "300 extension pairs, " << checked << " denotations stayed monotone";
  return Outcome{true, d.str()};
}

// ---------------------------------------------------------------------------
// 5. The minimal model of the clause encoding is exactly the identity facts,
//    the global bindings, the self facts, and the least assignment.

Outcome criterion_representation() {
  Rng rng(505050);
  for (int i = 0; i < 300; ++i) {
    World w = names::testing::random_world(rng);
    FactSet expected;
    for (const Key& viewer : w.declared_keys) {
      for (const Key& k : w.declared_keys) {
        expected.insert(
            Fact{key_constant(viewer), key_constant(k), key_constant(k)});
      }
      for (const auto& [g, ks] : w.globals) {
        for (const Key& k : ks) {
          expected.insert(
              Fact{key_constant(viewer), global_constant(g), key_constant(k)});
        }
      }
      expected.insert(
          Fact{key_constant(viewer), self_constant(), key_constant(viewer)});
    }
    LocalNameAssignment l = names::testing::naive_minimal_assignment(w);
    for (const auto& [entry, values] : l.entries()) {
      for (const Key& v : values) {
        expected.insert(Fact{key_constant(entry.first),
                             local_constant(entry.second), key_constant(v)});
      }
    }
    if (minimal_model(world_to_program(w)) != expected) {
      return fail("world " + std::to_string(i) + " decoded incorrectly");
    }
  }
  return Outcome{true, "300 worlds decoded exactly"};
}

// ---------------------------------------------------------------------------
// 6. Every unbounded-universe axiom schema is valid at scale and holds under
//    the closed semantics on random worlds.

InstancePool acceptance_pool() {
  InstancePool pool;
  pool.exprs = {parse_expr("a"),          parse_expr("b . c"),
                parse_expr("#k1"),        parse_expr("#k2 . a"),
                parse_expr("!dns"),       parse_expr("self"),
                parse_expr("self . b"),   parse_expr("a . b . c"),
                parse_expr("#k3"),        parse_expr("!web . a")};
  pool.keys = {Key{"k1"}, Key{"k2"}, Key{"k3"}};
  pool.globals = {GlobalName{"dns"}, GlobalName{"web"}};
  pool.locals = {LocalName{"a"}, LocalName{"b"}, LocalName{"c"},
                 LocalName{"n"}};
  pool.universe = KeySet{Key{"k1"}, Key{"k2"}};
  return pool;
}

Outcome criterion_axiom_soundness() {
  InstancePool pool = acceptance_pool();
  SearchLimits limits;
  limits.node_budget = 10'000'000;
  long validated = 0;
  long modeled = 0;
  std::uint64_t schema_index = 0;
  for (const Schema& s : schema_registry()) {
    ++schema_index;
    if (!s.axiom || s.finite_only) continue;

    std::vector<FormulaPtr> instances;
    instances.reserve(500);
    for (std::uint64_t seed = 1; seed <= 500; ++seed) {
      instances.push_back(random_instance(s, pool, seed));
    }
    for (const FormulaPtr& f : instances) {
      ValidityResult r = valid_check(f, KeyUniverse::unbounded(), limits);
      if (!r.is_valid()) {
        return fail("schema " + s.name + " instance " + render(f) +
                    " was refuted");
      }
      ++validated;
    }

    Rng rng(900000 + schema_index);
    for (int i = 0; i < 50; ++i) {
      World w = names::testing::random_world(rng);
      w.declare_keys(KeySet{Key{"k1"}, Key{"k2"}, Key{"k3"}});
      LocalNameAssignment l = minimal_assignment(w);
      std::vector<Key> keys(w.declared_keys.begin(), w.declared_keys.end());
      const Key& vp = keys[rng.below(keys.size())];
      for (const FormulaPtr& f : instances) {
        if (!holds(w, l, vp, *f)) {
          return fail("schema " + s.name + " instance " + render(f) +
                      " failed in a closed world");
        }
        ++modeled;
      }
    }
  }
  std::ostringstream d;
  d << validated << " instances valid, " << modeled
    << " closed-world checks held";
  return Outcome{true, d.str()};
}

// ---------------------------------------------------------------------------
// 7. The finite-universe schemas are valid exactly for their own universe.

Outcome criterion_finite_schemas() {
  KeySet two{Key{"k1"}, Key{"k2"}};
  KeyUniverse u2 = KeyUniverse::finite(two);
  KeyUniverse u3 = KeyUniverse::finite(KeySet{Key{"k1"}, Key{"k2"}, Key{"k3"}});

  SchemaBindings w1;
  w1.with_expr("p", parse_expr("a")).with_expr("q", parse_expr("b"));
  w1.with_universe(two);
  FormulaPtr witnesses1 = instantiate(schema_by_name("Witnesses1"), w1);

  SchemaBindings w2;
  w2.with_expr("p", parse_expr("a"))
      .with_expr("q", parse_expr("b"))
      .with_key("k1", Key{"k1"})
      .with_universe(two);
  FormulaPtr witnesses2 = instantiate(schema_by_name("Witnesses2"), w2);

  SchemaBindings cp;
  cp.with_universe(two)
      .with_row(Key{"k1"}, LocalName{"m"}, Key{"k1"})
      .with_row(Key{"k2"}, LocalName{"n"}, Key{"k2"});
  FormulaPtr current = instantiate(schema_by_name("CurrentPrincipal"), cp);

  if (!valid_check(witnesses1, u2).is_valid()) {
    return fail("the witness schema failed over its own universe");
  }
  if (!valid_check(witnesses2, u2).is_valid()) {
    return fail("the linked witness schema failed over its own universe");
  }
  if (!valid_check(current, u2).is_valid()) {
    return fail("the current-principal schema failed over its own universe");
  }

  ValidityResult wider = valid_check(witnesses1, u3);
  if (wider.is_valid()) {
    return fail("the witness instance stayed valid in a wider universe");
  }
  const Witness& cm = *wider.countermodel;
  if (models_open(cm.world, cm.assignment, cm.viewpoint, *witnesses1) !=
      OpenOutcome::False) {
    return fail("the wider-universe countermodel does not falsify");
  }
  return Outcome{true,
                 "valid over their universe, refuted one key wider"};
}

// ---------------------------------------------------------------------------
// 8. Plausible non-theorems come back with concrete countermodels.

Outcome criterion_non_theorems() {
  SchemaBindings gl;
  gl.with_key("k", Key{"k"})
      .with_expr("p1", parse_expr("a . b"))
      .with_expr("p2", parse_expr("c"));
  FormulaPtr claims[] = {
      instantiate(schema_by_name("GeneralizedLinking"), gl),
      parse_formula("#k certs (!DNS >= #k) => !DNS >= #k"),
      parse_formula(
          "!(#k certs false) & #k certs (!DNS >= #k) => !DNS >= #k"),
  };
  for (const FormulaPtr& f : claims) {
    auto start = std::chrono::steady_clock::now();
    ValidityResult r = valid_check(f, KeyUniverse::unbounded());
    double secs = seconds_since(start);
    if (r.is_valid()) return fail(render(f) + " was not refuted");
    const Witness& cm = *r.countermodel;
    if (models_open(cm.world, cm.assignment, cm.viewpoint, *f) !=
        OpenOutcome::False) {
      return fail("countermodel for " + render(f) + " does not falsify");
    }
    if (secs >= 10.0) {
      return fail("refuting " + render(f) + " took too long");
    }
  }
  return Outcome{true, "3 countermodels found and replayed"};
}

// ---------------------------------------------------------------------------
// 9. Open and closed satisfiability agree on exhaustive small instances.

Outcome criterion_open_closed_agreement() {
  Rng rng(909090);
  auto keys = names::testing::key_pool(3);
  auto globals = names::testing::global_pool(1);
  auto locals = names::testing::local_pool(2);
  std::vector<Key> universe = keys;
  int sat_count = 0;
  for (int i = 0; i < 500; ++i) {
    FormulaPtr f = names::testing::random_formula(rng, keys, globals, locals,
                                                  1 + rng.below(10));
    bool open_sat = names::testing::brute_open_sat(f, universe);
    bool closed_sat = names::testing::brute_closed_sat(f, universe);
    if (open_sat != closed_sat) {
      return fail("semantics disagreed on " + render(f));
    }
    if (open_sat) ++sat_count;
  }
  std::ostringstream d;
  d << "500 formulas agreed (" << sat_count << " satisfiable)";
  return Outcome{true, d.str()};
}

// ---------------------------------------------------------------------------
// 10. Local-name-free containments never depend on the certificate store.

Outcome criterion_certificate_independence() {
  Rng rng(101010);
  auto globals = names::testing::global_pool(2);
  auto locals = names::testing::local_pool(4);
  std::vector<LocalName> no_locals;
  long compared = 0;
  for (int i = 0; i < 200; ++i) {
    World w = names::testing::random_world(rng);
    if (w.declared_keys.empty()) continue;
    std::vector<Key> keys(w.declared_keys.begin(), w.declared_keys.end());

    // The same keys and globals under a resampled store and an empty one.
    World resampled;
    resampled.declare_keys(w.declared_keys);
    resampled.globals = w.globals;
    int certs = static_cast<int>(rng.below(11));
    for (int c = 0; c < certs; ++c) {
      ExprPtr body =
          names::testing::random_expr(rng, keys, globals, locals, 3);
      resampled.add_certificate(
          keys[rng.below(keys.size())],
          Formula::contains(
              PrincipalExpr::local(locals[rng.below(locals.size())]), body));
    }
    World stripped;
    stripped.declare_keys(w.declared_keys);
    stripped.globals = w.globals;

    LocalNameAssignment l1 = minimal_assignment(w);
    LocalNameAssignment l2 = minimal_assignment(resampled);
    LocalNameAssignment l3 = minimal_assignment(stripped);
    for (int j = 0; j < 200; ++j) {
      ExprPtr p =
          names::testing::random_expr(rng, keys, globals, no_locals, 2);
      ExprPtr q =
          names::testing::random_expr(rng, keys, globals, no_locals, 2);
      FormulaPtr atom = Formula::contains(p, q);
      const Key& vp = keys[rng.below(keys.size())];
      bool original = holds(w, l1, vp, *atom);
      if (holds(resampled, l2, vp, *atom) != original ||
          holds(stripped, l3, vp, *atom) != original) {
        return fail("truth of " + render(atom) +
                    " moved with the certificate store");
      }
      ++compared;
    }
  }
  std::ostringstream d;
  d << compared << " atoms invariant under store replacement";
  return Outcome{true, d.str()};
}

// ---------------------------------------------------------------------------
// 11. Self behaves as the current principal: schema validity plus the
//     officer-pair example.

Outcome criterion_self() {
  InstancePool pool = acceptance_pool();
  for (const char* name :
       {"Identity1", "Identity2", "Identity3", "Identity4", "SelfIsKey"}) {
    const Schema& s = schema_by_name(name);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      FormulaPtr f = random_instance(s, pool, seed);
      if (!valid_check(f, KeyUniverse::unbounded()).is_valid()) {
        return fail("schema " + s.name + " instance " + render(f) +
                    " was refuted");
      }
    }
  }

  // A principal binds a role name to itself and to a second key: the role
  // then denotes both keys, so the second key alone never covers the role.
  World w = names::testing::us_world();
  const Key president{"kP"};
  const Key second{"kVP"};
  LocalNameAssignment l = minimal_assignment(w);
  if (interpret(parse_expr("us"), w, l, president) != KeySet{president,
                                                             second}) {
    return fail("the role name denotes the wrong key set");
  }
  if (!models_closed(w, president, *parse_formula("#kP certs us >= self")) ||
      !models_closed(w, president, *parse_formula("#kP certs us >= #kVP"))) {
    return fail("an issued role certificate does not hold");
  }
  if (models_closed(w, president, *parse_formula("#kVP >= us"))) {
    return fail("one key claimed to cover the two-key role");
  }
  return Outcome{true, "500 self instances valid, officer pair pinned"};
}

// ---------------------------------------------------------------------------
// 12. Satisfiability and validity stay fast at the working scale.

Outcome criterion_decision_scale() {
  Rng rng(121212);
  auto keys = names::testing::key_pool(3);
  auto globals = names::testing::global_pool(1);
  auto locals = names::testing::local_pool(2);

  std::vector<FormulaPtr> corpus;
  corpus.push_back(
      parse_formula("#k1 certs a >= #k2 & !(#k1 . a >= #k2)"));
  corpus.push_back(parse_formula("a >= b & b >= c & !(a >= c)"));
  corpus.push_back(parse_formula("!(a >= b) => b . #k1 >= #k1"));
  while (corpus.size() < 30) {
    FormulaPtr f = names::testing::random_formula(rng, keys, globals, locals,
                                                  1 + rng.below(12));
    if (symbol_count(*f) <= 12) corpus.push_back(f);
  }

  double worst = 0.0;
  for (const FormulaPtr& f : corpus) {
    auto start = std::chrono::steady_clock::now();
    try {
      satisfiable(f, KeyUniverse::unbounded());
      valid_check(f, KeyUniverse::unbounded());
    } catch (const ResourceLimitError&) {
      return fail("default budget exhausted on " + render(f));
    }
    double secs = seconds_since(start);
    if (secs > worst) worst = secs;
    if (secs >= 10.0) {
      return fail("deciding " + render(f) + " took too long");
    }
  }
  std::ostringstream d;
  d.precision(2);
  d << std::fixed << corpus.size() << " formulas decided, worst " << worst
    << "s";
  return Outcome{true, d.str()};
}

struct Criterion {
  std::string title;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"dead-end resolution in the running example", 1.0,
       criterion_running_example},
      {"no resolution from an empty certificate store", 1.0,
       criterion_empty_store},
      {"three independent resolution routes agree", 60.0,
       criterion_three_routes},
      {"closed conclusions persist under world extension", 30.0,
       criterion_monotone_extension},
      {"clause encoding represents worlds exactly", 30.0,
       criterion_representation},
      {"axiom schemas are valid and hold in closed worlds", 600.0,
       criterion_axiom_soundness},
      {"finite-universe schemas bind to their universe", 60.0,
       criterion_finite_schemas},
      {"non-theorems yield replayable countermodels", 30.0,
       criterion_non_theorems},
      {"open and closed satisfiability agree", 300.0,
       criterion_open_closed_agreement},
      {"containments without local names ignore certificates", 30.0,
       criterion_certificate_independence},
      {"the current principal behaves as a key", 120.0, criterion_self},
      {"decision procedures stay within budget at scale", 600.0,
       criterion_decision_scale},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    double secs = seconds_since(start);
    if (o.pass && secs >= c.budget_seconds) {
      o = fail("exceeded the " + std::to_string(c.budget_seconds) +
               "s time budget");
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %zu: %s (%s; %.2fs)\n",
                o.pass ? "PASS" : "FAIL", i + 1, c.title.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  if (failures > 0) {
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu criteria passed\n", criteria.size());
  return 0;
}
