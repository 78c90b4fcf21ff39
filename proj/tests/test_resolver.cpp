// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include <doctest.h>

#include <optional>

#include "generators.hpp"
#include "names/core.hpp"
#include "names/parser.hpp"
#include "names/resolver.hpp"
#include "names/semantics.hpp"
#include "oracles.hpp"

using namespace names;

namespace {

const Key kK{"k"};
const Key kK1{"k1"};
const Key kK2{"k2"};
const Key kK3{"k3"};

}  // namespace

TEST_CASE("resolution of the running example") {
  World w = names::testing::lampson_world();
  CHECK(ref2_all(kK, w, parse_expr("lampson")) == KeySet{kK1, kK2});
  CHECK(ref2_all(kK, w, parse_expr("lampson . rivest")) == KeySet{kK3});
  CHECK(ref2_all(kK, w, parse_expr("lampson . ron")).empty());
  CHECK(ref2_all(kK, w, parse_expr("#k . lampson . rivest")) == KeySet{kK3});
  CHECK(ref2_all(kK2, w, parse_expr("rivest")) == KeySet{kK3});
  CHECK(ref2_all(kK1, w, parse_expr("rivest")).empty());
}

TEST_CASE("an empty certificate store resolves only closed forms") {
  World w;
  w.declare_keys(KeySet{kK, kK1});
  CHECK(ref2_all(kK, w, parse_expr("lampson . #k1")).empty());
  CHECK(ref2_all(kK, w, parse_expr("lampson")).empty());
  CHECK(ref2_all(kK, w, parse_expr("#k1")) == KeySet{kK1});
  CHECK(ref2_all(kK, w, parse_expr("self")) == KeySet{kK});
  CHECK(ref2_all(kK, w, parse_expr("self . self")) == KeySet{kK});
}

TEST_CASE("key leaves resolve from any viewpoint") {
  World w;
  w.declare_keys(KeySet{kK1});
  CHECK(ref2_all(kK1, w, parse_expr("#k2")) == KeySet{kK2});

  ComputationTree leaf;
  leaf.result = kK2;
  leaf.viewpoint = kK1;
  leaf.expr = parse_expr("#k2");
  leaf.rule = ComputationTree::Rule::KeyLeaf;
  CHECK(validate_tree(leaf, w));
}

TEST_CASE("global leaves ignore the viewpoint") {
  World w;
  w.declare_keys(KeySet{kK1, kK2, kK3});
  w.bind_global(GlobalName{"dns"}, KeySet{kK2, kK3});
  CHECK(ref2_all(kK1, w, parse_expr("!dns")) == KeySet{kK2, kK3});
  CHECK(ref2_all(kK2, w, parse_expr("!dns")) == KeySet{kK2, kK3});
  CHECK(ref2_all(kK1, w, parse_expr("!web")).empty());
}

TEST_CASE("cyclic certificate stores derive only grounded members") {
  World w;
  w.add_certificate(kK1, parse_formula("a >= a"));
  CHECK(ref2_all(kK1, w, parse_expr("a")).empty());

  w.add_certificate(kK1, parse_formula("a >= #k2"));
  CHECK(ref2_all(kK1, w, parse_expr("a")) == KeySet{kK2});

  World mutual;
  mutual.add_certificate(kK1, parse_formula("a >= b"));
  mutual.add_certificate(kK1, parse_formula("b >= a"));
  CHECK(ref2_all(kK1, mutual, parse_expr("a")).empty());
  CHECK(ref2_all(kK1, mutual, parse_expr("b")).empty());
}

TEST_CASE("the trace of the running example is the canonical derivation") {
  World w = names::testing::lampson_world();
  auto t = ref2_trace(kK, w, parse_expr("lampson . rivest"), kK3);
  REQUIRE(t.has_value());
  CHECK(validate_tree(*t, w));

  CHECK(t->rule == ComputationTree::Rule::LinkStep);
  CHECK(t->result == kK3);
  CHECK(t->viewpoint == kK);
  REQUIRE(t->children.size() == 2);

  const ComputationTree& left = t->children[0];
  CHECK(left.rule == ComputationTree::Rule::CertStep);
  CHECK(left.result == kK2);
  CHECK(left.viewpoint == kK);
  REQUIRE(left.children.size() == 1);
  CHECK(left.children[0].rule == ComputationTree::Rule::KeyLeaf);

  const ComputationTree& right = t->children[1];
  CHECK(right.rule == ComputationTree::Rule::CertStep);
  CHECK(right.result == kK3);
  CHECK(right.viewpoint == kK2);
  REQUIRE(right.children.size() == 1);
  CHECK(right.children[0].rule == ComputationTree::Rule::KeyLeaf);

  CHECK(render_tree(*t) ==
        "#k3 ∈ REF2(#k, lampson . rivest) [link via #k2]\n"
        "  #k2 ∈ REF2(#k, lampson) [cert: lampson >= #k2]\n"
        "    #k2 ∈ REF2(#k, #k2) [key]\n"
        "  #k3 ∈ REF2(#k2, rivest) [cert: rivest >= #k3]\n"
        "    #k3 ∈ REF2(#k2, #k3) [key]\n");
}

TEST_CASE("traces follow chains of local bindings") {
  World w;
  w.add_certificate(kK1, parse_formula("a >= b"));
  w.add_certificate(kK1, parse_formula("b >= c"));
  w.add_certificate(kK1, parse_formula("c >= #k2"));
  auto t = ref2_trace(kK1, w, parse_expr("a"), kK2);
  REQUIRE(t.has_value());
  CHECK(validate_tree(*t, w));
  CHECK(t->rule == ComputationTree::Rule::CertStep);
  REQUIRE(t->children.size() == 1);
  CHECK(t->children[0].rule == ComputationTree::Rule::CertStep);
  REQUIRE(t->children[0].children.size() == 1);
  CHECK(t->children[0].children[0].rule == ComputationTree::Rule::CertStep);
  CHECK(t->children[0].children[0].children[0].rule ==
        ComputationTree::Rule::KeyLeaf);
}

TEST_CASE("traces pick the first certificate that derives the target") {
  World w = names::testing::lampson_world();
  auto t1 = ref2_trace(kK, w, parse_expr("lampson"), kK1);
  REQUIRE(t1.has_value());
  REQUIRE(t1->cert != nullptr);
  CHECK(*t1->cert == *parse_formula("lampson >= #k1"));

  auto t2 = ref2_trace(kK, w, parse_expr("lampson"), kK2);
  REQUIRE(t2.has_value());
  REQUIRE(t2->cert != nullptr);
  CHECK(*t2->cert == *parse_formula("lampson >= #k2"));
}

TEST_CASE("non-members have no trace") {
  World w = names::testing::lampson_world();
  CHECK_FALSE(ref2_trace(kK, w, parse_expr("lampson"), kK3).has_value());
  CHECK_FALSE(ref2_trace(kK, w, parse_expr("lampson . ron"), kK1).has_value());
  CHECK_FALSE(
      ref2_trace(kK, w, parse_expr("lampson"), Key{"stranger"}).has_value());
}

TEST_CASE("self leaves give the current viewpoint") {
  World w;
  w.declare_keys(KeySet{kK1});
  auto t = ref2_trace(kK1, w, parse_expr("self"), kK1);
  REQUIRE(t.has_value());
  CHECK(t->rule == ComputationTree::Rule::SelfLeaf);
  CHECK(validate_tree(*t, w));
  CHECK_FALSE(ref2_trace(kK1, w, parse_expr("self"), kK2).has_value());
}

TEST_CASE("validation rejects tampered derivations") {
  World w = names::testing::lampson_world();
  auto t = ref2_trace(kK, w, parse_expr("lampson . rivest"), kK3);
  REQUIRE(t.has_value());

  ComputationTree wrong_result = *t;
  wrong_result.result = kK1;
  CHECK_FALSE(validate_tree(wrong_result, w));

  ComputationTree wrong_viewpoint = *t;
  wrong_viewpoint.children[1].viewpoint = kK1;
  CHECK_FALSE(validate_tree(wrong_viewpoint, w));

  ComputationTree wrong_cert = *t;
  wrong_cert.children[0].cert = parse_formula("lampson >= #k3");
  CHECK_FALSE(validate_tree(wrong_cert, w));

  ComputationTree missing_child = *t;
  missing_child.children.pop_back();
  CHECK_FALSE(validate_tree(missing_child, w));
}

TEST_CASE("enumeration matches the fixpoint denotation on random inputs") {
  names::testing::Rng rng(515151);
  auto globals = names::testing::global_pool(2);
  auto locals = names::testing::local_pool(4);
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    World w = names::testing::random_world(rng);
    LocalNameAssignment l = minimal_assignment(w);
    std::vector<Key> keys(w.declared_keys.begin(), w.declared_keys.end());
    if (keys.empty()) continue;
    for (int j = 0; j < 8; ++j) {
      ExprPtr e = names::testing::random_expr(rng, keys, globals, locals, 3);
      for (const Key& vp : w.declared_keys) {
        KeySet enumerated = ref2_all(vp, w, e);
        CHECK(enumerated == interpret(e, w, l, vp));
        // Every member has a derivation that validates; non-members have none.
        for (const Key& member : enumerated) {
          auto t = ref2_trace(vp, w, e, member);
          REQUIRE(t.has_value());
          CHECK(validate_tree(*t, w));
          CHECK(t->result == member);
          CHECK(t->viewpoint == vp);
          CHECK(*t->expr == *e);
        }
        ++compared;
      }
    }
  }
  CHECK(compared > 500);
}
