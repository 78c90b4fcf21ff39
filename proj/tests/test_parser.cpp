// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include <doctest.h>

#include <string>

#include "generators.hpp"
#include "names/core.hpp"
#include "names/parser.hpp"

using namespace names;

namespace {

ExprPtr k(const char* id) { return PrincipalExpr::key(Key{id}); }
ExprPtr loc(const char* id) { return PrincipalExpr::local(LocalName{id}); }

template <typename Fn>
ParseError capture(Fn&& parse) {
  try {
    parse();
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("expression atoms parse to the right node kinds") {
  CHECK(parse_expr("#k1")->kind() == PrincipalExpr::Kind::Key);
  CHECK(parse_expr("#k1")->key_name() == Key{"k1"});
  CHECK(parse_expr("!dns")->kind() == PrincipalExpr::Kind::Global);
  CHECK(parse_expr("!dns")->global_name() == GlobalName{"dns"});
  CHECK(parse_expr("lampson")->kind() == PrincipalExpr::Kind::Local);
  CHECK(parse_expr("lampson")->local_name() == LocalName{"lampson"});
  CHECK(parse_expr("self")->kind() == PrincipalExpr::Kind::Self);
  CHECK(parse_expr("  self  ")->kind() == PrincipalExpr::Kind::Self);
}

TEST_CASE("compounds are left associative") {
  ExprPtr e = parse_expr("#k . lampson . ron");
  ExprPtr expected = PrincipalExpr::compound(
      PrincipalExpr::compound(k("k"), loc("lampson")), loc("ron"));
  CHECK(*e == *expected);

  ExprPtr nested = parse_expr("#k . (lampson . ron)");
  ExprPtr expected_nested = PrincipalExpr::compound(
      k("k"), PrincipalExpr::compound(loc("lampson"), loc("ron")));
  CHECK(*nested == *expected_nested);
  CHECK_FALSE(*e == *nested);
}

TEST_CASE("reference lists fold into compounds") {
  CHECK(*parse_expr("(ref: #k, lampson, ron)") ==
        *parse_expr("#k . lampson . ron"));
  CHECK(*parse_expr("(ref: #k)") == *parse_expr("#k"));
  CHECK(parse_expr("(ref:)")->kind() == PrincipalExpr::Kind::Self);
  CHECK(*parse_expr("(ref: a . b, c)") == *parse_expr("a . b . c"));
}

TEST_CASE("expression rendering uses minimal parentheses") {
  CHECK(render(parse_expr("#k . lampson . ron")) == "#k . lampson . ron");
  CHECK(render(parse_expr("#k . (lampson . ron)")) == "#k . (lampson . ron)");
  CHECK(render(parse_expr("(ref: !dns, a)")) == "!dns . a");
  CHECK(render(parse_expr("(ref:)")) == "self");
}

TEST_CASE("containment and certificate formulas parse directly") {
  FormulaPtr f = parse_formula("#k . lampson >= #k1");
  REQUIRE(f->kind() == Formula::Kind::Contains);
  CHECK(*f->sup() == *parse_expr("#k . lampson"));
  CHECK(*f->sub() == *k("k1"));

  FormulaPtr c = parse_formula("#k certs ron >= rivest");
  REQUIRE(c->kind() == Formula::Kind::Cert);
  CHECK(c->issuer() == Key{"k"});
  CHECK(c->body()->kind() == Formula::Kind::Contains);
  CHECK(*c->body()->sup() == *loc("ron"));

  FormulaPtr cn = parse_formula("#k certs !(a >= b)");
  REQUIRE(cn->kind() == Formula::Kind::Cert);
  CHECK(cn->body()->kind() == Formula::Kind::Not);
}

TEST_CASE("derived connectives desugar while parsing") {
  FormulaPtr a = parse_formula("a >= b");
  FormulaPtr c = parse_formula("c >= d");

  CHECK(*parse_formula("a >= b | c >= d") == *Formula::disjunction(a, c));
  CHECK(*parse_formula("a >= b => c >= d") == *Formula::implication(a, c));
  CHECK(*parse_formula("false") ==
        *Formula::negation(Formula::contains(PrincipalExpr::self(),
                                             PrincipalExpr::self())));
  // The parsed tree only ever holds the four primitive node kinds.
  FormulaPtr imp = parse_formula("a >= b => c >= d");
  REQUIRE(imp->kind() == Formula::Kind::Not);
  REQUIRE(imp->child()->kind() == Formula::Kind::And);
  CHECK(*imp->child()->lhs() == *a);
  CHECK(imp->child()->rhs()->kind() == Formula::Kind::Not);
}

TEST_CASE("operator precedence and associativity") {
  FormulaPtr a = parse_formula("a >= b");
  FormulaPtr c = parse_formula("c >= d");
  FormulaPtr e = parse_formula("e >= f");

  // "!" glued to a word is a global name, not negation.
  CHECK(*parse_formula("!a >= b") ==
        *Formula::contains(PrincipalExpr::global(GlobalName{"a"}),
                           PrincipalExpr::local(LocalName{"b"})));
  // Negation binds tighter than "&", which binds tighter than "|", then "=>".
  CHECK(*parse_formula("!(a >= b) & c >= d") ==
        *Formula::conjunction(Formula::negation(a), c));
  CHECK(*parse_formula("a >= b & c >= d | e >= f") ==
        *Formula::disjunction(Formula::conjunction(a, c), e));
  CHECK(*parse_formula("a >= b | c >= d => e >= f") ==
        *Formula::implication(Formula::disjunction(a, c), e));
  // "=>" associates to the right.
  CHECK(*parse_formula("a >= b => c >= d => e >= f") ==
        *Formula::implication(a, Formula::implication(c, e)));
  // A certificate body is a unary formula; the conjunction stays outside.
  CHECK(*parse_formula("#k certs a >= b & c >= d") ==
        *Formula::conjunction(Formula::cert(Key{"k"}, a), c));
  CHECK(*parse_formula("#k certs (a >= b & c >= d)") ==
        *Formula::cert(Key{"k"}, Formula::conjunction(a, c)));
}

TEST_CASE("parenthesized expressions on the left of containment") {
  FormulaPtr f = parse_formula("(a . b) >= c");
  REQUIRE(f->kind() == Formula::Kind::Contains);
  CHECK(*f->sup() == *parse_expr("a . b"));
  CHECK(*parse_formula("(a) >= b") == *parse_formula("a >= b"));
}

TEST_CASE("formula rendering round trips and stays flat") {
  CHECK(render(parse_formula("!(a >= b)")) == "!(a >= b)");
  CHECK(render(parse_formula("!!(a >= b)")) == "!!(a >= b)");
  CHECK(render(parse_formula("a >= b & c >= d & e >= f")) ==
        "a >= b & c >= d & e >= f");
  CHECK(render(parse_formula("a >= b & (c >= d & e >= f)")) ==
        "a >= b & (c >= d & e >= f)");
  CHECK(render(parse_formula("#k certs a >= b")) == "#k certs (a >= b)");
}

TEST_CASE("random expressions and formulas survive a render cycle") {
  names::testing::Rng rng(20260817);
  auto keys = names::testing::key_pool(4);
  auto globals = names::testing::global_pool(2);
  auto locals = names::testing::local_pool(3);
  for (int i = 0; i < 300; ++i) {
    ExprPtr e = names::testing::random_expr(rng, keys, globals, locals, 3);
    CHECK(*parse_expr(render(e)) == *e);
    FormulaPtr f = names::testing::random_formula(rng, keys, globals, locals,
                                                  1 + rng.below(12));
    CHECK(*parse_formula(render(f)) == *f);
  }
}

TEST_CASE("error reports carry positions and kinds") {
  ParseError upper = capture([] { parse_expr("Upper"); });
  CHECK(upper.kind() == ParseErrorKind::UnexpectedToken);
  CHECK(std::string(upper.what()) ==
        "line 1, column 1: unexpected token: "
        "local names start with a lowercase letter");

  ParseError dangling = capture([] { parse_formula("a >= "); });
  CHECK(dangling.kind() == ParseErrorKind::DanglingOperator);
  CHECK(std::string(dangling.what()).find(
            "operator \">=\" is missing its operand") != std::string::npos);

  ParseError amp = capture([] { parse_formula("a >= b &"); });
  CHECK(amp.kind() == ParseErrorKind::DanglingOperator);
  CHECK(std::string(amp.what()).find("operator \"&\"") != std::string::npos);

  ParseError stray = capture([] { parse_expr("a @ b"); });
  CHECK(stray.kind() == ParseErrorKind::UnexpectedToken);
  CHECK(std::string(stray.what()).find("stray character \"@\"") !=
        std::string::npos);

  ParseError clash = capture([] { parse_formula("lampson certs a >= b"); });
  CHECK(clash.kind() == ParseErrorKind::NamespaceClash);
  CHECK(std::string(clash.what()).find("only a key may certify a formula") !=
        std::string::npos);

  ParseError hash = capture([] { parse_expr("# k"); });
  CHECK(hash.kind() == ParseErrorKind::UnexpectedToken);
  CHECK(std::string(hash.what()).find(
            "\"#\" must be followed by a key identifier") !=
        std::string::npos);

  ParseError self_key = capture([] { parse_expr("#self"); });
  CHECK(self_key.kind() == ParseErrorKind::NamespaceClash);
  CHECK(std::string(self_key.what()).find("reserved") != std::string::npos);

  ParseError trailing = capture([] { parse_expr("a b"); });
  CHECK(trailing.kind() == ParseErrorKind::UnexpectedToken);
  CHECK(std::string(trailing.what()).find("trailing input") !=
        std::string::npos);
}

TEST_CASE("world files declare keys, globals, and certificates") {
  World w = parse_world(
      "keys #k #k1 #k2 #k3\n"
      "cert #k: lampson >= #k1\n"
      "cert #k: lampson >= #k2\n"
      "cert #k1: ron >= rivest\n"
      "cert #k2: rivest >= #k3\n");
  CHECK(w.declared_keys == KeySet{Key{"k"}, Key{"k1"}, Key{"k2"}, Key{"k3"}});
  CHECK(w.certificates_of(Key{"k"}).size() == 2);
  CHECK(w.certificates_of(Key{"k1"}).size() == 1);
  CHECK(w.has_certificate(Key{"k2"}, *parse_formula("rivest >= #k3")));
  CHECK_FALSE(w.has_certificate(Key{"k2"}, *parse_formula("rivest >= #k1")));
}

TEST_CASE("world files union globals and deduplicate certificates") {
  World w = parse_world(
      "global !dns = #k1\n"
      "global !dns = #k2\n"
      "cert #k1: a >= #k3\n"
      "cert #k1: a >= #k3\n");
  CHECK(w.global_binding(GlobalName{"dns"}) == KeySet{Key{"k1"}, Key{"k2"}});
  CHECK(w.certificates_of(Key{"k1"}).size() == 1);
  // Keys mentioned anywhere become declared.
  CHECK(w.declared_keys == KeySet{Key{"k1"}, Key{"k2"}, Key{"k3"}});
}

TEST_CASE("comment lines and trailing comments are ignored") {
  World w = parse_world(
      "# a full-line comment\n"
      "   # an indented comment\n"
      "keys #k1 # a trailing comment\n"
      "keys #k2 #\n"
      "\n"
      "cert #k1: a >= #k2 # bindings\n");
  CHECK(w.declared_keys == KeySet{Key{"k1"}, Key{"k2"}});
  CHECK(w.certificates_of(Key{"k1"}).size() == 1);

  // A "#" glued to an identifier is a key token, never a comment.
  World glued = parse_world("keys #k1 #k2\n");
  CHECK(glued.declared_keys == KeySet{Key{"k1"}, Key{"k2"}});
}

TEST_CASE("world files accept carriage returns and report line numbers") {
  World w = parse_world("keys #k1\r\nkeys #k2\r\n");
  CHECK(w.declared_keys == KeySet{Key{"k1"}, Key{"k2"}});

  ParseError e = capture([] {
    parse_world(
        "keys #k1\n"
        "cert #k1: Upper >= a\n");
  });
  CHECK(e.kind() == ParseErrorKind::UnexpectedToken);
  CHECK(e.span().line == 2);
  CHECK(e.span().column == 11);
}

TEST_CASE("world files reject unknown and misplaced directives") {
  ParseError unknown = capture([] { parse_world("frobnicate #k1\n"); });
  CHECK(unknown.kind() == ParseErrorKind::UnknownDirective);
  CHECK(std::string(unknown.what()).find("unknown directive \"frobnicate\"") !=
        std::string::npos);

  // A "#" opening a line comments the whole line out, so a key can never
  // start one; a leading global name is a real error.
  CHECK(parse_world("#k1 >= #k2\n") == World{});
  ParseError bare = capture([] { parse_world("!dns >= #k2\n"); });
  CHECK(bare.kind() == ParseErrorKind::UnknownDirective);
  CHECK(std::string(bare.what()).find("starts with a directive word") !=
        std::string::npos);

  ParseError issuer = capture([] { parse_world("cert lampson: a >= b\n"); });
  CHECK(issuer.kind() == ParseErrorKind::NamespaceClash);
  CHECK(std::string(issuer.what()).find(
            "only a key may issue a certificate") != std::string::npos);

  // Assignment and viewpoint lines belong to witness documents only.
  ParseError lna = capture([] { parse_world("lna #k n = #k1\n"); });
  CHECK(lna.kind() == ParseErrorKind::UnknownDirective);
  ParseError vp = capture([] { parse_world("viewpoint #k\n"); });
  CHECK(vp.kind() == ParseErrorKind::UnknownDirective);
}

TEST_CASE("world rendering is canonical and round trips") {
  World w;
  w.declare_keys(KeySet{Key{"k2"}, Key{"k1"}});
  w.bind_global(GlobalName{"dns"}, KeySet{Key{"k1"}});
  w.add_certificate(Key{"k1"}, parse_formula("alice >= #k2"));
  CHECK(render(w) ==
        "keys #k1 #k2\n"
        "global !dns = #k1\n"
        "cert #k1: alice >= #k2\n");
  CHECK(parse_world(render(w)) == w);

  names::testing::Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    World r = names::testing::random_world(rng);
    CHECK(parse_world(render(r)) == r);
    CHECK(render(parse_world(render(r))) == render(r));
  }
}

TEST_CASE("witness documents extend world files") {
  WitnessDoc doc = parse_witness(
      "keys #k1\n"
      "lna #k1 n = #k2 #k3\n"
      "lna #k1 n = #k4\n"
      "viewpoint #k5\n");
  CHECK(doc.lna.lookup(Key{"k1"}, LocalName{"n"}) ==
        KeySet{Key{"k2"}, Key{"k3"}, Key{"k4"}});
  REQUIRE(doc.viewpoint.has_value());
  CHECK(*doc.viewpoint == Key{"k5"});
  // Keys in assignment and viewpoint lines are declared too.
  CHECK(doc.world.declared_keys == KeySet{Key{"k1"}, Key{"k2"}, Key{"k3"},
                                          Key{"k4"}, Key{"k5"}});

  WitnessDoc plain = parse_witness("keys #k1\n");
  CHECK_FALSE(plain.viewpoint.has_value());
  CHECK(plain.lna.empty());
}

TEST_CASE("witness rendering round trips") {
  World w;
  w.declare_keys(KeySet{Key{"k1"}, Key{"k2"}});
  LocalNameAssignment lna;
  lna.assign(Key{"k1"}, LocalName{"n"}, KeySet{Key{"k2"}});
  std::string text = render_witness(w, lna, Key{"k1"});
  CHECK(text ==
        "keys #k1 #k2\n"
        "lna #k1 n = #k2\n"
        "viewpoint #k1\n");
  WitnessDoc doc = parse_witness(text);
  CHECK(doc.world == w);
  CHECK(doc.lna == lna);
  CHECK(doc.viewpoint == Key{"k1"});
  CHECK(render_witness(doc.world, doc.lna, doc.viewpoint) == text);
}

TEST_CASE("witness assignment lines reject malformed input") {
  ParseError bad_local = capture([] { parse_witness("lna #k Upper = #k1\n"); });
  CHECK(bad_local.kind() == ParseErrorKind::UnexpectedToken);
  CHECK(std::string(bad_local.what()).find("expected a local name") !=
        std::string::npos);

  ParseError bad_key = capture([] { parse_witness("viewpoint dns\n"); });
  CHECK(bad_key.kind() == ParseErrorKind::UnexpectedToken);
}
