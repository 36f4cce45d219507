#include <catch2/catch_amalgamated.hpp>

#include "pwlmbqi/eval.hpp"
#include "pwlmbqi/simplify.hpp"
#include "pwlmbqi/smtlib/parser.hpp"
#include "pwlmbqi/smtlib/printer.hpp"
#include "support.hpp"

using namespace pwlmbqi;
using smtlib::parse_script;
using smtlib::ParseError;

TEST_CASE("parse a quantified UFLIA script") {
  auto s = parse_script("(declare-fun f (Int) Int)(assert (forall ((x Int)) (> (f x) x)))");
  REQUIRE(s.declarations.size() == 1);
  REQUIRE(s.declarations[0].name == "f");
  REQUIRE(s.assertions.size() == 1);
  CHECK(s.assertions[0]->kind == Kind::Forall);
  CHECK(s.assertions[0]->args[0]->kind == Kind::Cmp);
}

TEST_CASE("parse trivial assertion") {
  auto s = parse_script("(assert true)");
  REQUIRE(s.assertions.size() == 1);
  CHECK(s.assertions[0]->kind == Kind::BoolConst);
  CHECK(s.assertions[0]->bvalue);
}

TEST_CASE("parse binary relation implication") {
  auto s = parse_script(
      "(declare-fun R (Int Int) Bool)"
      "(assert (forall ((x Int) (y Int)) (=> (R x y) (= x y))))");
  REQUIRE(s.assertions.size() == 1);
  const TermRef& q = s.assertions[0];
  REQUIRE(q->kind == Kind::Forall);
  REQUIRE(q->binders.size() == 2);
  CHECK(q->args[0]->kind == Kind::Implies);
  CHECK(q->args[0]->args[0]->kind == Kind::Apply);
}

TEST_CASE("define-fun and let expand at parse time") {
  auto s = parse_script(
      "(declare-const a Int)"
      "(define-fun double ((z Int)) Int (* 2 z))"
      "(assert (let ((w (double a))) (> w a)))");
  REQUIRE(s.assertions.size() == 1);
  CHECK(is_quantifier_free(s.assertions[0]));
  // (> (* 2 a) a)
  CHECK(s.assertions[0]->kind == Kind::Cmp);
  CHECK(s.assertions[0]->args[0]->kind == Kind::MulConst);
}

TEST_CASE("macro expansion avoids capture") {
  auto s = parse_script(
      "(declare-fun p (Int) Bool)"
      "(define-fun anyp () Bool (forall ((v Int)) (p v)))"
      "(assert (forall ((v Int)) (=> (p v) anyp)))");
  REQUIRE(s.assertions.size() == 1);
}

TEST_CASE("numeric operators and chaining") {
  auto s = parse_script(
      "(declare-const a Int)(declare-const b Int)"
      "(assert (<= 0 a b))"
      "(assert (distinct a b 3))"
      "(assert (= (abs (- a)) (div b 2)))");
  REQUIRE(s.assertions.size() == 3);
  CHECK(s.assertions[0]->kind == Kind::And);
}

TEST_CASE("parse errors carry positions and kinds") {
  SECTION("syntax") {
    try {
      parse_script("(assert (> 1)\n(check-sat)");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseError::Kind::Syntax);
    }
  }
  SECTION("unsupported feature") {
    try {
      parse_script("(declare-const v (Array Int Int))");
      FAIL();
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseError::Kind::Unsupported);
    }
  }
  SECTION("nonlinear multiplication") {
    try {
      parse_script("(declare-const a Int)(assert (> (* a a) 0))");
      FAIL();
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseError::Kind::Unsupported);
      CHECK(std::string(e.what()).find("nonlinear") != std::string::npos);
    }
  }
  SECTION("sort error") {
    try {
      parse_script("(declare-const a Int)(assert (and a true))");
      FAIL();
    } catch (const ParseError& e) {
      CHECK(e.kind == ParseError::Kind::Sort);
      CHECK(e.line == 1);
    }
  }
  SECTION("double declaration") {
    CHECK_THROWS_AS(parse_script("(declare-const a Int)(declare-const a Int)"), ParseError);
  }
}

TEST_CASE("relax_sorts rewrites uninterpreted sorts to Int") {
  auto s = parse_script("(declare-sort S 0)(declare-fun f (S) S)(declare-const e S)");
  auto r = smtlib::relax_sorts(s);
  CHECK(r.declared_sorts.empty());
  REQUIRE(r.declarations.size() == 2);
  CHECK(r.declarations[0].params[0].is_int());
  CHECK(r.declarations[0].result.is_int());
  CHECK(r.declarations[1].result.is_int());

  SECTION("idempotent") {
    auto rr = smtlib::relax_sorts(r);
    CHECK(smtlib::print_script(rr) == smtlib::print_script(r));
  }
}

TEST_CASE("relax_sorts leaves pure Int/Bool scripts unchanged") {
  auto s = parse_script("(declare-fun f (Int) Int)(assert (> (f 0) 0))");
  auto r = smtlib::relax_sorts(s);
  CHECK(smtlib::print_script(r) == smtlib::print_script(s));
}

TEST_CASE("relaxed quantifier binders re-parse with only Int/Bool sorts") {
  auto s = parse_script(
      "(declare-sort S 0)(declare-fun f (S) S)"
      "(assert (forall ((x S)) (= (f x) x)))");
  auto r = smtlib::relax_sorts(s);
  auto reparsed = parse_script(smtlib::print_script(r));
  REQUIRE(reparsed.assertions.size() == 1);
  const auto& q = reparsed.assertions[0];
  for (const auto& b : q->binders) CHECK((b.sort.is_int() || b.sort.is_bool()));
}

TEST_CASE("printing round-trips structurally") {
  const char* scripts[] = {
      "(declare-fun f (Int) Int)(assert (forall ((x Int)) (> (f x) x)))(check-sat)",
      "(declare-fun R (Int Int) Bool)(declare-const c Int)"
      "(assert (forall ((x Int) (y Int)) (=> (R x y) (= x y))))"
      "(assert (R c (+ c 1)))",
      "(declare-const a Int)(assert (= (mod a 3) (- a (* 3 (div a 3)))))",
      "(assert (or false (ite true true false)))",
  };
  for (const char* text : scripts) {
    auto s1 = parse_script(text);
    auto s2 = parse_script(smtlib::print_script(s1));
    REQUIRE(s1.assertions.size() == s2.assertions.size());
    for (std::size_t i = 0; i < s1.assertions.size(); ++i)
      CHECK(equal(s1.assertions[i], s2.assertions[i]));
    // parse . print is stable from the first print on
    CHECK(smtlib::print_script(s2) == smtlib::print_script(s1));
  }
}

TEST_CASE("print linear form and model") {
  LinearForm f;
  f.slopes = {Int(1)};
  f.intercept = 2;
  CHECK(smtlib::print_term(linear_form_to_term(f)) == "(+ x0 2)");

  CandidateModel m;
  m.define("f", {1, Sort::integer(), PwlTerm::func_leaf(1, f)});
  m.define("p", {0, Sort::boolean(), PwlTerm::bool_leaf(0, false)});
  std::string text = smtlib::print_model(m);
  CHECK(text.find("(define-fun f ((x0 Int)) Int (+ x0 2))") != std::string::npos);
  CHECK(text.find("(define-fun p () Bool false)") != std::string::npos);
}

TEST_CASE("printed model re-parses and type-checks against declarations") {
  auto original = parse_script("(declare-fun f (Int) Int)(declare-fun R (Int Int) Bool)");
  CandidateModel m = testsupport::equality_model();
  LinearForm f;
  f.slopes = {Int(1)};
  f.intercept = 2;
  m.define("f", {1, Sort::integer(), PwlTerm::func_leaf(1, f)});

  std::string text = smtlib::print_model(m);
  std::string body = text.substr(text.find('\n') + 1);
  body = body.substr(0, body.rfind(')'));
  auto reparsed = parse_script(body);
  REQUIRE(reparsed.defined.size() == 2);
  for (const auto& def : reparsed.defined) {
    const smtlib::FunDecl* decl = original.find_decl(def.name);
    REQUIRE(decl != nullptr);
    REQUIRE(decl->params.size() == def.params.size());
    for (std::size_t i = 0; i < def.params.size(); ++i)
      CHECK(decl->params[i] == def.params[i].sort);
    CHECK(decl->result == def.result);
  }
}

TEST_CASE("unknown logic is accepted with a warning") {
  auto s = parse_script("(set-logic QF_WEIRD)(assert true)");
  REQUIRE(s.warnings.size() == 1);
  CHECK(s.logic == "QF_WEIRD");
}

TEST_CASE("metadata is recorded and ignored") {
  auto s = parse_script("(set-info :status sat)(set-info :source \"hand built\")(assert true)");
  REQUIRE(s.metadata.size() == 2);
  CHECK(s.metadata[0].first == "status");
}

TEST_CASE("integer literals are arbitrary precision") {
  std::string big = "123456789012345678901234567890123456789";
  auto s = parse_script("(declare-const a Int)(assert (> a " + big + "))");
  const TermRef& cmp = s.assertions[0];
  CHECK(cmp->args[1]->value == Int(big));
  auto reparsed = parse_script(smtlib::print_script(s));
  CHECK(equal(reparsed.assertions[0], cmp));
  // coefficients survive arithmetic without truncation
  TermRef doubled = simplify(mk_add({cmp->args[1], cmp->args[1]}));
  CHECK(doubled->value == Int(big) * 2);
}

TEST_CASE("unknown symbols are reported") {
  try {
    parse_script("(assert (forall ((x Int)) (> (f x) x)))");
    FAIL();
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unknown symbol f") != std::string::npos);
  }
}
