#include <catch2/catch_amalgamated.hpp>

#include "pwlmbqi/eval.hpp"
#include "pwlmbqi/mbqi.hpp"
#include "pwlmbqi/quantifiers.hpp"
#include "pwlmbqi/simplify.hpp"
#include "pwlmbqi/smtlib/parser.hpp"
#include "support.hpp"

using namespace pwlmbqi;

namespace {

TermRef parse_term_text(const std::string& decls, const std::string& term) {
  auto s = smtlib::parse_script(decls + "(assert " + term + ")");
  return s.assertions.at(0);
}

CandidateModel const_fn_model(const std::string& name, std::size_t arity, Int value) {
  CandidateModel m;
  LinearForm f = LinearForm::zero(arity);
  f.intercept = std::move(value);
  m.define(name, {arity, Sort::integer(), PwlTerm::func_leaf(arity, std::move(f))});
  return m;
}

}  // namespace

TEST_CASE("evaluate applications through the model") {
  TermRef t = parse_term_text("(declare-fun f (Int) Int)(declare-const x Int)", "(> (f x) x)");
  // the x above parses as a constant; build the variable version directly
  TermRef fx = mk_apply("f", {mk_var("x", Sort::integer())}, Sort::integer());
  TermRef gt = mk_cmp(CmpOp::Gt, fx, mk_var("x", Sort::integer()));
  (void)t;

  CandidateModel zero = const_fn_model("f", 1, 0);
  Valuation env{{"x", Int(0)}};
  CHECK_FALSE(evaluate_bool(gt, env, zero));

  CandidateModel succ;
  succ.define("f", {1, Sort::integer(),
                    PwlTerm::func_leaf(1, LinearForm{{Int(1)}, Int(1)})});
  CHECK(evaluate_bool(gt, env, succ));
}

TEST_CASE("evaluate identity and arithmetic") {
  TermRef t = mk_add({mk_var("x", Sort::integer()), mk_int(0)});
  CHECK(evaluate_int(t, {{"x", Int(7)}}) == 7);
  CHECK(evaluate_int(simplify(t), {{"x", Int(7)}}) == 7);
}

TEST_CASE("evaluate the learned equality relation") {
  CandidateModel m = testsupport::equality_model();
  TermRef r22 = mk_apply("R", {mk_int(2), mk_int(2)}, Sort::boolean());
  TermRef r23 = mk_apply("R", {mk_int(2), mk_int(3)}, Sort::boolean());
  CHECK(evaluate_bool(r22, {}, m));
  CHECK_FALSE(evaluate_bool(r23, {}, m));
}

TEST_CASE("division semantics are Euclidean and zero is an error") {
  CHECK(evaluate_int(mk_div(mk_int(-7), mk_int(2)), {}) == -4);
  CHECK(evaluate_int(mk_mod(mk_int(-7), mk_int(2)), {}) == 1);
  CHECK(evaluate_int(mk_div(mk_int(-7), mk_int(-2)), {}) == 4);
  CHECK(evaluate_int(mk_mod(mk_int(-7), mk_int(-2)), {}) == 1);
  CHECK_THROWS_AS(evaluate_int(mk_div(mk_int(1), mk_int(0)), {}), EvalError);
  // a decided disjunct shields an erroring operand
  TermRef guarded = mk_or({mk_true(), mk_cmp(CmpOp::Eq, mk_div(mk_int(1), mk_int(0)), mk_int(0))});
  CHECK(evaluate_bool(guarded, {}));
}

TEST_CASE("instantiate plugs counterexample values into binders") {
  auto s = smtlib::parse_script(
      "(declare-fun f (Int) Int)(assert (forall ((x Int)) (> (f x) x)))");
  const TermRef& q = s.assertions[0];

  TermRef i0 = instantiate(q, {{"x", Int(0)}});
  CHECK(equal(i0, parse_term_text("(declare-fun f (Int) Int)", "(> (f 0) 0)")));
  TermRef i1 = instantiate(q, {{"x", Int(1)}});
  CHECK(equal(i1, parse_term_text("(declare-fun f (Int) Int)", "(> (f 1) 1)")));

  TermRef trivially = mk_forall({{"x", Sort::integer()}}, mk_true());
  CHECK(equal(instantiate(trivially, {{"x", Int(5)}}), mk_true()));

  CHECK_THROWS_AS(instantiate(q, Valuation{}), std::invalid_argument);
}

TEST_CASE("negate_for_check pushes negation over the top connective") {
  auto s = smtlib::parse_script(
      "(declare-fun f (Int) Int)(declare-fun R (Int Int) Bool)"
      "(assert (forall ((x Int)) (> (f x) x)))"
      "(assert (forall ((x Int)) false))"
      "(assert (forall ((x Int) (y Int)) (=> (R x y) (= x y))))");

  auto [b0, n0] = negate_for_check(s.assertions[0]);
  REQUIRE(b0.size() == 1);
  CHECK(n0->kind == Kind::Cmp);
  CHECK(n0->cmp == CmpOp::Le);  // f(x) <= x

  auto [b1, n1] = negate_for_check(s.assertions[1]);
  CHECK(equal(n1, mk_true()));

  auto [b2, n2] = negate_for_check(s.assertions[2]);
  REQUIRE(b2.size() == 2);
  CHECK(n2->kind == Kind::And);
  // truth-table check of the implication negation: R(x,y) and not x=y
  CandidateModel m = testsupport::equality_model();
  for (long x = -2; x <= 2; ++x) {
    for (long y = -2; y <= 2; ++y) {
      Valuation env{{"x", Int(x)}, {"y", Int(y)}};
      bool body = evaluate_bool(s.assertions[2]->args[0], env, m);
      CHECK(evaluate_bool(n2, env, m) == !body);
    }
  }

  TermRef nested = mk_forall({{"x", Sort::integer()}},
                             mk_exists({{"y", Sort::integer()}},
                                       mk_cmp(CmpOp::Eq, mk_var("x", Sort::integer()),
                                              mk_var("y", Sort::integer()))));
  CHECK_THROWS_AS(negate_for_check(nested), std::invalid_argument);
}

TEST_CASE("substitute_model unfolds definitions") {
  TermRef fx = mk_apply("f", {mk_var("x", Sort::integer())}, Sort::integer());
  TermRef gt = mk_cmp(CmpOp::Gt, fx, mk_var("x", Sort::integer()));

  CandidateModel m;
  m.define("f", {1, Sort::integer(), PwlTerm::func_leaf(1, LinearForm{{Int(1)}, Int(2)})});
  TermRef sub = substitute_model(gt, m);
  CHECK(is_quantifier_free(sub));
  std::map<std::string, std::size_t> syms;
  collect_symbols(sub, syms);
  CHECK(syms.empty());
  // x+2 > x is a tautology after substitution
  CHECK(equal(simplify(sub), mk_true()));

  TermRef plain = mk_cmp(CmpOp::Lt, mk_var("x", Sort::integer()), mk_int(3));
  CHECK(substitute_model(plain, m).get() == plain.get());

  CandidateModel eq = testsupport::equality_model();
  TermRef r01 = mk_apply("R", {mk_int(0), mk_int(1)}, Sort::boolean());
  CHECK(equal(simplify(substitute_model(r01, eq)), mk_false()));
}

TEST_CASE("evaluate of substitute_model agrees with direct evaluation") {
  CandidateModel m = testsupport::equality_model();
  LinearForm lf{{Int(2), Int(-1)}, Int(3)};
  m.define("g", {2, Sort::integer(), PwlTerm::func_leaf(2, lf)});

  TermRef gxy = mk_apply("g", {mk_var("x", Sort::integer()), mk_var("y", Sort::integer())},
                         Sort::integer());
  TermRef rgy = mk_apply("R", {gxy, mk_var("y", Sort::integer())}, Sort::boolean());
  TermRef t = mk_or({rgy, mk_cmp(CmpOp::Le, gxy, mk_int(0))});
  TermRef sub = substitute_model(t, m);

  testsupport::Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    Valuation env{{"x", Int(rng.pick(-20, 20))}, {"y", Int(rng.pick(-20, 20))}};
    CHECK(evaluate_bool(sub, env) == evaluate_bool(t, env, m));
  }
}

TEST_CASE("simplify folds the spec examples") {
  CHECK(equal(simplify(mk_ite(mk_true(), mk_int(1), mk_int(2))), mk_int(1)));

  TermRef x = mk_var("x", Sort::integer());
  CHECK(equal(simplify(mk_cmp(CmpOp::Gt, mk_add({x, mk_int(2)}), x)), mk_true()));
  CHECK(equal(simplify(mk_cmp(CmpOp::Eq, mk_add({mk_mul_const(0, x), mk_int(3)}), mk_int(3))),
              mk_true()));
}

TEST_CASE("simplify canonicalizes comparisons") {
  TermRef x = mk_var("x", Sort::integer());
  TermRef y = mk_var("y", Sort::integer());
  // 2x < 4y  ->  x - 2y <= -1
  TermRef lt = simplify(mk_cmp(CmpOp::Lt, mk_mul_const(2, x), mk_mul_const(4, y)));
  REQUIRE(lt->kind == Kind::Cmp);
  CHECK(lt->cmp == CmpOp::Le);
  // 2x = 2y + 1 has no integer solution
  TermRef eq = simplify(mk_cmp(CmpOp::Eq, mk_mul_const(2, x),
                               mk_add({mk_mul_const(2, y), mk_int(1)})));
  CHECK(equal(eq, mk_false()));
}

TEST_CASE("simplify preserves semantics on random terms") {
  testsupport::Rng rng(20260810);
  CandidateModel m = testsupport::equality_model();

  // random small term over x,y and R
  auto rand_int_term = [&](auto&& self, int depth) -> TermRef {
    if (depth == 0 || rng.pick(0, 2) == 0) {
      switch (rng.pick(0, 2)) {
        case 0: return mk_int(rng.pick(-5, 5));
        case 1: return mk_var("x", Sort::integer());
        default: return mk_var("y", Sort::integer());
      }
    }
    switch (rng.pick(0, 3)) {
      case 0: return mk_add({self(self, depth - 1), self(self, depth - 1)});
      case 1: return mk_sub(self(self, depth - 1), self(self, depth - 1));
      case 2: return mk_neg(self(self, depth - 1));
      default: return mk_mul_const(rng.pick(-3, 3), self(self, depth - 1));
    }
  };
  auto rand_bool_term = [&](auto&& self, auto&& intgen, int depth) -> TermRef {
    if (depth == 0 || rng.pick(0, 3) == 0) {
      if (rng.pick(0, 2) == 0)
        return mk_apply("R", {intgen(intgen, 1), intgen(intgen, 1)}, Sort::boolean());
      CmpOp ops[] = {CmpOp::Eq, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
      return mk_cmp(ops[rng.pick(0, 4)], intgen(intgen, depth), intgen(intgen, depth));
    }
    switch (rng.pick(0, 3)) {
      case 0: return mk_and({self(self, intgen, depth - 1), self(self, intgen, depth - 1)});
      case 1: return mk_or({self(self, intgen, depth - 1), self(self, intgen, depth - 1)});
      case 2: return mk_not(self(self, intgen, depth - 1));
      default:
        return mk_ite(self(self, intgen, depth - 1), self(self, intgen, depth - 1),
                      self(self, intgen, depth - 1));
    }
  };

  for (int i = 0; i < 200; ++i) {
    TermRef t = rand_bool_term(rand_bool_term, rand_int_term, 3);
    TermRef s = simplify(t);
    for (int j = 0; j < 5; ++j) {
      Valuation env{{"x", Int(rng.pick(-10, 10))}, {"y", Int(rng.pick(-10, 10))}};
      REQUIRE(evaluate_bool(s, env, m) == evaluate_bool(t, env, m));
    }
  }
}

TEST_CASE("instantiate-then-evaluate equals evaluating under an extended environment") {
  auto s = smtlib::parse_script(
      "(declare-fun f (Int) Int)(assert (forall ((x Int)) (> (f x) (- x 3))))");
  const TermRef& q = s.assertions[0];
  CandidateModel m = const_fn_model("f", 1, 0);
  testsupport::Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    Int v = rng.pick(-40, 40);
    Valuation c{{"x", v}};
    CHECK(evaluate_bool(instantiate(q, c), {}, m) == evaluate_bool(q->args[0], c, m));
  }
}

TEST_CASE("prepare_assertions splits conjunctions and merges universals") {
  auto s = smtlib::parse_script(
      "(declare-fun f (Int) Int)"
      "(assert (and (> (f 0) 0) (forall ((x Int)) (forall ((y Int)) (> (f x) y)))))");
  PreparedAssertions prep;
  auto err = prepare_assertions(s.assertions, prep);
  REQUIRE(!err);
  REQUIRE(prep.ground.size() == 1);
  REQUIRE(prep.quantified.size() == 1);
  CHECK(prep.quantified[0]->binders.size() == 2);
  CHECK(is_quantifier_free(prep.quantified[0]->args[0]));

  auto bad = smtlib::parse_script(
      "(declare-fun f (Int) Int)(assert (exists ((x Int)) (> (f x) x)))");
  PreparedAssertions prep2;
  CHECK(prepare_assertions(bad.assertions, prep2).has_value());
}
