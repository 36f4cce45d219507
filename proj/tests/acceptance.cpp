// Acceptance suite: runs each top-level criterion and prints one PASS/FAIL
// line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pwlmbqi/bench.hpp"
#include "pwlmbqi/diophantine.hpp"
#include "pwlmbqi/eval.hpp"
#include "pwlmbqi/fragmenter.hpp"
#include "pwlmbqi/int_feasibility.hpp"
#include "pwlmbqi/mbqi.hpp"
#include "pwlmbqi/pwl_fit.hpp"
#include "pwlmbqi/smtlib/parser.hpp"
#include "pwlmbqi/smtlib/printer.hpp"
#include "support.hpp"

using namespace pwlmbqi;
using testsupport::Rng;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& note = "") {
  std::cout << (ok ? "PASS" : "FAIL") << ": criterion " << number << " - " << name;
  if (!note.empty()) std::cout << " (" << note << ")";
  std::cout << std::endl;
  if (!ok) ++failures;
}

std::string corpus_dir() {
  const char* env = std::getenv("PWLMBQI_CORPUS");
  return env ? env : "corpus";
}

Config base_config(Mode mode, long iters = 500, double timeout = 30.0) {
  Config cfg;
  cfg.mode = mode;
  cfg.max_iters = iters;
  cfg.timeout_seconds = timeout;
  return cfg;
}

smtlib::Script load(const std::string& name) {
  std::ifstream in(std::filesystem::path(corpus_dir()) / name);
  std::stringstream buf;
  buf << in.rdbuf();
  return smtlib::parse_script(buf.str());
}

bool reverify_sat(const smtlib::Script& script, const CandidateModel& m) {
  std::vector<TermRef> simplified;
  for (const auto& a : script.assertions) simplified.push_back(simplify(a));
  PreparedAssertions prep;
  if (prepare_assertions(simplified, prep)) return false;
  for (const auto& g : prep.ground) {
    TermRef sub = simplify(substitute_model(g, m));
    GroundSolver solver{};
    if (solver.check({sub}).verdict != GroundResult::Verdict::Sat) return false;
  }
  for (const auto& q : prep.quantified) {
    auto [binders, neg] = negate_for_check(q);
    (void)binders;
    TermRef sub = simplify(substitute_model(neg, m));
    GroundSolver solver{};
    if (solver.check({sub}).verdict != GroundResult::Verdict::Unsat) return false;
  }
  return true;
}

void criterion1() {
  bool ok = true;
  std::string note;
  smtlib::Script script = load("01_forall_gt.smt2");
  for (Mode mode : {Mode::Smart, Mode::NonSmart}) {
    auto t0 = std::chrono::steady_clock::now();
    MbqiEngine engine(base_config(mode));
    SolveResult r = engine.solve(script);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r.verdict != SolveResult::Verdict::Sat) ok = false;
    if (r.stats.iterations > 10) ok = false;
    if (secs >= 1.0) ok = false;
    if (ok) {
      for (long a = -100; a <= 100; ++a)
        if (!(value_int(apply_model(r.model, "f", {Int(a)})) > a)) ok = false;
      if (!reverify_sat(script, r.model)) ok = false;
    }
  }
  // value-table mode diverges with the 0,1,2,... counterexample trace
  MbqiEngine off(base_config(Mode::Off, 20));
  SolveResult r = off.solve(script);
  if (r.verdict != SolveResult::Verdict::Unknown || r.stats.iterations != 20) ok = false;
  if (r.stats.trace.size() != 20) {
    ok = false;
  } else {
    for (std::size_t k = 0; k < 20; ++k) {
      const auto& ces = r.stats.trace[k].counterexamples;
      if (ces.size() != 1 || !(value_int(ces[0].second.at("x")) == Int(k))) ok = false;
    }
  }
  report(1, "golden sat: forall x. f(x) > x", ok);
}

void criterion2() {
  bool ok = true;
  std::string note;
  smtlib::Script script = load("02_equality_relation.smt2");
  auto t0 = std::chrono::steady_clock::now();
  MbqiEngine engine(base_config(Mode::Smart));
  SolveResult r = engine.solve(script);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.verdict != SolveResult::Verdict::Sat || secs >= 5.0) ok = false;
  if (ok) {
    for (long x = -10; x <= 10 && ok; ++x)
      for (long y = -10; y <= 10; ++y)
        if (value_bool(apply_model(r.model, "R", {Int(x), Int(y)})) != (x == y)) {
          ok = false;
          break;
        }
  }
  MbqiEngine nonsmart(base_config(Mode::NonSmart, 60, 10.0));
  SolveResult rn = nonsmart.solve(script);
  note = std::string("non-smart observed: ") + verdict_text(rn.verdict);
  if (rn.verdict == SolveResult::Verdict::Sat) {
    for (long x = -10; x <= 10 && ok; ++x)
      for (long y = -10; y <= 10; ++y)
        if (value_bool(apply_model(rn.model, "R", {Int(x), Int(y)})) != (x == y)) {
          ok = false;
          break;
        }
  }
  report(2, "golden sat: equality axioms define R", ok, note);
}

void criterion3() {
  std::vector<FunctionPoint> pts = {
      {{Int(0), Int(0)}, true},   {{Int(1), Int(1)}, true},  {{Int(-1), Int(-1)}, true},
      {{Int(-1), Int(0)}, false}, {{Int(0), Int(1)}, false}, {{Int(1), Int(0)}, false},
      {{Int(1), Int(2)}, false},
  };
  PwlTerm fit = fit_predicate_recursive(pts, 2);
  bool ok = true;
  for (const auto& p : pts)
    if (!(eval_pwl(fit, p.args) == p.value)) ok = false;
  // golden shape: ITE(x-y>=0, ITE(-x+y>=0, true, false), false)
  bool shape = fit.node == PwlTerm::Node::Ite &&
               smtlib::print_term(fit.cond) == "(>= (+ x0 (- x1)) 0)" &&
               fit.else_branch->node == PwlTerm::Node::BoolLeaf && !fit.else_branch->bval &&
               fit.then_branch->node == PwlTerm::Node::Ite &&
               smtlib::print_term(fit.then_branch->cond) == "(>= (+ (- x0) x1) 0)" &&
               fit.then_branch->then_branch->bval && !fit.then_branch->else_branch->bval;
  report(3, "recursive fit reproduces the two-halfspace tree", ok && shape);
}

void criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(20260810);
  bool ok = true;
  int cases = 0;
  for (int iter = 0; iter < 200 && ok; ++iter) {
    std::size_t n = static_cast<std::size_t>(rng.pick(1, 3));
    auto ipts = testsupport::random_points(rng, n, 40, false);
    PwlTerm f = fit_function(ipts, n);
    for (const auto& p : ipts)
      if (!(eval_pwl(f, p.args) == p.value)) ok = false;

    auto bpts = testsupport::random_points(rng, n, 40, true);
    PwlTerm rec = fit_predicate_recursive(bpts, n);
    PwlTerm gre = fit_predicate_greedy(bpts, n);
    for (const auto& p : bpts) {
      if (!(eval_pwl(rec, p.args) == p.value)) ok = false;
      if (!(eval_pwl(gre, p.args) == p.value)) ok = false;
    }
    ++cases;
  }
  // totality off-sample
  auto ipts = testsupport::random_points(rng, 2, 30, false);
  auto bpts = testsupport::random_points(rng, 2, 30, true);
  PwlTerm f = fit_function(ipts, 2);
  PwlTerm rec = fit_predicate_recursive(bpts, 2);
  PwlTerm gre = fit_predicate_greedy(bpts, 2);
  for (int i = 0; i < 1000 && ok; ++i) {
    std::vector<Int> at{Int(rng.pick(-500, 500)), Int(rng.pick(-500, 500))};
    try {
      eval_pwl_int(f, at);
      eval_pwl_bool(rec, at);
      eval_pwl_bool(gre, at);
    } catch (...) {
      ok = false;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 30.0) ok = false;
  report(4, "fitter exactness and totality properties", ok && cases == 200,
         std::to_string(secs).substr(0, 4) + "s");
}

void criterion5() {
  Rng rng(2026);
  bool ok = true;
  for (int iter = 0; iter < 500 && ok; ++iter) {
    std::size_t n = static_cast<std::size_t>(rng.pick(1, 3));
    std::size_t rows = static_cast<std::size_t>(rng.pick(0, 5));
    EquationSystem sys(n);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<Int> a(n);
      for (auto& x : a) x = rng.pick(-5, 5);
      sys = sys.push_equation(a, rng.pick(-5, 5));
    }
    auto oracle = testsupport::dio_oracle(sys.equations(), n, 50);
    if (oracle && !sys.is_sat()) ok = false;
    if (sys.is_sat()) {
      auto [s, c] = sys.solve();
      for (const auto& [a, v] : sys.equations()) {
        Int lhs = c;
        for (std::size_t i = 0; i < n; ++i) lhs += a[i] * s[i];
        if (lhs != v) ok = false;
      }
    }
  }
  report(5, "diophantine solver agrees with brute force", ok);
}

void criterion6() {
  Rng rng(77);
  bool ok = true;
  for (int iter = 0; iter < 300 && ok; ++iter) {
    std::size_t n = static_cast<std::size_t>(rng.pick(1, 3));
    std::size_t rows = static_cast<std::size_t>(rng.pick(0, 6));
    InequalitySystem sys(n);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<Int> a(n);
      for (auto& x : a) x = rng.pick(-4, 4);
      sys = sys.push_ineq(a, rng.coin());
    }
    auto oracle = testsupport::ineq_oracle(sys.rows(), n, 20);
    if (oracle && !sys.is_sat()) ok = false;
    if (!oracle && !sys.is_sat() && sys.status() != IntFeasResult::Status::UnsatExact) ok = false;
    if (sys.is_sat()) {
      auto [s, c] = sys.solve();
      if (!sys.witness_ok(s, c)) ok = false;
    }
  }
  report(6, "integer feasibility agrees with brute force", ok);
}

void criterion7() {
  bool ok = true;
  int unsats = 0, sats = 0;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() != ".smt2") continue;
    smtlib::Script script = smtlib::parse_script([&] {
      std::ifstream in(entry.path());
      std::stringstream buf;
      buf << in.rdbuf();
      return buf.str();
    }());
    for (Mode mode : {Mode::Smart, Mode::NonSmart, Mode::Off}) {
      MbqiEngine engine(base_config(mode, 30, 10.0));
      SolveResult r = engine.solve(script);
      if (r.verdict == SolveResult::Verdict::Unsat) {
        ++unsats;
        // replay: relaxed ground assertions plus the certificate
        smtlib::Script relaxed = smtlib::relax_sorts(script);
        PreparedAssertions prep;
        std::vector<TermRef> simplified;
        for (const auto& a : relaxed.assertions) simplified.push_back(simplify(a));
        if (prepare_assertions(simplified, prep)) {
          ok = false;
          continue;
        }
        std::vector<TermRef> replay = prep.ground;
        for (const auto& inst : r.certificate) replay.push_back(inst);
        GroundSolver solver{};
        if (solver.check(replay).verdict != GroundResult::Verdict::Unsat) ok = false;
      } else if (r.verdict == SolveResult::Verdict::Sat) {
        ++sats;
        if (!reverify_sat(script, r.model)) ok = false;
      }
    }
  }
  report(7, "unsat certificates replay and sat models re-verify", ok,
         std::to_string(sats) + " sat / " + std::to_string(unsats) + " unsat runs");
}

void criterion8() {
  smtlib::Script s = smtlib::parse_script(
      "(set-logic UFLIA)"
      "(declare-sort S 0)"
      "(declare-fun f (Int) Int)"
      "(declare-fun g (Int Int) Int)"
      "(declare-fun h (Int) Bool)"
      "(declare-const c Int)"
      "(assert (forall ((x Int)) (> (f x) x)))"
      "(assert (forall ((x Int)) (=> (h x) (= (f x) c))))"
      "(assert (forall ((x Int) (y Int)) (>= (g x y) (f x))))"
      "(assert (> (g c c) 0))"
      "(assert (> c 5))");
  // expected keep pattern per 2-subset over assertions A1..A5
  // A1: f   A2: f,h   A3: f,g   A4: g   A5: none
  struct Expect {
    std::vector<std::string> symbols;
    std::vector<int> kept;  // 1-based assertion numbers
  };
  std::vector<Expect> expected_table = {
      {{"f", "g"}, {1, 3, 4}},
      {{"f", "h"}, {1, 2}},
      {{"g", "h"}, {4}},
  };
  auto frags = enumerate_fragments(s, 2);
  bool ok = frags.size() == 3;
  for (std::size_t i = 0; i < frags.size() && ok; ++i) {
    if (frags[i].first != expected_table[i].symbols) ok = false;
    std::vector<TermRef> expected;
    for (int idx : expected_table[i].kept)
      expected.push_back(smtlib::relax_sorts(s).assertions[idx - 1]);
    if (frags[i].second.assertions.size() != expected.size()) {
      ok = false;
      break;
    }
    for (std::size_t j = 0; j < expected.size(); ++j)
      if (!equal(frags[i].second.assertions[j], expected[j])) ok = false;
    // outputs re-parse with only Int/Bool sorts
    auto reparsed = smtlib::parse_script(smtlib::print_script(frags[i].second));
    for (const auto& d : reparsed.declarations) {
      for (const auto& p : d.params)
        if (!p.is_int() && !p.is_bool()) ok = false;
      if (!d.result.is_int() && !d.result.is_bool()) ok = false;
    }
  }
  report(8, "fragment generator matches the keep/drop table", ok);
}

void criterion9() {
  const char* ext = std::getenv("PWLMBQI_EXTERNAL_SOLVER");
  if (!ext || std::string(ext).empty()) {
    report(9, "differential fuzzing", true, "skipped: no external solver configured");
    return;
  }
  Rng rng(99);
  bool ok = true;
  int mismatches = 0;
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "pwlmbqi_fuzz";
  std::filesystem::create_directories(dir);
  for (int i = 0; i < 200; ++i) {
    Rng g(static_cast<unsigned>(i + 1));
    std::string text =
        "(set-logic QF_UFLIA)(declare-const a Int)(declare-const b Int)"
        "(declare-fun f (Int) Int)";
    const char* terms[] = {"a", "b", "(+ a b)", "(f a)", "(f b)", "(- a 2)", "(f (f a))"};
    const char* rels[] = {"=", "<", "<=", ">", ">="};
    int count = static_cast<int>(g.pick(1, 4));
    for (int j = 0; j < count; ++j) {
      std::string atom = "(" + std::string(rels[g.pick(0, 4)]) + " " + terms[g.pick(0, 6)] + " " +
                         std::to_string(g.pick(-4, 4)) + ")";
      if (g.coin()) atom = "(not " + atom + ")";
      text += "(assert " + atom + ")";
    }
    text += "(check-sat)";
    std::string path = (dir / ("fuzz" + std::to_string(i) + ".smt2")).string();
    std::ofstream(path) << text;
    DiffReport rep = diff_against_external(path, base_config(Mode::Smart, 50, 5.0), ext);
    if (rep.outcome == DiffReport::Outcome::Mismatch) {
      ok = false;
      ++mismatches;
    }
  }
  report(9, "differential fuzzing against external solver", ok,
         std::to_string(mismatches) + " mismatches");
}

void criterion10() {
  std::vector<std::string> problems;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir()))
    if (entry.path().extension() == ".smt2") problems.push_back(entry.path().string());
  std::sort(problems.begin(), problems.end());
  bool ok = problems.size() == 10;

  std::vector<Mode> modes{Mode::Smart, Mode::NonSmart, Mode::Off};
  Config cfg = base_config(Mode::Smart, 30, 10.0);
  auto records = run_bench(problems, cfg, modes, 0);
  std::string table = bench_markdown(records, modes);
  std::cout << table;
  if (table.find("| solver | solved: SAT | solved: UNSAT | solved: total |") == std::string::npos)
    ok = false;

  auto total = [&](Mode m) {
    long n = 0;
    for (const auto& r : records)
      if (r.mode == mode_name(m) && (r.verdict == "sat" || r.verdict == "unsat")) ++n;
    return n;
  };
  long smart = total(Mode::Smart), nonsmart = total(Mode::NonSmart), off = total(Mode::Off);
  if (!(smart >= nonsmart && nonsmart >= off)) ok = false;
  report(10, "bench table layout and solved ordering", ok,
         "smart=" + std::to_string(smart) + " non-smart=" + std::to_string(nonsmart) +
             " off=" + std::to_string(off));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (failures) {
    std::cout << failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
