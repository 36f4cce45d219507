#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pwlmbqi/eval.hpp"
#include "pwlmbqi/ground_solver.hpp"
#include "pwlmbqi/model.hpp"
#include "pwlmbqi/pwl_fit.hpp"
#include "pwlmbqi/quantifiers.hpp"
#include "pwlmbqi/simplify.hpp"
#include "pwlmbqi/smtlib/parser.hpp"
#include "pwlmbqi/smtlib/printer.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

enum class Mode { Smart, NonSmart, Off };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Smart: return "smart";
    case Mode::NonSmart: return "non-smart";
    case Mode::Off: return "off";
  }
  return "?";
}

struct Config {
  Mode mode = Mode::Smart;
  long max_iters = 500;
  double timeout_seconds = 30.0;  // <= 0 disables the deadline
  std::vector<Int> box_schedule{Int(8), Int(64), Int(1024)};
  long node_budget = 50000;
  long max_theory_rounds = 20000;
  bool verify_models = true;
  bool greedy_stop_on_first_unsat = true;
  std::string external_solver;  // harness-only
  unsigned seed = 1;            // test generators only; solving is deterministic
};

struct IterationRecord {
  std::map<std::string, std::string> candidate;              // symbol -> printed body
  std::vector<std::pair<std::size_t, Valuation>> counterexamples;  // assertion index, values
};

struct SolveStats {
  long iterations = 0;
  long instantiations = 0;
  long fit_invocations = 0;
  double seconds = 0.0;
  std::vector<IterationRecord> trace;
};

struct SolveResult {
  enum class Verdict { Sat, Unsat, Unknown, ResourceOut };
  Verdict verdict = Verdict::Unknown;
  CandidateModel model;              // Sat
  std::vector<TermRef> certificate;  // Unsat: the instantiations added
  std::string reason;
  SolveStats stats;
};

inline const char* verdict_text(SolveResult::Verdict v) {
  switch (v) {
    case SolveResult::Verdict::Sat: return "sat";
    case SolveResult::Verdict::Unsat: return "unsat";
    default: return "unknown";
  }
}

// Unfold every uninterpreted application through its piecewise-linear
// definition; the result is pure linear arithmetic over the input's
// variables.
inline TermRef substitute_model(const TermRef& t, const CandidateModel& m) {
  if (t->kind == Kind::Apply) {
    std::vector<TermRef> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) args.push_back(substitute_model(a, m));
    const CandidateModel::Def& def = m.at(t->name);
    TermRef body = pwl_to_term(def.body);
    std::map<std::string, TermRef> subst;
    for (std::size_t i = 0; i < args.size(); ++i) subst[param_name(i)] = args[i];
    return substitute(body, subst);
  }
  bool changed = false;
  std::vector<TermRef> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) {
    args.push_back(substitute_model(a, m));
    changed |= args.back().get() != a.get();
  }
  if (!changed) return t;
  auto n = std::make_shared<TermNode>(t->kind, t->sort);
  n->value = t->value;
  n->bvalue = t->bvalue;
  n->name = t->name;
  n->cmp = t->cmp;
  n->args = std::move(args);
  n->binders = t->binders;
  return detail::finish(std::move(n));
}

// The MBQI main loop: ground solving, candidate-model learning,
// counterexample checking, and instantiation strengthening.
class MbqiEngine {
 public:
  explicit MbqiEngine(Config cfg = {}) : cfg_(std::move(cfg)) {
    if (cfg_.timeout_seconds > 0) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::microseconds(
                      static_cast<long long>(cfg_.timeout_seconds * 1e6));
    }
  }

  SolveResult solve(const smtlib::Script& input) {
    auto t0 = std::chrono::steady_clock::now();
    SolveResult res = solve_inner(input);
    res.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  }

  // Per-symbol fitting of the ground model's function points. mode=off
  // reproduces plain value-table MBQI; symbols without points default to
  // the constant 0 / false interpretation.
  CandidateModel build_candidate(const GroundModel& gm, const std::vector<smtlib::FunDecl>& decls,
                                 Mode mode, SolveStats* stats = nullptr) const {
    CandidateModel m;
    for (const auto& d : decls) {
      std::size_t n = d.params.size();
      CandidateModel::Def def;
      def.arity = n;
      def.result = d.result;
      if (n == 0) {
        auto it = gm.consts.find(d.name);
        if (d.result.is_bool()) {
          def.body = PwlTerm::bool_leaf(0, it != gm.consts.end() && value_bool(it->second));
        } else {
          LinearForm f;
          f.intercept = it != gm.consts.end() ? value_int(it->second) : Int(0);
          def.body = PwlTerm::func_leaf(0, std::move(f));
        }
        m.define(d.name, std::move(def));
        continue;
      }
      std::vector<FunctionPoint> pts = GroundSolver::extract_points(gm, d.name);
      if (pts.empty()) {
        def.body = d.result.is_bool() ? PwlTerm::bool_leaf(n, false)
                                      : PwlTerm::func_leaf(n, LinearForm::zero(n));
        m.define(d.name, std::move(def));
        continue;
      }
      if (stats) ++stats->fit_invocations;
      FitOptions fit;
      fit.greedy_stop_on_first_unsat = cfg_.greedy_stop_on_first_unsat;
      fit.feas.box_schedule = cfg_.box_schedule;
      fit.feas.node_budget = cfg_.node_budget;
      fit.feas.deadline = deadline_;
      if (mode == Mode::Off) {
        def.body = value_table(pts, n, d.result.is_bool());
      } else if (!d.result.is_bool()) {
        def.body = fit_function(pts, n);
      } else if (mode == Mode::Smart) {
        def.body = fit_predicate_recursive(pts, n, fit);
      } else {
        def.body = fit_predicate_greedy(pts, n, fit);
      }
      m.define(d.name, std::move(def));
    }
    return m;
  }

  // Check one universal against the candidate: substitute the model into the
  // negated body and solve it as ground linear arithmetic with the binders
  // free. A model restricted to the binders is the counterexample.
  std::optional<Valuation> find_counterexample(const CandidateModel& m, const TermRef& q,
                                               GroundResult::Verdict* verdict_out = nullptr) {
    auto [binders, neg] = negate_for_check(q);
    TermRef grounded = simplify(substitute_model(neg, m));
    GroundSolver solver(ground_options());
    GroundResult r = solver.check({grounded});
    if (verdict_out) *verdict_out = r.verdict;
    if (r.verdict != GroundResult::Verdict::Sat) return std::nullopt;
    Valuation ce;
    for (const auto& b : binders) {
      auto it = r.model.consts.find(b.name);
      if (it != r.model.consts.end()) {
        ce[b.name] = it->second;
      } else {
        ce[b.name] = b.sort.is_bool() ? Value(false) : Value(Int(0));
      }
    }
    polish_counterexample(ce, binders, neg, m);
    return ce;
  }

 private:
  SolveResult solve_inner(const smtlib::Script& input) {
    SolveResult res;
    smtlib::Script script = smtlib::relax_sorts(input);

    PreparedAssertions prep;
    std::vector<TermRef> simplified;
    simplified.reserve(script.assertions.size());
    for (const auto& a : script.assertions) simplified.push_back(simplify(a));
    if (auto err = prepare_assertions(simplified, prep)) {
      res.verdict = SolveResult::Verdict::Unknown;
      res.reason = *err;
      return res;
    }

    std::vector<TermRef> ground = prep.ground;
    std::vector<TermRef> instantiations;
    std::set<std::pair<std::size_t, std::string>> seen_ce;

    for (long iter = 0; iter < cfg_.max_iters; ++iter) {
      if (deadline_passed(deadline_)) {
        res.verdict = SolveResult::Verdict::ResourceOut;
        res.reason = "timeout";
        return res;
      }
      res.stats.iterations = iter + 1;

      std::vector<TermRef> phi_g = ground;
      phi_g.insert(phi_g.end(), instantiations.begin(), instantiations.end());
      GroundSolver solver(ground_options());
      GroundResult g = solver.check(phi_g);
      if (g.verdict == GroundResult::Verdict::Unsat) {
        res.verdict = SolveResult::Verdict::Unsat;
        res.certificate = instantiations;
        return res;
      }
      if (g.verdict == GroundResult::Verdict::Unknown) {
        res.verdict = g.reason.find("deadline") != std::string::npos
                          ? SolveResult::Verdict::ResourceOut
                          : SolveResult::Verdict::Unknown;
        res.reason = "ground solver: " + g.reason;
        return res;
      }

      CandidateModel cand = build_candidate(g.model, script.declarations, cfg_.mode, &res.stats);
      IterationRecord rec;
      for (const auto& [name, def] : cand.defs())
        rec.candidate[name] = smtlib::print_term(pwl_to_term(def.body));

      bool inconclusive = false;
      for (std::size_t qi = 0; qi < prep.quantified.size(); ++qi) {
        GroundResult::Verdict v;
        auto ce = find_counterexample(cand, prep.quantified[qi], &v);
        if (deadline_passed(deadline_)) {
          res.verdict = SolveResult::Verdict::ResourceOut;
          res.reason = "timeout";
          res.stats.trace.push_back(std::move(rec));
          return res;
        }
        if (ce) {
          rec.counterexamples.emplace_back(qi, *ce);
        } else if (v == GroundResult::Verdict::Unknown) {
          inconclusive = true;
        }
      }
      res.stats.trace.push_back(rec);

      if (rec.counterexamples.empty()) {
        if (inconclusive) {
          res.verdict = SolveResult::Verdict::Unknown;
          res.reason = "counterexample check inconclusive";
          return res;
        }
        if (cfg_.verify_models && !reverify(cand, prep.quantified)) {
          throw std::logic_error("internal error: sat model failed symbolic re-verification");
        }
        res.verdict = SolveResult::Verdict::Sat;
        res.model = std::move(cand);
        return res;
      }

      for (const auto& [qi, ce] : rec.counterexamples) {
        std::string key;
        for (const auto& [name, val] : ce)
          key += name + "=" + (value_is_int(val) ? value_int(val).str()
                                                 : std::string(value_bool(val) ? "T" : "F")) + ";";
        if (!seen_ce.emplace(qi, key).second)
          throw std::logic_error("internal error: repeated instantiation " + key);
        TermRef inst = simplify(instantiate(prep.quantified[qi], ce));
        instantiations.push_back(inst);
        ++res.stats.instantiations;
      }
    }
    res.verdict = SolveResult::Verdict::Unknown;
    res.reason = "iteration limit";
    return res;
  }

  GroundOptions ground_options() const {
    GroundOptions o;
    o.feas.box_schedule = cfg_.box_schedule;
    o.feas.node_budget = cfg_.node_budget;
    o.feas.deadline = deadline_;
    o.max_theory_rounds = cfg_.max_theory_rounds;
    o.verify_model = cfg_.verify_models;
    o.deadline = deadline_;
    return o;
  }

  bool reverify(const CandidateModel& m, const std::vector<TermRef>& quantified) {
    for (const auto& q : quantified) {
      auto [binders, neg] = negate_for_check(q);
      (void)binders;
      TermRef grounded = simplify(substitute_model(neg, m));
      GroundSolver solver(ground_options());
      if (solver.check({grounded}).verdict != GroundResult::Verdict::Unsat) return false;
    }
    return true;
  }

  // Deterministically walk each counterexample coordinate toward zero while
  // the negated body stays satisfied; keeps instantiation values small and
  // traces reproducible.
  void polish_counterexample(Valuation& ce, const std::vector<Binder>& binders,
                             const TermRef& neg, const CandidateModel& m) const {
    auto holds = [&](const Valuation& env) {
      try {
        return evaluate_bool(neg, env, m);
      } catch (const EvalError&) {
        return false;
      }
    };
    if (!holds(ce)) return;  // div-by-zero style cases: leave untouched
    for (int pass = 0; pass < 4; ++pass) {
      bool changed = false;
      for (const auto& b : binders) {
        Value& cur = ce[b.name];
        if (!value_is_int(cur)) {
          if (value_bool(cur)) {
            Valuation trial = ce;
            trial[b.name] = false;
            if (holds(trial)) {
              cur = false;
              changed = true;
            }
          }
          continue;
        }
        Int best = value_int(cur);
        Int magnitude = abs(best);
        int budget = 64;
        for (Int cand = 0; cand < magnitude && budget > 0; ++cand) {
          bool found = false;
          for (int sign = 0; sign < 2 && budget > 0; ++sign) {
            if (cand == 0 && sign == 1) break;
            --budget;
            Int val = sign == 0 ? cand : -cand;
            Valuation trial = ce;
            trial[b.name] = val;
            if (holds(trial)) {
              best = val;
              found = true;
              break;
            }
          }
          if (found) break;
        }
        if (best != value_int(cur)) {
          cur = best;
          changed = true;
        }
      }
      if (!changed) break;
    }
  }

  static PwlTerm value_table(const std::vector<FunctionPoint>& pts, std::size_t arity,
                             bool boolean) {
    PwlTerm acc = boolean ? PwlTerm::bool_leaf(arity, false)
                          : PwlTerm::func_leaf(arity, LinearForm::zero(arity));
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      std::vector<TermRef> conj;
      for (std::size_t i = 0; i < arity; ++i)
        conj.push_back(mk_cmp(CmpOp::Eq, param_var(i), mk_int(it->args[i])));
      PwlTerm leaf = boolean ? PwlTerm::bool_leaf(arity, value_bool(it->value))
                             : PwlTerm::func_leaf(arity, LinearForm{std::vector<Int>(arity, Int(0)),
                                                                    value_int(it->value)});
      acc = PwlTerm::ite(mk_and(std::move(conj)), std::move(leaf), std::move(acc));
    }
    return acc;
  }

  Config cfg_;
  Deadline deadline_;
};

}  // namespace pwlmbqi
