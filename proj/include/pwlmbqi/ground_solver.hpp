#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pwlmbqi/congruence.hpp"
#include "pwlmbqi/eval.hpp"
#include "pwlmbqi/linear.hpp"
#include "pwlmbqi/model.hpp"
#include "pwlmbqi/simplex.hpp"
#include "pwlmbqi/simplify.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

struct GroundResult {
  enum class Verdict { Sat, Unsat, Unknown };
  Verdict verdict = Verdict::Unknown;
  GroundModel model;
  std::string reason;
};

struct GroundOptions {
  IntFeasOptions feas;
  long max_theory_rounds = 20000;
  bool verify_model = true;
  Deadline deadline;
};

// Decision procedure for quantifier-free UFLIA conjunctions: boolean
// abstraction with a small DPLL search on top of congruence closure for the
// uninterpreted applications and the simplex/branch-and-bound integer core
// for arithmetic. Equalities flow between the two theories Nelson-Oppen
// style: congruence-derived equalities become arithmetic rows, and model
// equalities between argument tuples are either confirmed entailed (then
// propagated) or the arithmetic model is nudged to distinct values.
//
// Sat models are evaluated against the input before being returned; Unsat
// is reported only when every step on the path was exact. Anything bounded
// (feasibility box, budgets, deadline) degrades to Unknown.
class GroundSolver {
 public:
  explicit GroundSolver(GroundOptions opt = {}) : opt_(std::move(opt)) {}

  GroundResult check(const std::vector<TermRef>& assertions) {
    reset();
    GroundResult out;
    try {
      collect_used_names(assertions);
      std::vector<TermRef> work;
      for (const auto& a : assertions) {
        if (!is_quantifier_free(a)) throw Unsupported("non-ground assertion");
        work.push_back(simplify(a));
      }
      std::vector<TermRef> flat;
      for (const auto& a : work) {
        TermRef stripped = strip(a, flat);
        flat.push_back(stripped);
      }

      for (const auto& a : flat) {
        int lit = tseitin(a);
        clauses_.push_back({lit});
      }
      clauses_.push_back({lit_true()});
      emit_family_lemmas();

      // verification runs on the simplified assertions: simplification is
      // semantics-preserving and applications erased by it are unconstrained
      return search(work);
    } catch (const Unsupported& u) {
      out.verdict = GroundResult::Verdict::Unknown;
      out.reason = u.what();
      return out;
    }
  }

  // all applied instances of `symbol` in a model, deduplicated
  static std::vector<FunctionPoint> extract_points(const GroundModel& m,
                                                   const std::string& symbol) {
    auto it = m.points.find(symbol);
    if (it == m.points.end()) return {};
    std::vector<FunctionPoint> pts = it->second;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const FunctionPoint& a, const FunctionPoint& b) {
                            return a.args == b.args;
                          }),
              pts.end());
    return pts;
  }

 private:
  struct Unsupported : std::runtime_error {
    explicit Unsupported(const std::string& w) : std::runtime_error(w) {}
  };

  // ---- integer units -----------------------------------------------------

  struct UComb {
    std::map<int, Int> coeffs;  // unit id -> coefficient
    Int constant = 0;

    friend bool operator<(const UComb& a, const UComb& b) {
      if (a.constant != b.constant) return a.constant < b.constant;
      return a.coeffs < b.coeffs;
    }
    friend bool operator==(const UComb& a, const UComb& b) {
      return a.constant == b.constant && a.coeffs == b.coeffs;
    }

    void add(int unit, const Int& k) {
      if (k == 0) return;
      auto [it, fresh] = coeffs.emplace(unit, k);
      if (!fresh) {
        it->second += k;
        if (it->second == 0) coeffs.erase(it);
      }
    }
    void add_scaled(const UComb& o, const Int& s) {
      constant += o.constant * s;
      for (const auto& [u, k] : o.coeffs) add(u, k * s);
    }
  };

  struct Unit {
    enum class Kind { Symbol, Variable, AppResult };
    Kind kind;
    std::string name;  // symbol or variable name
    int app_index = -1;
  };

  struct AppInstance {
    std::string symbol;
    std::vector<UComb> args;
    int result_unit = -1;  // Int applications
    int bool_atom = -1;    // Bool applications
  };

  // ---- atoms ---------------------------------------------------------------

  struct LinAtom {
    UComb combo;  // constant part folded into rhs
    Int rhs = 0;
    bool is_eq = false;  // otherwise combo <= rhs
  };

  struct Atom {
    enum class Kind { True, Lin, BoolVar, BoolApp };
    Kind kind = Kind::True;
    LinAtom lin;
    std::string name;   // BoolVar
    int app_index = -1; // BoolApp
  };

  void reset() {
    units_.clear();
    unit_by_symbol_.clear();
    unit_by_var_.clear();
    apps_.clear();
    app_key_.clear();
    atoms_.clear();
    lin_atom_key_.clear();
    bool_var_key_.clear();
    clauses_.clear();
    tseitin_memo_.clear();
    eq_expanded_.clear();
    family_emitted_.clear();
    lemma_added_.clear();
    const_sorts_.clear();
    ite_aux_.clear();
    divmod_aux_.clear();
    cc_ = CongruenceClosure{};
    nvars_ = 0;
    true_var_ = new_var();
    atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
    atoms_[true_var_].kind = Atom::Kind::True;
    aux_counter_ = 0;
    used_names_.clear();
    tainted_ = false;
  }

  // ---- preprocessing: eliminate Int ite / div / mod ------------------------

  void collect_used_names(const std::vector<TermRef>& ts) {
    for (const auto& t : ts) collect_names(t);
  }
  void collect_names(const TermRef& t) {
    if (t->kind == Kind::Var || t->kind == Kind::Apply) {
      used_names_.insert(t->name);
      if (t->args.empty()) const_sorts_.emplace(t->name, t->sort);
    }
    for (const auto& a : t->args) collect_names(a);
  }

  std::string fresh_aux(const std::string& tag) {
    while (true) {
      std::string name = "aux!" + tag + "!" + std::to_string(aux_counter_++);
      if (used_names_.insert(name).second) return name;
    }
  }

  // Int-valued ite lifts to a fresh variable with two guarded equalities;
  // div/mod by a constant lift to quotient/remainder variables with the
  // Euclidean side conditions. Guards land in `sides` as plain assertions.
  TermRef strip(const TermRef& t, std::vector<TermRef>& sides) {
    switch (t->kind) {
      case Kind::IntConst:
      case Kind::BoolConst:
      case Kind::Var:
        return t;
      case Kind::Ite: {
        TermRef c = strip(t->args[0], sides);
        TermRef a = strip(t->args[1], sides);
        TermRef b = strip(t->args[2], sides);
        if (t->sort.is_bool()) return mk_ite(c, a, b);
        TermRef key = mk_ite(c, a, b);
        auto it = ite_aux_.find(key);
        if (it != ite_aux_.end()) return it->second;
        TermRef w = mk_var(fresh_aux("ite"), Sort::integer());
        sides.push_back(mk_or({mk_not(c), mk_cmp(CmpOp::Eq, w, a)}));
        sides.push_back(mk_or({c, mk_cmp(CmpOp::Eq, w, b)}));
        ite_aux_.emplace(key, w);
        return w;
      }
      case Kind::Div:
      case Kind::Mod: {
        TermRef a = strip(t->args[0], sides);
        TermRef b = strip(t->args[1], sides);
        if (b->kind != Kind::IntConst || b->value == 0)
          throw Unsupported("div/mod with non-constant or zero divisor");
        TermRef key = mk_div(a, b);
        auto it = divmod_aux_.find(key);
        if (it == divmod_aux_.end()) {
          TermRef q = mk_var(fresh_aux("div"), Sort::integer());
          TermRef r = mk_var(fresh_aux("mod"), Sort::integer());
          sides.push_back(mk_cmp(CmpOp::Eq, a, mk_add({mk_mul_const(b->value, q), r})));
          sides.push_back(mk_cmp(CmpOp::Le, mk_int(0), r));
          sides.push_back(mk_cmp(CmpOp::Le, r, mk_int(abs(b->value) - 1)));
          it = divmod_aux_.emplace(key, std::make_pair(q, r)).first;
        }
        return t->kind == Kind::Div ? it->second.first : it->second.second;
      }
      default: {
        bool changed = false;
        std::vector<TermRef> args;
        args.reserve(t->args.size());
        for (const auto& a : t->args) {
          args.push_back(strip(a, sides));
          changed |= args.back().get() != a.get();
        }
        if (!changed) return t;
        auto n = std::make_shared<TermNode>(t->kind, t->sort);
        n->value = t->value;
        n->bvalue = t->bvalue;
        n->name = t->name;
        n->cmp = t->cmp;
        n->args = std::move(args);
        return pwlmbqi::detail::finish(std::move(n));
      }
    }
  }

  // ---- unit and app registries ---------------------------------------------

  int unit_for_symbol(const std::string& name) {
    auto [it, fresh] = unit_by_symbol_.emplace(name, static_cast<int>(units_.size()));
    if (fresh) units_.push_back(Unit{Unit::Kind::Symbol, name, -1});
    return it->second;
  }
  int unit_for_var(const std::string& name) {
    auto [it, fresh] = unit_by_var_.emplace(name, static_cast<int>(units_.size()));
    if (fresh) units_.push_back(Unit{Unit::Kind::Variable, name, -1});
    return it->second;
  }

  int app_instance(const std::string& symbol, std::vector<UComb> args) {
    auto key = std::make_pair(symbol, args);
    auto it = app_key_.find(key);
    if (it != app_key_.end()) return it->second;
    int idx = static_cast<int>(apps_.size());
    apps_.push_back(AppInstance{symbol, std::move(args), -1, -1});
    app_key_.emplace(std::move(key), idx);
    return idx;
  }

  UComb linearize_int(const TermRef& t) {
    UComb out;
    switch (t->kind) {
      case Kind::IntConst:
        out.constant = t->value;
        return out;
      case Kind::Add:
        for (const auto& a : t->args) out.add_scaled(linearize_int(a), 1);
        return out;
      case Kind::Sub:
        out.add_scaled(linearize_int(t->args[0]), 1);
        out.add_scaled(linearize_int(t->args[1]), -1);
        return out;
      case Kind::Neg:
        out.add_scaled(linearize_int(t->args[0]), -1);
        return out;
      case Kind::MulConst:
        out.add_scaled(linearize_int(t->args[0]), t->value);
        return out;
      case Kind::Var:
        out.add(unit_for_var(t->name), 1);
        return out;
      case Kind::Apply: {
        if (t->args.empty()) {
          out.add(unit_for_symbol(t->name), 1);
          return out;
        }
        std::vector<UComb> args;
        args.reserve(t->args.size());
        for (const auto& a : t->args) args.push_back(linearize_int(a));
        int idx = app_instance(t->name, std::move(args));
        if (apps_[idx].result_unit < 0) {
          apps_[idx].result_unit = static_cast<int>(units_.size());
          units_.push_back(Unit{Unit::Kind::AppResult, t->name, idx});
        }
        out.add(apps_[idx].result_unit, 1);
        return out;
      }
      default:
        throw Unsupported("unexpected term in linear context");
    }
  }

  // ---- CNF ------------------------------------------------------------------

  int new_var() { return ++nvars_; }
  int lit_true() const { return true_var_; }

  int lin_literal(CmpOp op, const TermRef& lhs, const TermRef& rhs) {
    UComb combo = linearize_int(lhs);
    combo.add_scaled(linearize_int(rhs), -1);
    Int c = -combo.constant;
    combo.constant = 0;

    bool is_eq = false;
    switch (op) {
      case CmpOp::Eq: is_eq = true; break;
      case CmpOp::Le: break;
      case CmpOp::Lt: c -= 1; break;
      case CmpOp::Ge:
      case CmpOp::Gt: {
        for (auto& [u, k] : combo.coeffs) k = -k;
        c = -c;
        if (op == CmpOp::Gt) c -= 1;
        break;
      }
    }
    if (combo.coeffs.empty())
      return (is_eq ? (c == 0) : (0 <= c)) ? lit_true() : -lit_true();

    Int g = 0;
    for (const auto& [u, k] : combo.coeffs) g = gcd(g, k);
    if (is_eq) {
      if (c % g != 0) return -lit_true();
      for (auto& [u, k] : combo.coeffs) k /= g;
      c /= g;
      if (combo.coeffs.begin()->second < 0) {
        for (auto& [u, k] : combo.coeffs) k = -k;
        c = -c;
      }
    } else {
      for (auto& [u, k] : combo.coeffs) k /= g;
      c = floor_div(c, g);
    }

    auto key = std::make_tuple(is_eq, combo, c);
    auto it = lin_atom_key_.find(key);
    if (it != lin_atom_key_.end()) return it->second;
    int v = new_var();
    atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
    atoms_[v].kind = Atom::Kind::Lin;
    atoms_[v].lin = LinAtom{combo, c, is_eq};
    lin_atom_key_.emplace(std::move(key), v);
    return v;
  }

  int leaf_literal(const TermRef& t) {
    switch (t->kind) {
      case Kind::BoolConst:
        return t->bvalue ? lit_true() : -lit_true();
      case Kind::Var: {
        auto it = bool_var_key_.find(t->name);
        if (it != bool_var_key_.end()) return it->second;
        int v = new_var();
        atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
        atoms_[v].kind = Atom::Kind::BoolVar;
        atoms_[v].name = t->name;
        bool_var_key_.emplace(t->name, v);
        return v;
      }
      case Kind::Apply: {
        std::vector<UComb> args;
        args.reserve(t->args.size());
        for (const auto& a : t->args) args.push_back(linearize_int(a));
        int idx = app_instance(t->name, std::move(args));
        if (apps_[idx].bool_atom < 0) {
          int v = new_var();
          atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
          atoms_[v].kind = Atom::Kind::BoolApp;
          atoms_[v].name = t->name;
          atoms_[v].app_index = idx;
          apps_[idx].bool_atom = v;
        }
        return apps_[idx].bool_atom;
      }
      case Kind::Cmp:
        return lin_literal(t->cmp, t->args[0], t->args[1]);
      default:
        throw Unsupported("unexpected boolean leaf");
    }
  }

  int tseitin(const TermRef& t) {
    auto memo = tseitin_memo_.find(t.get());
    if (memo != tseitin_memo_.end()) return memo->second;
    int lit = 0;
    switch (t->kind) {
      case Kind::BoolConst:
      case Kind::Cmp:
        lit = leaf_literal(t);
        break;
      case Kind::Var:
      case Kind::Apply:
        lit = leaf_literal(t);
        break;
      case Kind::Not:
        lit = -tseitin(t->args[0]);
        break;
      case Kind::And:
      case Kind::Or: {
        std::vector<int> subs;
        subs.reserve(t->args.size());
        for (const auto& a : t->args) subs.push_back(tseitin(a));
        int v = new_var();
        atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
        if (t->kind == Kind::And) {
          std::vector<int> big{v};
          for (int s : subs) {
            clauses_.push_back({-v, s});
            big.push_back(-s);
          }
          clauses_.push_back(std::move(big));
        } else {
          std::vector<int> big{-v};
          for (int s : subs) {
            clauses_.push_back({v, -s});
            big.push_back(s);
          }
          clauses_.push_back(std::move(big));
        }
        lit = v;
        break;
      }
      case Kind::Implies: {
        int a = tseitin(t->args[0]);
        int b = tseitin(t->args[1]);
        int v = new_var();
        atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
        clauses_.push_back({-v, -a, b});
        clauses_.push_back({v, a});
        clauses_.push_back({v, -b});
        lit = v;
        break;
      }
      case Kind::Ite: {
        int c = tseitin(t->args[0]);
        int a = tseitin(t->args[1]);
        int b = tseitin(t->args[2]);
        int v = new_var();
        atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
        clauses_.push_back({-v, -c, a});
        clauses_.push_back({-v, c, b});
        clauses_.push_back({v, -c, -a});
        clauses_.push_back({v, c, -b});
        lit = v;
        break;
      }
      default:
        throw Unsupported("unexpected term in boolean context");
    }
    tseitin_memo_.emplace(t.get(), lit);
    return lit;
  }

  // ---- DPLL -----------------------------------------------------------------

  // complete assignment search over the current clause set; chronological
  // backtracking with unit propagation, lowest-index variable first, false
  // branch first
  bool dpll(std::vector<int>& value) {
    value.assign(static_cast<std::size_t>(nvars_) + 1, 0);
    std::vector<std::pair<int, bool>> trail;  // (var, was_decision)
    std::vector<std::size_t> decisions;

    auto assign = [&](int lit, bool decision) {
      value[std::abs(lit)] = lit > 0 ? 1 : -1;
      trail.push_back({std::abs(lit), decision});
      if (decision) decisions.push_back(trail.size() - 1);
    };

    auto propagate = [&]() -> bool {
      bool changed = true;
      while (changed) {
        changed = false;
        for (const auto& cl : clauses_) {
          int unassigned = 0, free_lit = 0;
          bool sat = false;
          for (int lit : cl) {
            int v = value[std::abs(lit)];
            if (v == 0) {
              ++unassigned;
              free_lit = lit;
            } else if ((v > 0) == (lit > 0)) {
              sat = true;
              break;
            }
          }
          if (sat) continue;
          if (unassigned == 0) return false;
          if (unassigned == 1) {
            assign(free_lit, false);
            changed = true;
          }
        }
      }
      return true;
    };

    auto backtrack = [&]() -> bool {
      while (!decisions.empty()) {
        std::size_t dpos = decisions.back();
        decisions.pop_back();
        int var = trail[dpos].first;
        int old = value[var];
        for (std::size_t i = trail.size(); i-- > dpos;) value[trail[i].first] = 0;
        trail.resize(dpos);
        if (old == -1) {  // false branch tried; flip to true as a forced choice
          assign(var, false);
          return true;
        }
      }
      return false;
    };

    while (true) {
      if (deadline_passed(opt_.deadline)) throw Unsupported("deadline exceeded");
      if (!propagate()) {
        if (!backtrack()) return false;
        continue;
      }
      int pick = 0;
      for (int v = 1; v <= nvars_; ++v) {
        if (value[v] == 0) {
          pick = v;
          break;
        }
      }
      if (pick == 0) return true;
      assign(-pick, true);  // false first
    }
  }

  // ---- theory layer -----------------------------------------------------------

  struct TheoryOutcome {
    bool consistent = false;
    bool restart = false;        // clauses were added; run the SAT search again
    std::vector<int> blocking;   // conflict clause when inconsistent
    std::vector<Int> unit_values;
    std::vector<int> bool_app_value;  // per app index: +1 / -1 / 0
  };

  // a LIA row together with the atom literal that justifies it (-1: derived)
  struct TaggedRow {
    LinConstraint c;
    int atom = -1;
  };

  LinConstraint atom_row(const LinAtom& a, bool positive) const {
    LinConstraint c;
    for (const auto& [u, k] : a.combo.coeffs) c.coeffs[u] = positive ? k : -k;
    if (a.is_eq) {
      c.rel = LinConstraint::Rel::Eq;
      c.rhs = a.rhs;  // negative equality handled by expansion clauses
    } else if (positive) {
      c.rel = LinConstraint::Rel::Le;
      c.rhs = a.rhs;
    } else {
      c.rel = LinConstraint::Rel::Le;  // combo >= rhs+1, negated
      c.rhs = -a.rhs - 1;
    }
    return c;
  }

  Int combo_value(const UComb& combo, const std::vector<Int>& v) const {
    Int out = combo.constant;
    for (const auto& [u, k] : combo.coeffs) out += k * v[u];
    return out;
  }

  UComb canonical_combo(const UComb& combo, const CongruenceClosure& cc) const {
    UComb out;
    out.constant = combo.constant;
    for (const auto& [u, k] : combo.coeffs) out.add(cc.find(u), k);
    return out;
  }

  IntFeasResult lia_check(const std::vector<TaggedRow>& rows,
                          const std::vector<TaggedRow>* extra = nullptr) const {
    std::vector<LinConstraint> cs;
    cs.reserve(rows.size() + (extra ? extra->size() : 0));
    for (const auto& r : rows) cs.push_back(r.c);
    if (extra)
      for (const auto& r : *extra) cs.push_back(r.c);
    std::vector<VarBounds> bounds(units_.size());
    IntFeasOptions o = opt_.feas;
    o.deadline = opt_.deadline;
    return solve_integer(static_cast<int>(units_.size()), cs, bounds, o);
  }

  // deletion-filter unsat core over an exactly infeasible row set
  std::vector<std::size_t> lia_core(const std::vector<TaggedRow>& rows) const {
    std::vector<bool> alive(rows.size(), true);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      alive[i] = false;
      std::vector<TaggedRow> sub;
      for (std::size_t j = 0; j < rows.size(); ++j)
        if (alive[j]) sub.push_back(rows[j]);
      if (lia_check(sub).status != IntFeasResult::Status::UnsatExact) alive[i] = true;
    }
    std::vector<std::size_t> core;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (alive[i]) core.push_back(i);
    return core;
  }

  std::vector<int> full_blocking(const std::vector<int>& value) const {
    std::vector<int> clause;
    const int assigned = static_cast<int>(value.size()) - 1;
    for (int v = 1; v <= assigned && v <= nvars_; ++v) {
      if (value[v] == 0) continue;
      if (atoms_[v].kind == Atom::Kind::Lin || atoms_[v].kind == Atom::Kind::BoolApp ||
          atoms_[v].kind == Atom::Kind::BoolVar)
        clause.push_back(value[v] == 1 ? -v : v);
    }
    return clause;
  }

  // blocking clause from an exact LIA conflict: prefer the simplex's own
  // infeasibility certificate, fall back to a deletion-filter core; derived
  // rows fall back to the full assignment since their justification spans it
  std::vector<int> conflict_blocking(const std::vector<TaggedRow>& rows,
                                     const std::vector<int>& value,
                                     const std::vector<int>& certificate) const {
    std::vector<std::size_t> core;
    if (!certificate.empty()) {
      for (int r : certificate) core.push_back(static_cast<std::size_t>(r));
    } else {
      core = lia_core(rows);
    }
    std::vector<int> clause;
    for (std::size_t i : core) {
      int a = rows[i].atom;
      if (a < 0) return full_blocking(value);
      clause.push_back(value[a] == 1 ? -a : a);
    }
    if (clause.empty()) return full_blocking(value);
    return clause;
  }

  TheoryOutcome theory_check(const std::vector<int>& value) {
    TheoryOutcome out;
    const int assigned = static_cast<int>(value.size()) - 1;  // atoms may grow below

    // lazily expand negative equalities into strict alternatives
    bool expanded = false;
    for (int v = 1; v <= assigned; ++v) {
      if (value[v] != -1 || atoms_[v].kind != Atom::Kind::Lin || !atoms_[v].lin.is_eq) continue;
      if (!eq_expanded_.insert(v).second) continue;
      const LinAtom a = atoms_[v].lin;  // by value: creating atoms moves atoms_
      UComb neg;
      for (const auto& [u, k] : a.combo.coeffs) neg.add(u, -k);
      int lt = lin_atom_lit(a.combo, a.rhs - 1);
      int gt = lin_atom_lit(neg, -a.rhs - 1);
      clauses_.push_back({v, lt, gt});
      expanded = true;
    }
    if (expanded) {
      out.restart = true;
      return out;
    }

    // congruence closure over the asserted unit equalities; the instance is
    // shared across rounds and rolled back after each candidate assignment
    cc_.ensure(units_.size());
    struct CcGuard {
      CongruenceClosure& cc;
      std::size_t mark;
      ~CcGuard() { cc.rollback(mark); }
    } guard{cc_, cc_.checkpoint()};
    CongruenceClosure& cc = cc_;
    std::vector<int> uniteq_lits;
    for (int v = 1; v <= nvars_; ++v) {
      if (value[v] != 1 || atoms_[v].kind != Atom::Kind::Lin || !atoms_[v].lin.is_eq) continue;
      const LinAtom& a = atoms_[v].lin;
      if (a.rhs == 0 && a.combo.coeffs.size() == 2) {
        auto it = a.combo.coeffs.begin();
        auto [u1, k1] = *it;
        auto [u2, k2] = *std::next(it);
        if ((k1 == 1 && k2 == -1) || (k1 == -1 && k2 == 1)) {
          cc.merge(u1, u2);
          uniteq_lits.push_back(v);
        }
      }
    }

    std::vector<TaggedRow> rows;
    for (int v = 1; v <= nvars_; ++v) {
      if (value[v] == 0 || atoms_[v].kind != Atom::Kind::Lin) continue;
      if (atoms_[v].lin.is_eq && value[v] == -1) continue;  // expansion covers it
      rows.push_back({atom_row(atoms_[v].lin, value[v] == 1), v});
    }

    // congruence propagation to fixpoint: merged argument tuples force equal
    // results; conflicting Bool applications are a theory conflict justified
    // by the unit equalities alone
    while (true) {
      std::map<std::pair<std::string, std::vector<UComb>>, int> groups;
      bool merged_more = false;
      for (std::size_t i = 0; i < apps_.size(); ++i) {
        std::vector<UComb> cargs;
        cargs.reserve(apps_[i].args.size());
        for (const auto& a : apps_[i].args) cargs.push_back(canonical_combo(a, cc));
        auto key = std::make_pair(apps_[i].symbol, std::move(cargs));
        auto [it, fresh] = groups.emplace(std::move(key), static_cast<int>(i));
        if (fresh) continue;
        const AppInstance& a = apps_[it->second];
        const AppInstance& b = apps_[i];
        if (a.bool_atom >= 0 && b.bool_atom >= 0 && value[a.bool_atom] != 0 &&
            value[b.bool_atom] != 0 && value[a.bool_atom] != value[b.bool_atom]) {
          for (int lit : uniteq_lits) out.blocking.push_back(-lit);
          out.blocking.push_back(value[a.bool_atom] == 1 ? -a.bool_atom : a.bool_atom);
          out.blocking.push_back(value[b.bool_atom] == 1 ? -b.bool_atom : b.bool_atom);
          return out;
        }
        if (a.result_unit >= 0 && b.result_unit >= 0 && !cc.same(a.result_unit, b.result_unit)) {
          cc.merge(a.result_unit, b.result_unit);
          LinConstraint eq;
          eq.coeffs[a.result_unit] = 1;
          eq.coeffs[b.result_unit] = -1;
          eq.rel = LinConstraint::Rel::Eq;
          eq.rhs = 0;
          rows.push_back({std::move(eq), -1});
          merged_more = true;
        }
      }
      if (!merged_more) break;
    }

    IntFeasResult lia = lia_check(rows);
    if (lia.status == IntFeasResult::Status::Inconclusive) {
      tainted_ = true;
      out.blocking = full_blocking(value);
      return out;
    }
    if (lia.status == IntFeasResult::Status::UnsatExact) {
      out.blocking = conflict_blocking(rows, value, lia.conflict_rows);
      return out;
    }

    // Model-based completion. `rows` holds only entailed facts and is the
    // sole basis for entailment probes and conflicts; `diversity` holds
    // heuristic disequalities used purely for model selection. A violating
    // pair that can be neither separated nor confirmed congruent gets its
    // congruence axiom instance added as a clause (splitting on demand).
    std::vector<Int> v = std::move(lia.witness);
    std::vector<TaggedRow> diversity;
    long cap = 16 + 4 * static_cast<long>(apps_.size()) * static_cast<long>(apps_.size() + 1);
    for (long round = 0; round < cap; ++round) {
      if (deadline_passed(opt_.deadline)) throw Unsupported("deadline exceeded");
      std::map<std::pair<std::string, std::vector<Int>>, int> groups;
      int viol_a = -1, viol_b = -1;
      for (std::size_t i = 0; i < apps_.size() && viol_a < 0; ++i) {
        std::vector<Int> argv;
        argv.reserve(apps_[i].args.size());
        for (const auto& a : apps_[i].args) argv.push_back(combo_value(a, v));
        auto key = std::make_pair(apps_[i].symbol, std::move(argv));
        auto [it, fresh] = groups.emplace(std::move(key), static_cast<int>(i));
        if (fresh) continue;
        const AppInstance& a = apps_[it->second];
        const AppInstance& b = apps_[i];
        bool bad = false;
        if (a.result_unit >= 0 && b.result_unit >= 0 && v[a.result_unit] != v[b.result_unit])
          bad = true;
        if (a.bool_atom >= 0 && b.bool_atom >= 0 && value[a.bool_atom] != 0 &&
            value[b.bool_atom] != 0 && value[a.bool_atom] != value[b.bool_atom])
          bad = true;
        if (bad) {
          viol_a = it->second;
          viol_b = static_cast<int>(i);
        }
      }
      if (viol_a < 0) {
        out.consistent = true;
        out.unit_values = std::move(v);
        out.bool_app_value.assign(apps_.size(), 0);
        for (std::size_t i = 0; i < apps_.size(); ++i)
          if (apps_[i].bool_atom >= 0) out.bool_app_value[i] = value[apps_[i].bool_atom];
        return out;
      }

      const AppInstance& A = apps_[viol_a];
      const AppInstance& B = apps_[viol_b];
      bool diversified = false;
      bool need_lemma = false;
      bool all_entailed = true;
      for (std::size_t p = 0; p < A.args.size(); ++p) {
        UComb diff = A.args[p];
        diff.add_scaled(B.args[p], -1);
        if (diff.coeffs.empty()) continue;  // syntactically equal arguments
        TaggedRow lt;  // diff <= -1
        for (const auto& [u, k] : diff.coeffs) lt.c.coeffs[u] = k;
        lt.c.rel = LinConstraint::Rel::Le;
        lt.c.rhs = -diff.constant - 1;
        TaggedRow gt;  // diff >= 1
        gt.c.coeffs = lt.c.coeffs;
        gt.c.rel = LinConstraint::Rel::Ge;
        gt.c.rhs = -diff.constant + 1;

        std::vector<TaggedRow> probe{lt};
        IntFeasResult r1 = lia_check(rows, &probe);
        probe[0] = gt;
        IntFeasResult r2 = lia_check(rows, &probe);
        if (r1.status == IntFeasResult::Status::UnsatExact &&
            r2.status == IntFeasResult::Status::UnsatExact)
          continue;  // entailed equal at this position
        all_entailed = false;
        const TaggedRow& side = r1.status == IntFeasResult::Status::Sat ? lt : gt;
        if (r1.status != IntFeasResult::Status::Sat &&
            r2.status != IntFeasResult::Status::Sat) {
          need_lemma = true;  // inconclusive either way
          break;
        }
        diversity.push_back(side);
        IntFeasResult rd = lia_check(rows, &diversity);
        if (rd.status == IntFeasResult::Status::Sat) {
          v = std::move(rd.witness);
          diversified = true;
        } else {
          diversity.pop_back();  // clashes with earlier heuristic choices
          need_lemma = true;
        }
        break;
      }
      if (diversified) continue;
      if (need_lemma || !all_entailed) {
        if (add_congruence_lemma(A, B)) {
          out.restart = true;
        } else {
          tainted_ = true;  // lemma already present; should be unreachable
          out.blocking = full_blocking(value);
        }
        return out;
      }
      // every argument position entailed equal: congruence applies for real
      if (A.bool_atom >= 0 && B.bool_atom >= 0 && value[A.bool_atom] != 0 &&
          value[B.bool_atom] != 0 && value[A.bool_atom] != value[B.bool_atom]) {
        out.blocking = full_blocking(value);
        return out;
      }
      if (A.result_unit >= 0 && B.result_unit >= 0) {
        LinConstraint eq;
        eq.coeffs[A.result_unit] = 1;
        eq.coeffs[B.result_unit] = -1;
        eq.rel = LinConstraint::Rel::Eq;
        eq.rhs = 0;
        rows.push_back({std::move(eq), -1});
        IntFeasResult r = lia_check(rows, &diversity);
        if (r.status == IntFeasResult::Status::Sat) {
          v = std::move(r.witness);
          continue;
        }
        diversity.clear();
        r = lia_check(rows);
        if (r.status == IntFeasResult::Status::Sat) {
          v = std::move(r.witness);
          continue;
        }
        if (r.status == IntFeasResult::Status::UnsatExact) {
          out.blocking = conflict_blocking(rows, value, r.conflict_rows);
          return out;
        }
        tainted_ = true;
        out.blocking = full_blocking(value);
        return out;
      }
      tainted_ = true;  // half-specified pair; cannot make progress
      out.blocking = full_blocking(value);
      return out;
    }
    tainted_ = true;  // completion budget exhausted
    out.blocking = full_blocking(value);
    return out;
  }

  // congruence axiom instance for an application pair:
  //   arg1A = arg1B /\ ... /\ argnA = argnB  =>  results equal
  bool add_congruence_lemma(const AppInstance& A, const AppInstance& B) {
    auto key = std::make_pair(std::min(&A, &B) - apps_.data(), std::max(&A, &B) - apps_.data());
    if (!lemma_added_.insert(key).second) return false;
    std::vector<int> antecedent;
    for (std::size_t p = 0; p < A.args.size(); ++p) {
      UComb diff = A.args[p];
      diff.add_scaled(B.args[p], -1);
      Int rhs = -diff.constant;
      diff.constant = 0;
      int lit = canon_lin_lit(std::move(diff), rhs, true);
      if (lit == lit_true()) continue;       // syntactically equal
      antecedent.push_back(-lit);
    }
    if (A.result_unit >= 0 && B.result_unit >= 0) {
      UComb res;
      res.add(A.result_unit, 1);
      res.add(B.result_unit, -1);
      int res_eq = canon_lin_lit(std::move(res), 0, true);
      std::vector<int> clause = antecedent;
      clause.push_back(res_eq);
      clauses_.push_back(std::move(clause));
    } else if (A.bool_atom >= 0 && B.bool_atom >= 0) {
      std::vector<int> c1 = antecedent;
      c1.push_back(-A.bool_atom);
      c1.push_back(B.bool_atom);
      std::vector<int> c2 = antecedent;
      c2.push_back(A.bool_atom);
      c2.push_back(-B.bool_atom);
      clauses_.push_back(std::move(c1));
      clauses_.push_back(std::move(c2));
    }
    return true;
  }

  // canonical linear atom literal from an already-linearized combination
  int canon_lin_lit(UComb combo, Int rhs, bool is_eq) {
    if (combo.constant != 0) {
      rhs -= combo.constant;
      combo.constant = 0;
    }
    if (combo.coeffs.empty())
      return (is_eq ? (rhs == 0) : (0 <= rhs)) ? lit_true() : -lit_true();
    Int g = 0;
    for (const auto& [u, k] : combo.coeffs) g = gcd(g, k);
    if (is_eq) {
      if (rhs % g != 0) return -lit_true();
      for (auto& [u, k] : combo.coeffs) k /= g;
      rhs /= g;
      if (combo.coeffs.begin()->second < 0) {
        for (auto& [u, k] : combo.coeffs) k = -k;
        rhs = -rhs;
      }
    } else {
      for (auto& [u, k] : combo.coeffs) k /= g;
      rhs = floor_div(rhs, g);
    }
    auto key = std::make_tuple(is_eq, combo, rhs);
    auto it = lin_atom_key_.find(key);
    if (it != lin_atom_key_.end()) return it->second;
    int v = new_var();
    atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
    atoms_[v].kind = Atom::Kind::Lin;
    atoms_[v].lin = LinAtom{combo, rhs, is_eq};
    lin_atom_key_.emplace(std::move(key), v);
    return v;
  }

  int lin_atom_lit(const UComb& combo, const Int& rhs) {
    // combo <= rhs, already gcd-normalized relative to its parent equality
    auto key = std::make_tuple(false, combo, rhs);
    auto it = lin_atom_key_.find(key);
    if (it != lin_atom_key_.end()) return it->second;
    int v = new_var();
    atoms_.resize(static_cast<std::size_t>(nvars_) + 1);
    atoms_[v].kind = Atom::Kind::Lin;
    atoms_[v].lin = LinAtom{combo, rhs, false};
    lin_atom_key_.emplace(std::move(key), v);
    return v;
  }

  // Boolean consequences between atoms over the same linear combination:
  // exclusive equalities, bound chains, and equality/bound links. These keep
  // one-variable arithmetic out of the theory round-trips.
  void emit_family_lemmas() {
    std::map<UComb, std::pair<std::vector<std::pair<Int, int>>, std::vector<std::pair<Int, int>>>>
        families;  // combo -> (le atoms, eq atoms) as (rhs, var)
    for (const auto& [key, var] : lin_atom_key_) {
      const auto& [is_eq, combo, rhs] = key;
      auto& fam = families[combo];
      (is_eq ? fam.second : fam.first).emplace_back(rhs, var);
    }
    auto emit = [&](int a, int b) {
      if (family_emitted_.emplace(std::min(a, b), std::max(a, b)).second)
        clauses_.push_back({a, b});
    };
    for (auto& [combo, fam] : families) {
      auto& [les, eqs] = fam;
      std::sort(les.begin(), les.end());
      std::sort(eqs.begin(), eqs.end());
      for (std::size_t i = 0; i + 1 < les.size(); ++i)
        emit(-les[i].second, les[i + 1].second);  // combo<=c1 implies combo<=c2
      for (std::size_t i = 0; i < eqs.size(); ++i)
        for (std::size_t j = i + 1; j < eqs.size(); ++j)
          emit(-eqs[i].second, -eqs[j].second);  // distinct equalities exclude
      for (const auto& [c, ev] : eqs) {
        auto ge = std::lower_bound(les.begin(), les.end(), std::make_pair(c, INT_MIN));
        if (ge != les.end()) emit(-ev, ge->second);        // eq(c) implies combo<=c'
        if (ge != les.begin()) emit(-ev, -std::prev(ge)->second);  // and not combo<=c''<c
      }
    }
  }

  // ---- main search loop --------------------------------------------------------

  GroundResult search(const std::vector<TermRef>& original) {
    GroundResult out;
    for (long round = 0; round < opt_.max_theory_rounds; ++round) {
      if (deadline_passed(opt_.deadline)) {
        out.verdict = GroundResult::Verdict::Unknown;
        out.reason = "deadline exceeded";
        return out;
      }
      std::vector<int> value;
      bool sat;
      try {
        sat = dpll(value);
      } catch (const Unsupported& u) {
        out.verdict = GroundResult::Verdict::Unknown;
        out.reason = u.what();
        return out;
      }
      if (!sat) {
        if (tainted_) {
          out.verdict = GroundResult::Verdict::Unknown;
          out.reason = "feasibility box or budget exhausted";
        } else {
          out.verdict = GroundResult::Verdict::Unsat;
        }
        return out;
      }
      TheoryOutcome th = theory_check(value);
      if (th.restart) {  // clauses grew; search again
        emit_family_lemmas();
        continue;
      }
      if (!th.consistent) {
        if (th.blocking.empty()) {
          out.verdict = GroundResult::Verdict::Unknown;
          out.reason = "theory conflict without theory literals";
          return out;
        }
        clauses_.push_back(std::move(th.blocking));
        continue;
      }

      GroundModel gm = build_model(value, th);
      if (opt_.verify_model) {
        for (const auto& a : original) {
          bool ok = false;
          try {
            ok = value_bool(evaluate_ground(a, gm));
          } catch (const EvalError&) {
            ok = false;
          }
          if (!ok)
            throw std::logic_error("internal error: ground model failed evaluation check");
        }
      }
      out.verdict = GroundResult::Verdict::Sat;
      out.model = std::move(gm);
      return out;
    }
    out.verdict = GroundResult::Verdict::Unknown;
    out.reason = "theory round budget exhausted";
    return out;
  }

  GroundModel build_model(const std::vector<int>& value, const TheoryOutcome& th) {
    GroundModel gm;
    // constants erased by simplification are unconstrained; default them
    for (const auto& [name, sort] : const_sorts_)
      gm.consts[name] = sort.is_bool() ? Value(false) : Value(Int(0));
    for (std::size_t u = 0; u < units_.size(); ++u) {
      if (units_[u].kind == Unit::Kind::Symbol || units_[u].kind == Unit::Kind::Variable)
        gm.consts[units_[u].name] = th.unit_values[u];
    }
    for (int v = 1; v <= nvars_; ++v) {
      if (atoms_[v].kind == Atom::Kind::BoolVar && value[v] != 0)
        gm.consts[atoms_[v].name] = value[v] == 1;
    }
    for (std::size_t i = 0; i < apps_.size(); ++i) {
      const AppInstance& app = apps_[i];
      if (app.args.empty()) {
        if (app.bool_atom >= 0 && value[app.bool_atom] != 0)
          gm.consts[app.symbol] = value[app.bool_atom] == 1;
        continue;
      }
      FunctionPoint p;
      p.args.reserve(app.args.size());
      for (const auto& a : app.args) p.args.push_back(combo_value(a, th.unit_values));
      if (app.result_unit >= 0) {
        p.value = th.unit_values[app.result_unit];
      } else if (app.bool_atom >= 0 && value[app.bool_atom] != 0) {
        p.value = value[app.bool_atom] == 1;
      } else {
        continue;  // polarity never fixed by the search
      }
      gm.points[app.symbol].push_back(std::move(p));
    }
    for (auto& [sym, pts] : gm.points) {
      (void)sym;
      std::sort(pts.begin(), pts.end());
      pts.erase(std::unique(pts.begin(), pts.end(),
                            [](const FunctionPoint& a, const FunctionPoint& b) {
                              return a.args == b.args;
                            }),
                pts.end());
    }
    return gm;
  }

  GroundOptions opt_;

  std::vector<Unit> units_;
  std::map<std::string, int> unit_by_symbol_;
  std::map<std::string, int> unit_by_var_;
  std::vector<AppInstance> apps_;
  std::map<std::pair<std::string, std::vector<UComb>>, int> app_key_;

  std::vector<Atom> atoms_;  // indexed by CNF variable
  std::map<std::tuple<bool, UComb, Int>, int> lin_atom_key_;
  std::map<std::string, int> bool_var_key_;
  std::vector<std::vector<int>> clauses_;
  std::map<const TermNode*, int> tseitin_memo_;
  std::map<TermRef, TermRef, TermLess> ite_aux_;
  std::map<TermRef, std::pair<TermRef, TermRef>, TermLess> divmod_aux_;
  std::set<int> eq_expanded_;
  std::set<std::pair<int, int>> family_emitted_;
  std::set<std::pair<std::ptrdiff_t, std::ptrdiff_t>> lemma_added_;
  std::set<std::string> used_names_;
  std::map<std::string, Sort> const_sorts_;
  CongruenceClosure cc_;
  int nvars_ = 0;
  int true_var_ = 0;
  long aux_counter_ = 0;
  bool tainted_ = false;
};

}  // namespace pwlmbqi
