#pragma once

#include <stdexcept>
#include <vector>

#include "pwlmbqi/simplex.hpp"

namespace pwlmbqi {

// Feasibility of integer inequality systems over the unknowns (y, c):
//
//   positive row:  a . y >= c
//   negative row:  a . y <  c     (stored as  a . y <= c - 1)
//
// used by the recursive predicate splitter. Systems are immutable values.
// is_sat() folds the engine's inconclusive answer into "unsat for fitting
// purposes": a missed separator only costs an extra split, never soundness.
//
// Incremental use is the norm: a satisfiability probe first re-checks the
// parent system's witness against the new row, which answers most of the
// greedy loop's queries without touching the simplex. The witness returned
// by solve() always comes from a fresh solve, so it only depends on the row
// set.
class InequalitySystem {
 public:
  struct Row {
    std::vector<Int> coeffs;
    bool positive;
  };

  explicit InequalitySystem(std::size_t arity, IntFeasOptions opt = {})
      : arity_(arity), opt_(std::move(opt)) {}

  std::size_t arity() const { return arity_; }
  const std::vector<Row>& rows() const { return rows_; }

  InequalitySystem push_ineq(const std::vector<Int>& a, bool positive) const {
    if (a.size() != arity_) throw std::invalid_argument("push_ineq: arity mismatch");
    InequalitySystem next = *this;
    next.rows_.push_back(Row{a, positive});
    if (solved_ && cached_.status == IntFeasResult::Status::Sat) {
      next.hint_ = cached_.witness;
    }
    next.solved_ = false;
    next.cached_ = IntFeasResult{};
    return next;
  }

  IntFeasResult::Status status() const {
    if (!solved_ && hint_ok()) return IntFeasResult::Status::Sat;
    ensure_solved();
    return cached_.status;
  }

  bool is_sat() const { return status() == IntFeasResult::Status::Sat; }

  // Deterministic integer witness (s, c); requires is_sat().
  std::pair<std::vector<Int>, Int> solve() const {
    ensure_solved();
    if (cached_.status != IntFeasResult::Status::Sat)
      throw std::logic_error("solve called on infeasible system");
    if (rows_.empty()) return {std::vector<Int>(arity_, Int(0)), Int(0)};
    std::vector<Int> slopes(cached_.witness.begin(), cached_.witness.begin() + arity_);
    return {std::move(slopes), cached_.witness[arity_]};
  }

  // Row-by-row check of a candidate witness.
  bool witness_ok(const std::vector<Int>& s, const Int& c) const {
    for (const auto& r : rows_) {
      Int v = 0;
      for (std::size_t i = 0; i < arity_; ++i) v += r.coeffs[i] * s[i];
      if (r.positive ? !(v >= c) : !(v < c)) return false;
    }
    return true;
  }

 private:
  bool hint_ok() const {
    if (hint_.size() != arity_ + 1) return false;
    std::vector<Int> s(hint_.begin(), hint_.begin() + arity_);
    return witness_ok(s, hint_[arity_]);
  }

  void ensure_solved() const {
    if (solved_) return;
    std::vector<LinConstraint> cs;
    cs.reserve(rows_.size());
    int cvar = static_cast<int>(arity_);
    for (const auto& r : rows_) {
      LinConstraint c;
      for (std::size_t i = 0; i < arity_; ++i)
        if (r.coeffs[i] != 0) c.coeffs[static_cast<int>(i)] = r.coeffs[i];
      if (r.positive) {
        // a.y - c >= 0
        c.coeffs[cvar] = -1;
        c.rel = LinConstraint::Rel::Ge;
        c.rhs = 0;
      } else {
        // a.y - c <= -1
        c.coeffs[cvar] = -1;
        c.rel = LinConstraint::Rel::Le;
        c.rhs = -1;
      }
      cs.push_back(std::move(c));
    }
    std::vector<VarBounds> bounds(arity_ + 1);
    const std::vector<Int>* hint = hint_ok() ? &hint_ : nullptr;
    cached_ = solve_integer(static_cast<int>(arity_) + 1, cs, bounds, opt_, hint);
    solved_ = true;
  }

  std::size_t arity_;
  IntFeasOptions opt_;
  std::vector<Row> rows_;
  std::vector<Int> hint_;  // witness of an ancestor system, if any
  mutable IntFeasResult cached_;
  mutable bool solved_ = false;
};

}  // namespace pwlmbqi
