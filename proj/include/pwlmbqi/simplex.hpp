#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <vector>

#include "pwlmbqi/ints.hpp"

namespace pwlmbqi {

struct LinConstraint {
  enum class Rel { Le, Ge, Eq };
  std::map<int, Int> coeffs;  // variable index -> coefficient
  Rel rel = Rel::Le;
  Int rhs = 0;
};

struct VarBounds {
  std::optional<Int> lo, hi;
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

inline bool deadline_passed(const Deadline& d) {
  return d && std::chrono::steady_clock::now() >= *d;
}

// Exact-rational feasibility simplex over bounded variables (the classic
// SMT arithmetic core: slack variable per row, pivoting with Bland's rule,
// so termination is guaranteed). One instance per check; not reused.
class Simplex {
 public:
  Simplex(int nvars, const std::vector<LinConstraint>& constraints,
          const std::vector<VarBounds>& bounds)
      : nstruct_(nvars) {
    int total = nvars + static_cast<int>(constraints.size());
    lo_.assign(total, std::nullopt);
    hi_.assign(total, std::nullopt);
    beta_.assign(total, Rat(0));
    for (int i = 0; i < nvars; ++i) {
      if (bounds[i].lo) lo_[i] = Rat(*bounds[i].lo);
      if (bounds[i].hi) hi_[i] = Rat(*bounds[i].hi);
    }
    basic_row_.assign(total, -1);
    rows_.reserve(constraints.size());
    for (std::size_t r = 0; r < constraints.size(); ++r) {
      const auto& c = constraints[r];
      int sv = nvars + static_cast<int>(r);
      Row row;
      row.basic = sv;
      row.coeff.assign(total, Rat(0));
      for (const auto& [v, k] : c.coeffs) row.coeff[v] = Rat(k);
      switch (c.rel) {
        case LinConstraint::Rel::Le: hi_[sv] = Rat(c.rhs); break;
        case LinConstraint::Rel::Ge: lo_[sv] = Rat(c.rhs); break;
        case LinConstraint::Rel::Eq: lo_[sv] = hi_[sv] = Rat(c.rhs); break;
      }
      basic_row_[sv] = static_cast<int>(rows_.size());
      rows_.push_back(std::move(row));
    }
    // nonbasic variables start at a value inside their bounds
    for (int i = 0; i < nvars; ++i) {
      Rat v = 0;
      if (lo_[i] && v < *lo_[i]) v = *lo_[i];
      if (hi_[i] && v > *hi_[i]) v = *hi_[i];
      beta_[i] = v;
    }
    recompute_basics();
  }

  bool check() {
    for (int i = 0; i < nstruct_; ++i) {
      if (lo_[i] && hi_[i] && *lo_[i] > *hi_[i]) {
        conflict_.assign(1, i);
        return false;
      }
    }
    while (true) {
      int xi = -1;
      bool below = false;
      for (int v = 0; v < static_cast<int>(beta_.size()); ++v) {
        if (basic_row_[v] < 0) continue;
        if (lo_[v] && beta_[v] < *lo_[v]) {
          xi = v;
          below = true;
          break;
        }
        if (hi_[v] && beta_[v] > *hi_[v]) {
          xi = v;
          below = false;
          break;
        }
      }
      if (xi < 0) return true;
      const Row& row = rows_[basic_row_[xi]];
      int xj = -1;
      for (int v = 0; v < static_cast<int>(beta_.size()); ++v) {
        if (basic_row_[v] >= 0 || row.coeff[v] == 0) continue;
        const Rat& a = row.coeff[v];
        bool can_increase = !hi_[v] || beta_[v] < *hi_[v];
        bool can_decrease = !lo_[v] || beta_[v] > *lo_[v];
        if (below ? (a > 0 ? can_increase : can_decrease)
                  : (a > 0 ? can_decrease : can_increase)) {
          xj = v;
          break;
        }
      }
      if (xj < 0) {
        // Farkas-style certificate: the violated bound of xi together with
        // the blocking bounds of the row's nonbasic variables
        conflict_.assign(1, xi);
        for (int v = 0; v < static_cast<int>(beta_.size()); ++v) {
          if (basic_row_[v] >= 0 || row.coeff[v] == 0) continue;
          conflict_.push_back(v);
        }
        return false;
      }
      pivot_and_update(xi, xj, below ? *lo_[xi] : *hi_[xi]);
    }
  }

  Rat value(int var) const { return beta_[var]; }

  // variables whose bounds form the infeasibility certificate
  const std::vector<int>& conflict() const { return conflict_; }

 private:
  struct Row {
    int basic;
    std::vector<Rat> coeff;  // x_basic = sum coeff[j] * x_j over nonbasic j
  };

  void recompute_basics() {
    for (auto& row : rows_) {
      Rat v = 0;
      for (int j = 0; j < static_cast<int>(beta_.size()); ++j) {
        if (row.coeff[j] != 0 && basic_row_[j] < 0) v += row.coeff[j] * beta_[j];
      }
      beta_[row.basic] = v;
    }
  }

  void pivot_and_update(int xi, int xj, const Rat& v) {
    int r = basic_row_[xi];
    Row& row = rows_[r];
    Rat a = row.coeff[xj];
    Rat theta = (v - beta_[xi]) / a;
    beta_[xi] = v;
    beta_[xj] += theta;
    for (auto& other : rows_) {
      if (other.basic != xi && other.coeff[xj] != 0) beta_[other.basic] += other.coeff[xj] * theta;
    }
    // re-express row r with xj basic
    std::vector<Rat> nr(row.coeff.size(), Rat(0));
    nr[xi] = Rat(1) / a;
    for (int m = 0; m < static_cast<int>(row.coeff.size()); ++m) {
      if (m == xj || row.coeff[m] == 0) continue;
      nr[m] = -row.coeff[m] / a;
    }
    row.coeff = std::move(nr);
    row.basic = xj;
    basic_row_[xj] = r;
    basic_row_[xi] = -1;
    for (auto& other : rows_) {
      if (other.basic == xj) continue;
      Rat f = other.coeff[xj];
      if (f == 0) continue;
      other.coeff[xj] = 0;
      for (int m = 0; m < static_cast<int>(row.coeff.size()); ++m) {
        if (row.coeff[m] != 0) other.coeff[m] += f * row.coeff[m];
      }
    }
  }

  int nstruct_;
  std::vector<int> conflict_;
  std::vector<std::optional<Rat>> lo_, hi_;
  std::vector<Rat> beta_;
  std::vector<int> basic_row_;  // -1 when nonbasic
  std::vector<Row> rows_;
};

struct IntFeasResult {
  enum class Status { Sat, UnsatExact, Inconclusive };
  Status status = Status::Inconclusive;
  std::vector<Int> witness;
  // rows participating in a root-relaxation infeasibility proof (may be
  // empty for other exact-unsat paths)
  std::vector<int> conflict_rows;
};

struct IntFeasOptions {
  std::vector<Int> box_schedule{Int(8), Int(64), Int(1024)};
  long node_budget = 50000;
  Deadline deadline;
};

namespace detail {

// Tightest integer interval for variable `var` with every other variable
// fixed at `vals`; used to pull witness coordinates toward zero.
inline std::pair<std::optional<Int>, std::optional<Int>> coord_interval(
    int var, const std::vector<LinConstraint>& constraints, const std::vector<VarBounds>& bounds,
    const std::vector<Int>& vals) {
  std::optional<Int> lo = bounds[var].lo, hi = bounds[var].hi;
  auto tighten_lo = [&](const Int& v) {
    if (!lo || v > *lo) lo = v;
  };
  auto tighten_hi = [&](const Int& v) {
    if (!hi || v < *hi) hi = v;
  };
  for (const auto& c : constraints) {
    auto it = c.coeffs.find(var);
    if (it == c.coeffs.end() || it->second == 0) continue;
    Int rest = 0;
    for (const auto& [v, k] : c.coeffs)
      if (v != var) rest += k * vals[v];
    const Int& a = it->second;
    Int margin = c.rhs - rest;
    // a*x <= margin and/or a*x >= margin
    if (c.rel == LinConstraint::Rel::Le || c.rel == LinConstraint::Rel::Eq) {
      if (a > 0) tighten_hi(floor_div(margin, a));
      else tighten_lo(ceil_div(margin, a));
    }
    if (c.rel == LinConstraint::Rel::Ge || c.rel == LinConstraint::Rel::Eq) {
      if (a > 0) tighten_lo(ceil_div(margin, a));
      else tighten_hi(floor_div(margin, a));
    }
  }
  return {lo, hi};
}

}  // namespace detail

// Deterministic canonicalization: move each coordinate as close to zero as
// the other coordinates allow, repeating until fixpoint.
inline void canonicalize_witness(std::vector<Int>& vals,
                                 const std::vector<LinConstraint>& constraints,
                                 const std::vector<VarBounds>& bounds, int passes = 4) {
  for (int p = 0; p < passes; ++p) {
    bool changed = false;
    for (int v = 0; v < static_cast<int>(vals.size()); ++v) {
      auto [lo, hi] = detail::coord_interval(v, constraints, bounds, vals);
      Int target = 0;
      if (lo && target < *lo) target = *lo;
      if (hi && target > *hi) target = *hi;
      if (lo && hi && *lo > *hi) continue;  // numerically impossible here; keep value
      if (target != vals[v]) {
        vals[v] = target;
        changed = true;
      }
    }
    if (!changed) break;
  }
}

// Integer feasibility by LP relaxation plus branch-and-bound inside an
// iteratively widened box. A rationally infeasible relaxation is definitive
// UNSAT; exhausting the box schedule or budgets is only inconclusive. A
// caller-supplied known witness widens the box to cover it and caps the
// search from degrading a feasible answer to inconclusive.
inline IntFeasResult solve_integer(int nvars, const std::vector<LinConstraint>& constraints,
                                   const std::vector<VarBounds>& base_bounds,
                                   const IntFeasOptions& opt = {},
                                   const std::vector<Int>* hint = nullptr) {
  IntFeasResult res;
  if (nvars == 0) {
    // constraints over no variables: each row is a constant comparison
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto& c = constraints[i];
      bool ok = true;
      switch (c.rel) {
        case LinConstraint::Rel::Le: ok = 0 <= c.rhs; break;
        case LinConstraint::Rel::Ge: ok = 0 >= c.rhs; break;
        case LinConstraint::Rel::Eq: ok = 0 == c.rhs; break;
      }
      if (!ok) {
        res.status = IntFeasResult::Status::UnsatExact;
        res.conflict_rows.push_back(static_cast<int>(i));
        return res;
      }
    }
    res.status = IntFeasResult::Status::Sat;
    return res;
  }

  {
    Simplex relax(nvars, constraints, base_bounds);
    if (!relax.check()) {
      res.status = IntFeasResult::Status::UnsatExact;
      for (int v : relax.conflict())
        if (v >= nvars) res.conflict_rows.push_back(v - nvars);
      return res;
    }
  }

  // widen the schedule to cover the magnitudes present in the system
  Int maxabs = 1;
  for (const auto& c : constraints) {
    for (const auto& [v, k] : c.coeffs) {
      (void)v;
      if (abs(k) > maxabs) maxabs = abs(k);
    }
    if (abs(c.rhs) > maxabs) maxabs = abs(c.rhs);
  }
  if (hint) {
    for (const auto& h : *hint)
      if (abs(h) > maxabs) maxabs = abs(h);
  }

  long nodes = 0;
  for (const Int& step : opt.box_schedule) {
    Int box = step < maxabs ? maxabs : step;
    std::vector<VarBounds> boxed = base_bounds;
    for (auto& b : boxed) {
      if (!b.lo || *b.lo < -box) b.lo = -box;
      if (!b.hi || *b.hi > box) b.hi = box;
    }
    // DFS; lower branch explored first
    std::vector<std::vector<VarBounds>> stack{boxed};
    while (!stack.empty()) {
      if (++nodes > opt.node_budget || deadline_passed(opt.deadline)) {
        res.status = IntFeasResult::Status::Inconclusive;
        return res;
      }
      std::vector<VarBounds> node = std::move(stack.back());
      stack.pop_back();
      Simplex lp(nvars, constraints, node);
      if (!lp.check()) continue;
      int frac = -1;
      for (int v = 0; v < nvars; ++v) {
        if (!is_integral(lp.value(v))) {
          frac = v;
          break;
        }
      }
      if (frac < 0) {
        res.status = IntFeasResult::Status::Sat;
        res.witness.resize(nvars);
        for (int v = 0; v < nvars; ++v) res.witness[v] = to_int(lp.value(v));
        canonicalize_witness(res.witness, constraints, boxed);
        return res;
      }
      Int fl = to_int(rat_floor(lp.value(frac)));
      std::vector<VarBounds> upper = node;
      if (!upper[frac].lo || *upper[frac].lo < fl + 1) upper[frac].lo = fl + 1;
      std::vector<VarBounds> lower = std::move(node);
      if (!lower[frac].hi || *lower[frac].hi > fl) lower[frac].hi = fl;
      stack.push_back(std::move(upper));
      stack.push_back(std::move(lower));
    }
  }
  if (hint) {
    res.status = IntFeasResult::Status::Sat;
    res.witness = *hint;
    canonicalize_witness(res.witness, constraints, base_bounds);
    return res;
  }
  res.status = IntFeasResult::Status::Inconclusive;
  return res;
}

}  // namespace pwlmbqi
