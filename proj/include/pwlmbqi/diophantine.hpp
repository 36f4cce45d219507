#pragma once

#include <stdexcept>
#include <vector>

#include "pwlmbqi/ints.hpp"

namespace pwlmbqi {

// Incremental solver for systems of linear Diophantine equations
//
//     a . y + c = v        (unknowns y in Z^n, intercept c in Z)
//
// over the n+1 unknowns z = (y_1..y_n, c). Internally the system maintains a
// unimodular column transform U with A*U = H, H in incremental echelon form,
// so each pushed row either fixes one transformed unknown w (with an exact
// divisibility check) or reduces to a consistency equation. Unimodular column
// operations preserve the integer solution set exactly, so SAT answers are
// definitive in both directions. Free transformed unknowns are pinned to 0,
// which makes the solution canonical: single points yield constant functions.
//
// Systems are immutable values; push_equation returns an extended copy so a
// failing constraint can simply be dropped by the caller.
class EquationSystem {
 public:
  explicit EquationSystem(std::size_t arity) : arity_(arity) {
    std::size_t m = arity_ + 1;
    transform_.assign(m, std::vector<Int>(m, Int(0)));
    for (std::size_t i = 0; i < m; ++i) transform_[i][i] = 1;
    pivoted_.assign(m, false);
    wvalue_.assign(m, Int(0));
  }

  std::size_t arity() const { return arity_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::pair<std::vector<Int>, Int>>& equations() const { return rows_; }

  // Add the row a . y + c = v. The original system is unchanged.
  EquationSystem push_equation(const std::vector<Int>& a, const Int& v) const {
    if (a.size() != arity_) throw std::invalid_argument("push_equation: arity mismatch");
    EquationSystem next = *this;
    next.rows_.emplace_back(a, v);
    if (!next.sat_) return next;

    std::size_t m = arity_ + 1;
    // row over z = (y, c), then transformed through U: r' = r . U
    std::vector<Int> row(m);
    for (std::size_t j = 0; j < arity_; ++j) row[j] = a[j];
    row[arity_] = 1;
    std::vector<Int> r(m, Int(0));
    for (std::size_t j = 0; j < m; ++j) {
      if (row[j] == 0) continue;
      for (std::size_t k = 0; k < m; ++k) r[k] += row[j] * next.transform_[j][k];
    }

    // subtract contributions of already-pinned transformed unknowns
    Int residual = v;
    for (std::size_t k = 0; k < m; ++k) {
      if (next.pivoted_[k]) {
        residual -= r[k] * next.wvalue_[k];
        r[k] = 0;
      }
    }

    // fold the remaining free-column entries into a single pivot via
    // pairwise extended-gcd column operations
    std::size_t pivot = m;
    for (std::size_t k = 0; k < m; ++k) {
      if (r[k] == 0) continue;
      if (pivot == m) {
        pivot = k;
        continue;
      }
      next.combine_columns(r, pivot, k);
    }

    if (pivot == m) {
      next.sat_ = residual == 0;
      return next;
    }
    if (r[pivot] < 0) {
      r[pivot] = -r[pivot];
      for (std::size_t j = 0; j < m; ++j) next.transform_[j][pivot] = -next.transform_[j][pivot];
    }
    if (residual % r[pivot] != 0) {
      next.sat_ = false;
      return next;
    }
    next.pivoted_[pivot] = true;
    next.wvalue_[pivot] = residual / r[pivot];
    return next;
  }

  bool is_sat() const { return sat_; }

  // Canonical solution (slopes, intercept); requires is_sat().
  std::pair<std::vector<Int>, Int> solve() const {
    if (!sat_) throw std::logic_error("solve called on UNSAT system");
    std::size_t m = arity_ + 1;
    std::vector<Int> z(m, Int(0));
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        if (pivoted_[k] && wvalue_[k] != 0) z[j] += transform_[j][k] * wvalue_[k];
      }
    }
    std::vector<Int> slopes(z.begin(), z.begin() + arity_);
    return {std::move(slopes), z[arity_]};
  }

 private:
  // Unimodular operation on columns (p, k) of U mapping the row entries
  // (r[p], r[k]) to (gcd, 0).
  void combine_columns(std::vector<Int>& r, std::size_t p, std::size_t k) {
    Int a = r[p], b = r[k];
    // extended gcd: xa + yb = g
    Int old_r = a, rr = b, old_s = 1, ss = 0, old_t = 0, tt = 1;
    while (rr != 0) {
      Int q = old_r / rr;  // truncated is fine for the Bezout recurrence
      Int tmp = old_r - q * rr;
      old_r = rr;
      rr = tmp;
      tmp = old_s - q * ss;
      old_s = ss;
      ss = tmp;
      tmp = old_t - q * tt;
      old_t = tt;
      tt = tmp;
    }
    Int g = old_r, x = old_s, y = old_t;
    if (g < 0) {
      g = -g;
      x = -x;
      y = -y;
    }
    Int ap = a / g, bp = b / g;
    // columns (p,k) <- (x*p + y*k, -bp*p + ap*k); determinant x*ap + y*bp = 1
    std::size_t m = arity_ + 1;
    for (std::size_t j = 0; j < m; ++j) {
      Int up = transform_[j][p], uk = transform_[j][k];
      transform_[j][p] = x * up + y * uk;
      transform_[j][k] = -bp * up + ap * uk;
    }
    r[p] = g;
    r[k] = 0;
  }

  std::size_t arity_;
  bool sat_ = true;
  std::vector<std::vector<Int>> transform_;  // U, (n+1) x (n+1)
  std::vector<bool> pivoted_;
  std::vector<Int> wvalue_;
  std::vector<std::pair<std::vector<Int>, Int>> rows_;
};

}  // namespace pwlmbqi
