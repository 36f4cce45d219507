#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pwlmbqi/diophantine.hpp"
#include "pwlmbqi/int_feasibility.hpp"
#include "pwlmbqi/model.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

struct FitOptions {
  // stop the greedy constraint accumulation on the first UNSAT response;
  // when off, the skip-and-continue loop is used instead
  bool greedy_stop_on_first_unsat = true;
  IntFeasOptions feas;
};

namespace detail {

// lex-sort and deduplicate; equal args must carry equal values
inline std::vector<FunctionPoint> normalize_points(std::vector<FunctionPoint> points) {
  std::sort(points.begin(), points.end());
  std::vector<FunctionPoint> out;
  for (auto& p : points) {
    if (!out.empty() && out.back().args == p.args) {
      if (!(out.back().value == p.value))
        throw std::invalid_argument("conflicting duplicate function points");
      continue;
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline bool point_bool(const FunctionPoint& p) { return value_bool(p.value); }

}  // namespace detail

// Lexicographic split between the last covered point and the first point
// yet to be covered:
//
//   x0 < a'0  \/  (x0 = a'0 /\ x1 < a'1)  \/  ...
//
// truncated at the first index where the two points differ. Every point
// lex-<= last satisfies it; every point lex->= first falsifies it.
inline TermRef split_condition(const std::vector<Int>& last_covered,
                               const std::vector<Int>& first_uncovered) {
  if (last_covered.size() != first_uncovered.size())
    throw std::invalid_argument("split_condition: arity mismatch");
  std::size_t d = 0;
  while (d < last_covered.size() && last_covered[d] == first_uncovered[d]) ++d;
  if (d == last_covered.size()) throw std::invalid_argument("split_condition: equal points");
  if (last_covered[d] > first_uncovered[d])
    throw std::invalid_argument("split_condition: points out of lexicographic order");

  std::vector<TermRef> disjuncts;
  for (std::size_t i = 0; i <= d; ++i) {
    std::vector<TermRef> conj;
    for (std::size_t j = 0; j < i; ++j)
      conj.push_back(mk_cmp(CmpOp::Eq, param_var(j), mk_int(first_uncovered[j])));
    conj.push_back(mk_cmp(CmpOp::Lt, param_var(i), mk_int(first_uncovered[i])));
    disjuncts.push_back(mk_and(std::move(conj)));
  }
  return mk_or(std::move(disjuncts));
}

// Greedy segment construction for functions: consume points in
// lexicographic order, extending the current hyperplane while the
// Diophantine system stays satisfiable, then split and recurse.
inline PwlTerm fit_function(const std::vector<FunctionPoint>& raw_points, std::size_t arity) {
  std::vector<FunctionPoint> points = detail::normalize_points(raw_points);
  if (points.empty()) return PwlTerm::func_leaf(arity, LinearForm::zero(arity));

  struct Builder {
    const std::vector<FunctionPoint>& pts;
    std::size_t arity;

    PwlTerm build(std::size_t lo) const {
      EquationSystem sys(arity);
      std::size_t i = lo;
      while (i < pts.size()) {
        EquationSystem ext = sys.push_equation(pts[i].args, value_int(pts[i].value));
        if (!ext.is_sat()) break;
        sys = std::move(ext);
        ++i;
      }
      auto [slopes, intercept] = sys.solve();
      PwlTerm segment = PwlTerm::func_leaf(arity, LinearForm{std::move(slopes), intercept});
      if (i == pts.size()) return segment;
      TermRef cond = split_condition(pts[i - 1].args, pts[i].args);
      return PwlTerm::ite(std::move(cond), std::move(segment), build(i));
    }
  };
  return Builder{points, arity}.build(0);
}

// Greedy segment construction for predicates; each segment is a single
// halfspace s.x >= c which holds on its positive points and fails on its
// negative ones. Only very simple predicates are representable per segment;
// the recursive splitter below is the stronger variant.
inline PwlTerm fit_predicate_greedy(const std::vector<FunctionPoint>& raw_points,
                                    std::size_t arity, const FitOptions& opt = {}) {
  std::vector<FunctionPoint> points = detail::normalize_points(raw_points);
  if (points.empty()) return PwlTerm::halfspace_leaf(arity, Halfspace{std::vector<Int>(arity, Int(0)), 0});

  struct Builder {
    const std::vector<FunctionPoint>& pts;
    std::size_t arity;
    const FitOptions& opt;

    PwlTerm build(std::size_t lo) const {
      InequalitySystem sys(arity, opt.feas);
      std::size_t i = lo;
      while (i < pts.size()) {
        InequalitySystem ext = sys.push_ineq(pts[i].args, detail::point_bool(pts[i]));
        if (!ext.is_sat()) break;
        sys = std::move(ext);
        ++i;
      }
      auto [normal, rhs] = sys.solve();
      PwlTerm segment = PwlTerm::halfspace_leaf(arity, Halfspace{std::move(normal), rhs});
      if (i == pts.size()) return segment;
      TermRef cond = split_condition(pts[i - 1].args, pts[i].args);
      return PwlTerm::ite(std::move(cond), std::move(segment), build(i));
    }
  };
  return Builder{points, arity, opt}.build(0);
}

// Quinlan's information gain of a binary split, on label lists.
inline double information_gain(const std::vector<bool>& left, const std::vector<bool>& right) {
  auto entropy = [](std::size_t pos, std::size_t n) {
    if (n == 0 || pos == 0 || pos == n) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(n);
    return -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
  };
  std::size_t lpos = static_cast<std::size_t>(std::count(left.begin(), left.end(), true));
  std::size_t rpos = static_cast<std::size_t>(std::count(right.begin(), right.end(), true));
  std::size_t n = left.size() + right.size();
  if (n == 0) return 0.0;
  double h_all = entropy(lpos + rpos, n);
  double h_l = entropy(lpos, left.size());
  double h_r = entropy(rpos, right.size());
  return h_all - (static_cast<double>(left.size()) / n) * h_l -
         (static_cast<double>(right.size()) / n) * h_r;
}

// Constraint-accumulation order for the recursive splitter: lex-sort, seed
// with the adjacent opposite-label pair of maximal information gain
// (leftmost on ties), then go right from the pair, then left.
inline std::vector<FunctionPoint> order_points(const std::vector<FunctionPoint>& raw_points) {
  std::vector<FunctionPoint> pts = raw_points;
  std::sort(pts.begin(), pts.end());
  std::size_t n = pts.size();

  std::size_t best = n;
  double best_gain = -1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (detail::point_bool(pts[i]) == detail::point_bool(pts[i + 1])) continue;
    std::vector<bool> left, right;
    for (std::size_t j = 0; j < n; ++j)
      (j <= i ? left : right).push_back(detail::point_bool(pts[j]));
    double g = information_gain(left, right);
    if (g > best_gain) {
      best_gain = g;
      best = i;
    }
  }
  if (best == n) throw std::invalid_argument("order_points: single-label input");

  std::vector<FunctionPoint> out;
  out.reserve(n);
  out.push_back(pts[best]);
  out.push_back(pts[best + 1]);
  for (std::size_t j = best + 2; j < n; ++j) out.push_back(pts[j]);
  for (std::size_t j = best; j-- > 0;) out.push_back(pts[j]);
  return out;
}

// Recursive predicate splitting: pick a hyperplane by greedy constraint
// accumulation in heuristic order, split the points by it, recurse on each
// side. The chosen hyperplane must separate at least one positive from one
// negative point; when the accumulated witness fails to, the seed-pair
// separator s = p+ - p-, c = s.p+ is used, which always does.
inline PwlTerm fit_predicate_recursive(const std::vector<FunctionPoint>& raw_points,
                                       std::size_t arity, const FitOptions& opt = {}) {
  std::vector<FunctionPoint> points = detail::normalize_points(raw_points);

  struct Builder {
    std::size_t arity;
    const FitOptions& opt;

    PwlTerm build(std::vector<FunctionPoint> pts) const {
      bool any_pos = false, any_neg = false;
      for (const auto& p : pts) (detail::point_bool(p) ? any_pos : any_neg) = true;
      if (!any_pos) return PwlTerm::bool_leaf(arity, false);
      if (!any_neg) return PwlTerm::bool_leaf(arity, true);

      std::vector<FunctionPoint> ordered = order_points(pts);
      const FunctionPoint& seed_a = ordered[0];
      const FunctionPoint& seed_b = ordered[1];

      InequalitySystem sys(arity, opt.feas);
      bool accepted_any = false;
      for (const auto& p : ordered) {
        InequalitySystem ext = sys.push_ineq(p.args, detail::point_bool(p));
        if (ext.is_sat()) {
          sys = std::move(ext);
          accepted_any = true;
        } else if (opt.greedy_stop_on_first_unsat) {
          break;
        }
      }

      std::vector<Int> normal;
      Int rhs;
      if (accepted_any) {
        std::tie(normal, rhs) = sys.solve();
      }
      auto side = [&](const FunctionPoint& p) {
        Int v = 0;
        for (std::size_t i = 0; i < arity; ++i) v += normal[i] * p.args[i];
        return v >= rhs;
      };
      auto separates = [&] {
        bool pos_above = false, neg_below = false;
        for (const auto& p : pts) {
          if (side(p)) {
            if (detail::point_bool(p)) pos_above = true;
          } else if (!detail::point_bool(p)) {
            neg_below = true;
          }
        }
        return pos_above && neg_below;
      };
      if (!accepted_any || !separates()) {
        const FunctionPoint& pos = detail::point_bool(seed_a) ? seed_a : seed_b;
        const FunctionPoint& neg = detail::point_bool(seed_a) ? seed_b : seed_a;
        normal.assign(arity, Int(0));
        rhs = 0;
        for (std::size_t i = 0; i < arity; ++i) {
          normal[i] = pos.args[i] - neg.args[i];
          rhs += normal[i] * pos.args[i];
        }
      }

      std::vector<FunctionPoint> above, below;
      for (auto& p : pts) (side(p) ? above : below).push_back(std::move(p));
      TermRef cond = halfspace_to_term(Halfspace{normal, rhs});
      return PwlTerm::ite(std::move(cond), build(std::move(above)), build(std::move(below)));
    }
  };
  return Builder{arity, opt}.build(std::move(points));
}

}  // namespace pwlmbqi
