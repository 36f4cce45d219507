#pragma once

#include <algorithm>
#include <vector>

#include "pwlmbqi/linear.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

namespace detail {

// sum k_i*u_i <?> c with gcd-reduced coefficients; Lt/Gt/Ge are rewritten into
// Le over the integers, equalities get a positive leading coefficient.
inline TermRef canonical_cmp(CmpOp op, const TermRef& lhs, const TermRef& rhs) {
  LinearComb lc = linearize(lhs);
  lc.add(linearize(rhs), -1);
  Int c = -lc.constant;
  lc.constant = 0;

  if (lc.coeffs.empty()) {
    switch (op) {
      case CmpOp::Eq: return mk_bool(c == 0);
      case CmpOp::Lt: return mk_bool(0 < c);
      case CmpOp::Le: return mk_bool(0 <= c);
      case CmpOp::Gt: return mk_bool(0 > c);
      case CmpOp::Ge: return mk_bool(0 >= c);
    }
  }

  // orient toward Le / Eq
  bool flip = (op == CmpOp::Gt || op == CmpOp::Ge);
  if (flip) {
    for (auto& [u, k] : lc.coeffs) k = -k;
    c = -c;
    op = (op == CmpOp::Gt) ? CmpOp::Lt : CmpOp::Le;
  }
  if (op == CmpOp::Lt) {
    op = CmpOp::Le;
    c -= 1;
  }

  Int g = 0;
  for (const auto& [u, k] : lc.coeffs) g = gcd(g, k);
  if (op == CmpOp::Eq) {
    if (c % g != 0) return mk_false();
    for (auto& [u, k] : lc.coeffs) k /= g;
    c /= g;
    if (lc.coeffs.begin()->second < 0) {
      for (auto& [u, k] : lc.coeffs) k = -k;
      c = -c;
    }
  } else {  // Le: floor-tighten the bound
    for (auto& [u, k] : lc.coeffs) k /= g;
    c = floor_div(c, g);
  }
  return mk_cmp(op, linear_to_term(lc), mk_int(c));
}

}  // namespace detail

// Constant folding, ite/boolean folding, And/Or flattening, and comparison
// canonicalization. Semantics-preserving over total evaluations.
inline TermRef simplify(const TermRef& t) {
  switch (t->kind) {
    case Kind::IntConst:
    case Kind::BoolConst:
    case Kind::Var:
      return t;
    case Kind::Apply: {
      std::vector<TermRef> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(simplify(a));
      return mk_apply(t->name, std::move(args), t->sort);
    }
    case Kind::Add:
    case Kind::Sub:
    case Kind::Neg:
    case Kind::MulConst: {
      std::vector<TermRef> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(simplify(a));
      auto n = std::make_shared<TermNode>(t->kind, t->sort);
      n->value = t->value;
      n->args = std::move(args);
      return linear_to_term(linearize(detail::finish(std::move(n))));
    }
    case Kind::Div:
    case Kind::Mod: {
      TermRef a = simplify(t->args[0]);
      TermRef b = simplify(t->args[1]);
      if (b->kind == Kind::IntConst && b->value != 0) {
        if (a->kind == Kind::IntConst)
          return mk_int(t->kind == Kind::Div ? euclid_div(a->value, b->value)
                                             : euclid_mod(a->value, b->value));
        if (b->value == 1 || b->value == -1) {
          if (t->kind == Kind::Mod) return mk_int(0);
          return b->value == 1 ? a : simplify(mk_neg(a));
        }
      }
      return t->kind == Kind::Div ? mk_div(a, b) : mk_mod(a, b);
    }
    case Kind::Cmp:
      return detail::canonical_cmp(t->cmp, simplify(t->args[0]), simplify(t->args[1]));
    case Kind::Not: {
      TermRef a = simplify(t->args[0]);
      if (a->kind == Kind::BoolConst) return mk_bool(!a->bvalue);
      if (a->kind == Kind::Not) return a->args[0];
      if (a->kind == Kind::Cmp && a->cmp == CmpOp::Le)
        return detail::canonical_cmp(CmpOp::Gt, a->args[0], a->args[1]);
      return mk_not(a);
    }
    case Kind::And:
    case Kind::Or: {
      const bool dominant = t->kind == Kind::Or;
      std::vector<TermRef> flat;
      for (const auto& raw : t->args) {
        TermRef a = simplify(raw);
        if (a->kind == Kind::BoolConst) {
          if (a->bvalue == dominant) return mk_bool(dominant);
          continue;
        }
        if (a->kind == t->kind) {
          flat.insert(flat.end(), a->args.begin(), a->args.end());
        } else {
          flat.push_back(a);
        }
      }
      std::sort(flat.begin(), flat.end(), TermLess{});
      flat.erase(std::unique(flat.begin(), flat.end(),
                             [](const TermRef& x, const TermRef& y) { return equal(x, y); }),
                 flat.end());
      return t->kind == Kind::And ? mk_and(std::move(flat)) : mk_or(std::move(flat));
    }
    case Kind::Implies: {
      TermRef a = simplify(t->args[0]);
      TermRef b = simplify(t->args[1]);
      if (a->kind == Kind::BoolConst) return a->bvalue ? b : mk_true();
      if (b->kind == Kind::BoolConst) return b->bvalue ? mk_true() : simplify(mk_not(a));
      return mk_implies(a, b);
    }
    case Kind::Ite: {
      TermRef c = simplify(t->args[0]);
      if (c->kind == Kind::BoolConst) return simplify(t->args[c->bvalue ? 1 : 2]);
      TermRef th = simplify(t->args[1]);
      TermRef el = simplify(t->args[2]);
      if (equal(th, el)) return th;
      return mk_ite(c, th, el);
    }
    case Kind::Forall:
    case Kind::Exists: {
      TermRef body = simplify(t->args[0]);
      if (body->kind == Kind::BoolConst) return body;  // Int domain is nonempty
      return mk_quant(t->kind, t->binders, body);
    }
  }
  return t;
}

}  // namespace pwlmbqi
