#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwlmbqi/model.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

// Plug the counterexample values into the binders of a prenex universal.
inline TermRef instantiate(const TermRef& q, const Valuation& c) {
  if (q->kind != Kind::Forall) throw std::invalid_argument("instantiate: not a universal");
  std::map<std::string, TermRef> subst;
  for (const auto& b : q->binders) {
    auto it = c.find(b.name);
    if (it == c.end()) throw std::invalid_argument("instantiate: missing binder value " + b.name);
    subst[b.name] = value_is_int(it->second) ? mk_int(value_int(it->second))
                                             : mk_bool(value_bool(it->second));
  }
  return substitute(q->args[0], subst);
}

// Binders as free variables plus the negated body; the negation is pushed
// over the top connective only.
inline std::pair<std::vector<Binder>, TermRef> negate_for_check(const TermRef& q) {
  if (q->kind != Kind::Forall) throw std::invalid_argument("negate_for_check: not a universal");
  const TermRef& body = q->args[0];
  if (!is_quantifier_free(body))
    throw std::invalid_argument("negate_for_check: nested quantifier in body");

  TermRef neg;
  switch (body->kind) {
    case Kind::BoolConst:
      neg = mk_bool(!body->bvalue);
      break;
    case Kind::Not:
      neg = body->args[0];
      break;
    case Kind::Cmp: {
      CmpOp flipped;
      switch (body->cmp) {
        case CmpOp::Eq: flipped = CmpOp::Eq; break;  // handled below
        case CmpOp::Lt: flipped = CmpOp::Ge; break;
        case CmpOp::Le: flipped = CmpOp::Gt; break;
        case CmpOp::Gt: flipped = CmpOp::Le; break;
        case CmpOp::Ge: flipped = CmpOp::Lt; break;
      }
      neg = body->cmp == CmpOp::Eq ? mk_not(body)
                                   : mk_cmp(flipped, body->args[0], body->args[1]);
      break;
    }
    case Kind::Implies:
      neg = mk_and({body->args[0], mk_not(body->args[1])});
      break;
    case Kind::And: {
      std::vector<TermRef> parts;
      for (const auto& a : body->args) parts.push_back(mk_not(a));
      neg = mk_or(std::move(parts));
      break;
    }
    case Kind::Or: {
      std::vector<TermRef> parts;
      for (const auto& a : body->args) parts.push_back(mk_not(a));
      neg = mk_and(std::move(parts));
      break;
    }
    default:
      neg = mk_not(body);
  }
  return {q->binders, neg};
}

// Assertion surface accepted by the engine: each assertion is ground or one
// outermost universal block. Top-level conjunctions are split and nested
// universals merged into a single binder block first.
struct PreparedAssertions {
  std::vector<TermRef> ground;
  std::vector<TermRef> quantified;  // Forall nodes with quantifier-free bodies
};

inline std::optional<std::string> prepare_assertions(const std::vector<TermRef>& assertions,
                                                     PreparedAssertions& out) {
  std::vector<TermRef> work(assertions.rbegin(), assertions.rend());
  while (!work.empty()) {
    TermRef t = work.back();
    work.pop_back();
    if (t->kind == Kind::And) {
      for (auto it = t->args.rbegin(); it != t->args.rend(); ++it) work.push_back(*it);
      continue;
    }
    if (t->kind == Kind::Forall) {
      std::vector<Binder> binders = t->binders;
      TermRef body = t->args[0];
      while (body->kind == Kind::Forall) {
        // alpha-rename on collision so the blocks can merge
        std::set<std::string> taken;
        for (const auto& b : binders) taken.insert(b.name);
        std::map<std::string, TermRef> rename;
        std::vector<Binder> inner = body->binders;
        for (auto& b : inner) {
          if (taken.count(b.name)) {
            std::string nn = detail::fresh_name(b.name, taken);
            rename[b.name] = mk_var(nn, b.sort);
            b.name = nn;
          }
          taken.insert(b.name);
        }
        TermRef inner_body = rename.empty() ? body->args[0] : substitute(body->args[0], rename);
        binders.insert(binders.end(), inner.begin(), inner.end());
        body = inner_body;
      }
      if (!is_quantifier_free(body)) return "unsupported quantifier structure";
      out.quantified.push_back(mk_forall(std::move(binders), body));
      continue;
    }
    if (!is_quantifier_free(t)) return "unsupported quantifier structure";
    out.ground.push_back(t);
  }
  return std::nullopt;
}

}  // namespace pwlmbqi
