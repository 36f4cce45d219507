#pragma once

#include <cassert>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pwlmbqi/ints.hpp"
#include "pwlmbqi/sorts.hpp"

namespace pwlmbqi {

enum class Kind {
  IntConst,
  BoolConst,
  Var,
  Apply,
  Add,   // n-ary
  Sub,   // binary
  Neg,
  MulConst,  // literal coefficient times term
  Div,   // Euclidean, SMT-LIB `div`
  Mod,
  Cmp,
  Not,
  And,   // n-ary
  Or,    // n-ary
  Implies,
  Ite,
  Forall,
  Exists,
};

enum class CmpOp { Eq, Lt, Le, Gt, Ge };

struct TermNode;
using TermRef = std::shared_ptr<const TermNode>;

struct Binder {
  std::string name;
  Sort sort = Sort::integer();
};

struct TermNode {
  Kind kind;
  Sort sort;
  Int value;          // IntConst / MulConst coefficient
  bool bvalue = false;  // BoolConst
  std::string name;   // Var / Apply symbol
  CmpOp cmp = CmpOp::Eq;
  std::vector<TermRef> args;
  std::vector<Binder> binders;  // Forall / Exists
  std::size_t hash = 0;

  TermNode(Kind k, Sort s) : kind(k), sort(std::move(s)) {}
};

namespace detail {

inline std::size_t hash_combine(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

inline std::size_t compute_hash(const TermNode& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x9e3779b1u;
  h = hash_combine(h, static_cast<std::size_t>(n.sort.kind()));
  h = hash_combine(h, std::hash<std::string>{}(n.sort.name()));
  h = hash_combine(h, hash_int(n.value));
  h = hash_combine(h, n.bvalue ? 2u : 1u);
  h = hash_combine(h, std::hash<std::string>{}(n.name));
  h = hash_combine(h, static_cast<std::size_t>(n.cmp));
  for (const auto& b : n.binders) {
    h = hash_combine(h, std::hash<std::string>{}(b.name));
    h = hash_combine(h, static_cast<std::size_t>(b.sort.kind()));
  }
  for (const auto& a : n.args) h = hash_combine(h, a->hash);
  return h;
}

inline TermRef finish(std::shared_ptr<TermNode> n) {
  n->hash = compute_hash(*n);
  return n;
}

}  // namespace detail

// Structural comparison; total order used for canonical forms and map keys.
inline int compare(const TermRef& a, const TermRef& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->sort != b->sort) return a->sort < b->sort ? -1 : 1;
  if (a->value != b->value) return a->value < b->value ? -1 : 1;
  if (a->bvalue != b->bvalue) return a->bvalue < b->bvalue ? -1 : 1;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  if (a->cmp != b->cmp) return a->cmp < b->cmp ? -1 : 1;
  if (a->binders.size() != b->binders.size()) return a->binders.size() < b->binders.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->binders.size(); ++i) {
    if (int c = a->binders[i].name.compare(b->binders[i].name)) return c < 0 ? -1 : 1;
    if (a->binders[i].sort != b->binders[i].sort) return a->binders[i].sort < b->binders[i].sort ? -1 : 1;
  }
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (int c = compare(a->args[i], b->args[i])) return c;
  }
  return 0;
}

inline bool equal(const TermRef& a, const TermRef& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash) return false;
  return compare(a, b) == 0;
}

struct TermLess {
  bool operator()(const TermRef& a, const TermRef& b) const { return compare(a, b) < 0; }
};

// ---- factories ----------------------------------------------------------

inline TermRef mk_int(Int v) {
  auto n = std::make_shared<TermNode>(Kind::IntConst, Sort::integer());
  n->value = std::move(v);
  return detail::finish(std::move(n));
}

inline TermRef mk_bool(bool v) {
  auto n = std::make_shared<TermNode>(Kind::BoolConst, Sort::boolean());
  n->bvalue = v;
  return detail::finish(std::move(n));
}

inline TermRef mk_true() { return mk_bool(true); }
inline TermRef mk_false() { return mk_bool(false); }

inline TermRef mk_var(std::string name, Sort sort) {
  auto n = std::make_shared<TermNode>(Kind::Var, std::move(sort));
  n->name = std::move(name);
  return detail::finish(std::move(n));
}

inline TermRef mk_apply(std::string symbol, std::vector<TermRef> args, Sort result) {
  auto n = std::make_shared<TermNode>(Kind::Apply, std::move(result));
  n->name = std::move(symbol);
  n->args = std::move(args);
  return detail::finish(std::move(n));
}

inline TermRef mk_add(std::vector<TermRef> args) {
  assert(!args.empty());
  if (args.size() == 1) return args[0];
  auto n = std::make_shared<TermNode>(Kind::Add, Sort::integer());
  n->args = std::move(args);
  return detail::finish(std::move(n));
}

inline TermRef mk_sub(TermRef a, TermRef b) {
  auto n = std::make_shared<TermNode>(Kind::Sub, Sort::integer());
  n->args = {std::move(a), std::move(b)};
  return detail::finish(std::move(n));
}

inline TermRef mk_neg(TermRef a) {
  auto n = std::make_shared<TermNode>(Kind::Neg, Sort::integer());
  n->args = {std::move(a)};
  return detail::finish(std::move(n));
}

inline TermRef mk_mul_const(Int coeff, TermRef a) {
  auto n = std::make_shared<TermNode>(Kind::MulConst, Sort::integer());
  n->value = std::move(coeff);
  n->args = {std::move(a)};
  return detail::finish(std::move(n));
}

inline TermRef mk_div(TermRef a, TermRef b) {
  auto n = std::make_shared<TermNode>(Kind::Div, Sort::integer());
  n->args = {std::move(a), std::move(b)};
  return detail::finish(std::move(n));
}

inline TermRef mk_mod(TermRef a, TermRef b) {
  auto n = std::make_shared<TermNode>(Kind::Mod, Sort::integer());
  n->args = {std::move(a), std::move(b)};
  return detail::finish(std::move(n));
}

inline TermRef mk_cmp(CmpOp op, TermRef a, TermRef b) {
  assert(a->sort.is_int() && b->sort.is_int());
  auto n = std::make_shared<TermNode>(Kind::Cmp, Sort::boolean());
  n->cmp = op;
  n->args = {std::move(a), std::move(b)};
  return detail::finish(std::move(n));
}

inline TermRef mk_not(TermRef a) {
  auto n = std::make_shared<TermNode>(Kind::Not, Sort::boolean());
  n->args = {std::move(a)};
  return detail::finish(std::move(n));
}

inline TermRef mk_and(std::vector<TermRef> args) {
  if (args.empty()) return mk_true();
  if (args.size() == 1) return args[0];
  auto n = std::make_shared<TermNode>(Kind::And, Sort::boolean());
  n->args = std::move(args);
  return detail::finish(std::move(n));
}

inline TermRef mk_or(std::vector<TermRef> args) {
  if (args.empty()) return mk_false();
  if (args.size() == 1) return args[0];
  auto n = std::make_shared<TermNode>(Kind::Or, Sort::boolean());
  n->args = std::move(args);
  return detail::finish(std::move(n));
}

inline TermRef mk_implies(TermRef a, TermRef b) {
  auto n = std::make_shared<TermNode>(Kind::Implies, Sort::boolean());
  n->args = {std::move(a), std::move(b)};
  return detail::finish(std::move(n));
}

inline TermRef mk_ite(TermRef c, TermRef t, TermRef e) {
  assert(c->sort.is_bool());
  assert(t->sort == e->sort);
  auto n = std::make_shared<TermNode>(Kind::Ite, t->sort);
  n->args = {std::move(c), std::move(t), std::move(e)};
  return detail::finish(std::move(n));
}

inline TermRef mk_quant(Kind k, std::vector<Binder> binders, TermRef body) {
  assert(k == Kind::Forall || k == Kind::Exists);
  assert(body->sort.is_bool());
  auto n = std::make_shared<TermNode>(k, Sort::boolean());
  n->binders = std::move(binders);
  n->args = {std::move(body)};
  return detail::finish(std::move(n));
}

inline TermRef mk_forall(std::vector<Binder> binders, TermRef body) {
  return mk_quant(Kind::Forall, std::move(binders), std::move(body));
}

inline TermRef mk_exists(std::vector<Binder> binders, TermRef body) {
  return mk_quant(Kind::Exists, std::move(binders), std::move(body));
}

// ---- traversal helpers ---------------------------------------------------

inline bool is_quantifier_free(const TermRef& t) {
  if (t->kind == Kind::Forall || t->kind == Kind::Exists) return false;
  for (const auto& a : t->args)
    if (!is_quantifier_free(a)) return false;
  return true;
}

inline void collect_free_vars(const TermRef& t, std::set<std::string>& bound,
                              std::map<std::string, Sort>& out) {
  switch (t->kind) {
    case Kind::Var:
      if (!bound.count(t->name)) out.emplace(t->name, t->sort);
      return;
    case Kind::Forall:
    case Kind::Exists: {
      std::vector<std::string> added;
      for (const auto& b : t->binders)
        if (bound.insert(b.name).second) added.push_back(b.name);
      collect_free_vars(t->args[0], bound, out);
      for (const auto& n : added) bound.erase(n);
      return;
    }
    default:
      for (const auto& a : t->args) collect_free_vars(a, bound, out);
  }
}

inline std::map<std::string, Sort> free_vars(const TermRef& t) {
  std::set<std::string> bound;
  std::map<std::string, Sort> out;
  collect_free_vars(t, bound, out);
  return out;
}

// Uninterpreted symbols applied in a term, name -> arity (0 for constants).
inline void collect_symbols(const TermRef& t, std::map<std::string, std::size_t>& out) {
  if (t->kind == Kind::Apply) out.emplace(t->name, t->args.size());
  for (const auto& a : t->args) collect_symbols(a, out);
}

// ---- substitution --------------------------------------------------------

namespace detail {
inline std::string fresh_name(const std::string& base, std::set<std::string>& used) {
  for (int i = 0;; ++i) {
    std::string cand = base + "!" + std::to_string(i);
    if (used.insert(cand).second) return cand;
  }
}
}  // namespace detail

// Capture-avoiding substitution of free variables.
inline TermRef substitute(const TermRef& t, const std::map<std::string, TermRef>& subst) {
  if (subst.empty()) return t;
  switch (t->kind) {
    case Kind::Var: {
      auto it = subst.find(t->name);
      return it == subst.end() ? t : it->second;
    }
    case Kind::IntConst:
    case Kind::BoolConst:
      return t;
    case Kind::Forall:
    case Kind::Exists: {
      std::map<std::string, TermRef> inner = subst;
      for (const auto& b : t->binders) inner.erase(b.name);
      // rename binders that would capture a free variable of a replacement
      std::set<std::string> replacement_frees;
      for (const auto& [k, v] : inner) {
        (void)k;
        for (const auto& [fn, fs] : free_vars(v)) {
          (void)fs;
          replacement_frees.insert(fn);
        }
      }
      std::vector<Binder> binders = t->binders;
      std::set<std::string> used = replacement_frees;
      for (const auto& [fn, fs] : free_vars(t)) {
        (void)fs;
        used.insert(fn);
      }
      bool renamed = false;
      for (auto& b : binders) {
        if (replacement_frees.count(b.name)) {
          std::string nn = detail::fresh_name(b.name, used);
          inner[b.name] = mk_var(nn, b.sort);
          b.name = nn;
          renamed = true;
        }
      }
      (void)renamed;
      if (inner.empty()) return t;
      return mk_quant(t->kind, std::move(binders), substitute(t->args[0], inner));
    }
    default: {
      bool changed = false;
      std::vector<TermRef> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) {
        args.push_back(substitute(a, subst));
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
  }
}

}  // namespace pwlmbqi
