#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pwlmbqi/ints.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

using Value = std::variant<Int, bool>;

inline bool value_is_int(const Value& v) { return std::holds_alternative<Int>(v); }
inline const Int& value_int(const Value& v) { return std::get<Int>(v); }
inline bool value_bool(const Value& v) { return std::get<bool>(v); }

inline bool operator==(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  return value_is_int(a) ? value_int(a) == value_int(b) : value_bool(a) == value_bool(b);
}

// map variable name -> value; total over the free variables being evaluated
using Valuation = std::map<std::string, Value>;

// One sampled evaluation of an uninterpreted symbol.
struct FunctionPoint {
  std::vector<Int> args;
  Value value;

  friend bool operator<(const FunctionPoint& a, const FunctionPoint& b) {
    return a.args < b.args;  // lexicographic on argument tuples
  }
};

// lambda x. slopes . x + intercept
struct LinearForm {
  std::vector<Int> slopes;
  Int intercept = 0;

  static LinearForm zero(std::size_t arity) {
    LinearForm f;
    f.slopes.assign(arity, Int(0));
    return f;
  }

  Int eval(const std::vector<Int>& args) const {
    Int v = intercept;
    for (std::size_t i = 0; i < slopes.size(); ++i) v += slopes[i] * args[i];
    return v;
  }
};

// normal . x >= rhs
struct Halfspace {
  std::vector<Int> normal;
  Int rhs = 0;

  bool contains(const std::vector<Int>& args) const {
    Int v = 0;
    for (std::size_t i = 0; i < normal.size(); ++i) v += normal[i] * args[i];
    return v >= rhs;
  }
};

// Piecewise-linear interpretation: an ITE tree whose conditions are terms
// over the formal parameters x0..x{n-1}. Function fits have LinearForm
// leaves; predicate fits have boolean or halfspace leaves.
struct PwlTerm {
  enum class Node { FuncLeaf, BoolLeaf, HalfspaceLeaf, Ite };

  Node node = Node::FuncLeaf;
  std::size_t arity = 0;
  LinearForm form;       // FuncLeaf
  bool bval = false;     // BoolLeaf
  Halfspace halfspace;   // HalfspaceLeaf
  TermRef cond;          // Ite
  std::shared_ptr<const PwlTerm> then_branch, else_branch;

  static PwlTerm func_leaf(std::size_t arity, LinearForm f) {
    PwlTerm t;
    t.node = Node::FuncLeaf;
    t.arity = arity;
    t.form = std::move(f);
    return t;
  }
  static PwlTerm bool_leaf(std::size_t arity, bool v) {
    PwlTerm t;
    t.node = Node::BoolLeaf;
    t.arity = arity;
    t.bval = v;
    return t;
  }
  static PwlTerm halfspace_leaf(std::size_t arity, Halfspace h) {
    PwlTerm t;
    t.node = Node::HalfspaceLeaf;
    t.arity = arity;
    t.halfspace = std::move(h);
    return t;
  }
  static PwlTerm ite(TermRef cond, PwlTerm then_br, PwlTerm else_br) {
    PwlTerm t;
    t.node = Node::Ite;
    t.arity = then_br.arity;
    t.cond = std::move(cond);
    t.then_branch = std::make_shared<const PwlTerm>(std::move(then_br));
    t.else_branch = std::make_shared<const PwlTerm>(std::move(else_br));
    return t;
  }

  bool is_bool_valued() const {
    switch (node) {
      case Node::FuncLeaf: return false;
      case Node::BoolLeaf:
      case Node::HalfspaceLeaf: return true;
      case Node::Ite: return then_branch->is_bool_valued();
    }
    return false;
  }
};

inline std::string param_name(std::size_t i) { return "x" + std::to_string(i); }

inline TermRef param_var(std::size_t i) { return mk_var(param_name(i), Sort::integer()); }

inline TermRef linear_form_to_term(const LinearForm& f) {
  std::vector<TermRef> parts;
  for (std::size_t i = 0; i < f.slopes.size(); ++i) {
    if (f.slopes[i] == 0) continue;
    if (f.slopes[i] == 1) {
      parts.push_back(param_var(i));
    } else if (f.slopes[i] == -1) {
      parts.push_back(mk_neg(param_var(i)));
    } else {
      parts.push_back(mk_mul_const(f.slopes[i], param_var(i)));
    }
  }
  if (f.intercept != 0 || parts.empty()) parts.push_back(mk_int(f.intercept));
  return mk_add(std::move(parts));
}

inline TermRef halfspace_to_term(const Halfspace& h) {
  LinearForm lhs{h.normal, 0};
  return mk_cmp(CmpOp::Ge, linear_form_to_term(lhs), mk_int(h.rhs));
}

// Body term over the parameter variables x0..x{n-1}.
inline TermRef pwl_to_term(const PwlTerm& p) {
  switch (p.node) {
    case PwlTerm::Node::FuncLeaf: return linear_form_to_term(p.form);
    case PwlTerm::Node::BoolLeaf: return mk_bool(p.bval);
    case PwlTerm::Node::HalfspaceLeaf: return halfspace_to_term(p.halfspace);
    case PwlTerm::Node::Ite:
      return mk_ite(p.cond, pwl_to_term(*p.then_branch), pwl_to_term(*p.else_branch));
  }
  throw std::logic_error("pwl_to_term: bad node");
}

// Total interpretation of every declared uninterpreted symbol.
class CandidateModel {
 public:
  struct Def {
    std::size_t arity = 0;
    Sort result = Sort::integer();
    PwlTerm body;
  };

  void define(const std::string& symbol, Def def) { defs_[symbol] = std::move(def); }
  bool has(const std::string& symbol) const { return defs_.count(symbol) != 0; }
  const Def& at(const std::string& symbol) const {
    auto it = defs_.find(symbol);
    if (it == defs_.end()) throw std::out_of_range("no model definition for " + symbol);
    return it->second;
  }
  const std::map<std::string, Def>& defs() const { return defs_; }
  bool empty() const { return defs_.empty(); }

 private:
  std::map<std::string, Def> defs_;
};

// Finite ground assignment: values for constants/free variables plus the
// applied instances of each uninterpreted symbol.
struct GroundModel {
  std::map<std::string, Value> consts;
  std::map<std::string, std::vector<FunctionPoint>> points;

  // no symbol maps equal argument tuples to different values
  bool functionally_consistent() const {
    for (const auto& [sym, pts] : points) {
      (void)sym;
      std::map<std::vector<Int>, Value> seen;
      for (const auto& p : pts) {
        auto [it, fresh] = seen.emplace(p.args, p.value);
        if (!fresh && !(it->second == p.value)) return false;
      }
    }
    return true;
  }
};

}  // namespace pwlmbqi
