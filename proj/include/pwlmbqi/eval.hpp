#pragma once

#include <stdexcept>
#include <string>

#include "pwlmbqi/model.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

Value evaluate_value(const TermRef& t, const Valuation& env, const CandidateModel* m);

inline bool eval_pwl_bool(const PwlTerm& p, const std::vector<Int>& args);
inline Int eval_pwl_int(const PwlTerm& p, const std::vector<Int>& args);

inline Value eval_pwl(const PwlTerm& p, const std::vector<Int>& args) {
  switch (p.node) {
    case PwlTerm::Node::FuncLeaf:
      return p.form.eval(args);
    case PwlTerm::Node::BoolLeaf:
      return p.bval;
    case PwlTerm::Node::HalfspaceLeaf:
      return p.halfspace.contains(args);
    case PwlTerm::Node::Ite: {
      Valuation env;
      for (std::size_t i = 0; i < args.size(); ++i) env[param_name(i)] = args[i];
      bool c = value_bool(evaluate_value(p.cond, env, nullptr));
      return eval_pwl(c ? *p.then_branch : *p.else_branch, args);
    }
  }
  throw std::logic_error("eval_pwl: bad node");
}

inline bool eval_pwl_bool(const PwlTerm& p, const std::vector<Int>& args) {
  return value_bool(eval_pwl(p, args));
}
inline Int eval_pwl_int(const PwlTerm& p, const std::vector<Int>& args) {
  return value_int(eval_pwl(p, args));
}

inline Value apply_model(const CandidateModel& m, const std::string& symbol,
                         const std::vector<Int>& args) {
  const auto& def = m.at(symbol);
  if (def.arity != args.size()) throw EvalError("arity mismatch applying " + symbol);
  return eval_pwl(def.body, args);
}

namespace detail {

inline bool cmp_holds(CmpOp op, const Int& a, const Int& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

}  // namespace detail

// Evaluation under standard integer semantics, with uninterpreted
// applications unfolded through the candidate model. Division by zero is a
// designated evaluation error. `and`/`or`/`=>` tolerate an erroring operand
// when another operand already decides the result.
inline Value evaluate_value(const TermRef& t, const Valuation& env, const CandidateModel* m) {
  switch (t->kind) {
    case Kind::IntConst: return t->value;
    case Kind::BoolConst: return t->bvalue;
    case Kind::Var: {
      auto it = env.find(t->name);
      if (it == env.end()) throw EvalError("unbound variable " + t->name);
      return it->second;
    }
    case Kind::Apply: {
      if (!m) throw EvalError("no interpretation for " + t->name);
      std::vector<Int> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(value_int(evaluate_value(a, env, m)));
      return apply_model(*m, t->name, args);
    }
    case Kind::Add: {
      Int v = 0;
      for (const auto& a : t->args) v += value_int(evaluate_value(a, env, m));
      return v;
    }
    case Kind::Sub:
      return value_int(evaluate_value(t->args[0], env, m)) -
             value_int(evaluate_value(t->args[1], env, m));
    case Kind::Neg: return -value_int(evaluate_value(t->args[0], env, m));
    case Kind::MulConst: return t->value * value_int(evaluate_value(t->args[0], env, m));
    case Kind::Div:
    case Kind::Mod: {
      Int a = value_int(evaluate_value(t->args[0], env, m));
      Int b = value_int(evaluate_value(t->args[1], env, m));
      if (b == 0) throw EvalError("division by zero");
      return t->kind == Kind::Div ? euclid_div(a, b) : euclid_mod(a, b);
    }
    case Kind::Cmp:
      return detail::cmp_holds(t->cmp, value_int(evaluate_value(t->args[0], env, m)),
                               value_int(evaluate_value(t->args[1], env, m)));
    case Kind::Not: return !value_bool(evaluate_value(t->args[0], env, m));
    case Kind::And:
    case Kind::Or: {
      const bool decider = t->kind == Kind::Or;
      bool saw_error = false;
      for (const auto& a : t->args) {
        try {
          if (value_bool(evaluate_value(a, env, m)) == decider) return decider;
        } catch (const EvalError&) {
          saw_error = true;
        }
      }
      if (saw_error) throw EvalError("undecided operand error in and/or");
      return !decider;
    }
    case Kind::Implies: {
      bool saw_error = false;
      try {
        if (!value_bool(evaluate_value(t->args[0], env, m))) return true;
      } catch (const EvalError&) {
        saw_error = true;
      }
      try {
        if (value_bool(evaluate_value(t->args[1], env, m))) return true;
      } catch (const EvalError&) {
        saw_error = true;
      }
      if (saw_error) throw EvalError("undecided operand error in =>");
      return false;
    }
    case Kind::Ite: {
      bool c = value_bool(evaluate_value(t->args[0], env, m));
      return evaluate_value(t->args[c ? 1 : 2], env, m);
    }
    case Kind::Forall:
    case Kind::Exists:
      throw EvalError("cannot evaluate quantified term");
  }
  throw std::logic_error("evaluate_value: bad kind");
}

inline bool evaluate_bool(const TermRef& t, const Valuation& env, const CandidateModel& m) {
  return value_bool(evaluate_value(t, env, &m));
}
inline bool evaluate_bool(const TermRef& t, const Valuation& env) {
  return value_bool(evaluate_value(t, env, nullptr));
}
inline Int evaluate_int(const TermRef& t, const Valuation& env, const CandidateModel& m) {
  return value_int(evaluate_value(t, env, &m));
}
inline Int evaluate_int(const TermRef& t, const Valuation& env) {
  return value_int(evaluate_value(t, env, nullptr));
}

// Evaluation against a finite ground model: applications look up their
// sampled point, which must exist.
inline Value evaluate_ground(const TermRef& t, const GroundModel& gm, const Valuation& env = {}) {
  switch (t->kind) {
    case Kind::Var: {
      auto it = env.find(t->name);
      if (it != env.end()) return it->second;
      auto ct = gm.consts.find(t->name);
      if (ct == gm.consts.end()) throw EvalError("unbound variable " + t->name);
      return ct->second;
    }
    case Kind::Apply: {
      if (t->args.empty()) {
        auto it = gm.consts.find(t->name);
        if (it == gm.consts.end()) throw EvalError("no ground value for " + t->name);
        return it->second;
      }
      std::vector<Int> args;
      args.reserve(t->args.size());
      for (const auto& a : t->args) args.push_back(value_int(evaluate_ground(a, gm, env)));
      auto it = gm.points.find(t->name);
      if (it != gm.points.end()) {
        for (const auto& p : it->second) {
          if (p.args == args) return p.value;
        }
      }
      throw EvalError("no sampled point for " + t->name);
    }
    case Kind::IntConst: return t->value;
    case Kind::BoolConst: return t->bvalue;
    default: {
      // reuse the main evaluator by treating all leaves through this path
      switch (t->kind) {
        case Kind::Add: {
          Int v = 0;
          for (const auto& a : t->args) v += value_int(evaluate_ground(a, gm, env));
          return v;
        }
        case Kind::Sub:
          return value_int(evaluate_ground(t->args[0], gm, env)) -
                 value_int(evaluate_ground(t->args[1], gm, env));
        case Kind::Neg: return -value_int(evaluate_ground(t->args[0], gm, env));
        case Kind::MulConst: return t->value * value_int(evaluate_ground(t->args[0], gm, env));
        case Kind::Div:
        case Kind::Mod: {
          Int a = value_int(evaluate_ground(t->args[0], gm, env));
          Int b = value_int(evaluate_ground(t->args[1], gm, env));
          if (b == 0) throw EvalError("division by zero");
          return t->kind == Kind::Div ? euclid_div(a, b) : euclid_mod(a, b);
        }
        case Kind::Cmp:
          return detail::cmp_holds(t->cmp, value_int(evaluate_ground(t->args[0], gm, env)),
                                   value_int(evaluate_ground(t->args[1], gm, env)));
        case Kind::Not: return !value_bool(evaluate_ground(t->args[0], gm, env));
        case Kind::And: {
          for (const auto& a : t->args)
            if (!value_bool(evaluate_ground(a, gm, env))) return false;
          return true;
        }
        case Kind::Or: {
          for (const auto& a : t->args)
            if (value_bool(evaluate_ground(a, gm, env))) return true;
          return false;
        }
        case Kind::Implies:
          return !value_bool(evaluate_ground(t->args[0], gm, env)) ||
                 value_bool(evaluate_ground(t->args[1], gm, env));
        case Kind::Ite: {
          bool c = value_bool(evaluate_ground(t->args[0], gm, env));
          return evaluate_ground(t->args[c ? 1 : 2], gm, env);
        }
        default: throw EvalError("cannot evaluate term against ground model");
      }
    }
  }
}

}  // namespace pwlmbqi
