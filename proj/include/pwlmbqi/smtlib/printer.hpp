#pragma once

#include <cctype>
#include <sstream>
#include <string>

#include "pwlmbqi/model.hpp"
#include "pwlmbqi/smtlib/lexer.hpp"
#include "pwlmbqi/smtlib/script.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi::smtlib {

inline std::string print_symbol(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name)
    if (!is_simple_symbol_char(c)) simple = false;
  return simple ? name : "|" + name + "|";
}

inline std::string print_int(const Int& v) {
  if (v < 0) return "(- " + Int(-v).str() + ")";
  return v.str();
}

inline void print_term_to(std::ostream& os, const TermRef& t) {
  switch (t->kind) {
    case Kind::IntConst:
      os << print_int(t->value);
      return;
    case Kind::BoolConst:
      os << (t->bvalue ? "true" : "false");
      return;
    case Kind::Var:
      os << print_symbol(t->name);
      return;
    case Kind::Apply:
      if (t->args.empty()) {
        os << print_symbol(t->name);
        return;
      }
      os << '(' << print_symbol(t->name);
      for (const auto& a : t->args) {
        os << ' ';
        print_term_to(os, a);
      }
      os << ')';
      return;
    case Kind::Add:
    case Kind::And:
    case Kind::Or: {
      os << '(' << (t->kind == Kind::Add ? "+" : t->kind == Kind::And ? "and" : "or");
      for (const auto& a : t->args) {
        os << ' ';
        print_term_to(os, a);
      }
      os << ')';
      return;
    }
    case Kind::Sub:
    case Kind::Neg: {
      os << "(- ";
      print_term_to(os, t->args[0]);
      if (t->kind == Kind::Sub) {
        os << ' ';
        print_term_to(os, t->args[1]);
      }
      os << ')';
      return;
    }
    case Kind::MulConst:
      os << "(* " << print_int(t->value) << ' ';
      print_term_to(os, t->args[0]);
      os << ')';
      return;
    case Kind::Div:
    case Kind::Mod:
      os << (t->kind == Kind::Div ? "(div " : "(mod ");
      print_term_to(os, t->args[0]);
      os << ' ';
      print_term_to(os, t->args[1]);
      os << ')';
      return;
    case Kind::Cmp: {
      const char* ops[] = {"=", "<", "<=", ">", ">="};
      os << '(' << ops[static_cast<int>(t->cmp)] << ' ';
      print_term_to(os, t->args[0]);
      os << ' ';
      print_term_to(os, t->args[1]);
      os << ')';
      return;
    }
    case Kind::Not:
      os << "(not ";
      print_term_to(os, t->args[0]);
      os << ')';
      return;
    case Kind::Implies:
      os << "(=> ";
      print_term_to(os, t->args[0]);
      os << ' ';
      print_term_to(os, t->args[1]);
      os << ')';
      return;
    case Kind::Ite:
      os << "(ite ";
      print_term_to(os, t->args[0]);
      os << ' ';
      print_term_to(os, t->args[1]);
      os << ' ';
      print_term_to(os, t->args[2]);
      os << ')';
      return;
    case Kind::Forall:
    case Kind::Exists: {
      os << '(' << (t->kind == Kind::Forall ? "forall" : "exists") << " (";
      bool first = true;
      for (const auto& b : t->binders) {
        if (!first) os << ' ';
        first = false;
        os << '(' << print_symbol(b.name) << ' ' << b.sort.str() << ')';
      }
      os << ") ";
      print_term_to(os, t->args[0]);
      os << ')';
      return;
    }
  }
}

inline std::string print_term(const TermRef& t) {
  std::ostringstream os;
  print_term_to(os, t);
  return os.str();
}

inline std::string print_script(const Script& s) {
  std::ostringstream os;
  if (!s.logic.empty()) os << "(set-logic " << s.logic << ")\n";
  for (const auto& ds : s.declared_sorts) os << "(declare-sort " << print_symbol(ds) << " 0)\n";
  for (const auto& d : s.declarations) {
    os << "(declare-fun " << print_symbol(d.name) << " (";
    for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? " " : "") << d.params[i].str();
    os << ") " << d.result.str() << ")\n";
  }
  for (const auto& a : s.assertions) os << "(assert " << print_term(a) << ")\n";
  if (s.check_sat) os << "(check-sat)\n";
  if (s.get_model) os << "(get-model)\n";
  return os.str();
}

// (define-fun ...) in get-model response syntax; piecewise bodies print as
// nested ite.
inline std::string print_model(const CandidateModel& m) {
  std::ostringstream os;
  os << "(\n";
  for (const auto& [name, def] : m.defs()) {
    os << "  (define-fun " << print_symbol(name) << " (";
    for (std::size_t i = 0; i < def.arity; ++i)
      os << (i ? " " : "") << '(' << param_name(i) << " Int)";
    os << ") " << (def.result.is_bool() ? "Bool" : "Int") << ' '
       << print_term(pwl_to_term(def.body)) << ")\n";
  }
  os << ")\n";
  return os.str();
}

}  // namespace pwlmbqi::smtlib
