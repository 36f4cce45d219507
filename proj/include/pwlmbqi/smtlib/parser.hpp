#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pwlmbqi/linear.hpp"
#include "pwlmbqi/smtlib/lexer.hpp"
#include "pwlmbqi/smtlib/script.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi::smtlib {

// Recursive-descent parser for the UFLIA subset. define-fun and let are
// macro-expanded while parsing, so downstream code only sees the core term
// language.
class Parser {
 public:
  explicit Parser(std::string src) : lex_(std::move(src)) {}

  Script parse_script() {
    Script s;
    while (lex_.peek().type != Token::Type::End) {
      expect(Token::Type::LParen);
      Token cmd = expect(Token::Type::Symbol);
      if (cmd.text == "set-logic") {
        Token l = expect(Token::Type::Symbol);
        s.logic = l.text;
        if (s.logic != "UFLIA" && s.logic != "LIA" && s.logic != "QF_UFLIA" &&
            s.logic != "QF_LIA" && s.logic != "UF" && s.logic != "QF_UF" && s.logic != "ALL")
          s.warnings.push_back("unknown logic tag '" + s.logic + "' accepted");
        expect(Token::Type::RParen);
      } else if (cmd.text == "set-info") {
        Token key = expect(Token::Type::Keyword);
        std::string value;
        if (lex_.peek().type != Token::Type::RParen) value = read_raw_sexpr();
        expect(Token::Type::RParen);
        s.metadata.emplace_back(key.text, value);
      } else if (cmd.text == "declare-sort") {
        Token name = expect(Token::Type::Symbol);
        Token arity = expect(Token::Type::Numeral);
        if (arity.text != "0")
          throw ParseError(ParseError::Kind::Unsupported, "parametric sorts are not supported",
                           arity.line, arity.col);
        declare_sort(s, name);
        expect(Token::Type::RParen);
      } else if (cmd.text == "declare-fun") {
        Token name = expect(Token::Type::Symbol);
        expect(Token::Type::LParen);
        std::vector<Sort> params;
        while (lex_.peek().type != Token::Type::RParen) params.push_back(parse_sort(s));
        expect(Token::Type::RParen);
        Sort result = parse_sort(s);
        declare_fun(s, name, std::move(params), result);
        expect(Token::Type::RParen);
      } else if (cmd.text == "declare-const") {
        Token name = expect(Token::Type::Symbol);
        Sort result = parse_sort(s);
        declare_fun(s, name, {}, result);
        expect(Token::Type::RParen);
      } else if (cmd.text == "define-fun") {
        Token name = expect(Token::Type::Symbol);
        expect(Token::Type::LParen);
        std::vector<Binder> params;
        std::set<std::string> param_names;
        while (lex_.peek().type != Token::Type::RParen) {
          Token lp = expect(Token::Type::LParen);
          Token pname = expect(Token::Type::Symbol);
          Sort psort = parse_sort(s);
          expect(Token::Type::RParen);
          if (!param_names.insert(pname.text).second)
            throw ParseError(ParseError::Kind::Syntax, "duplicate parameter " + pname.text,
                             lp.line, lp.col);
          params.push_back({pname.text, psort});
        }
        expect(Token::Type::RParen);
        Sort result = parse_sort(s);
        Scope scope;
        for (const auto& p : params) scope.vars.emplace(p.name, mk_var(p.name, p.sort));
        TermRef body = parse_term(s, scope);
        if (body->sort != result)
          throw ParseError(ParseError::Kind::Sort,
                           "define-fun body sort mismatch for " + name.text, name.line, name.col);
        check_fresh(s, name);
        macros_[name.text] = DefinedFun{name.text, params, result, body};
        s.defined.push_back(macros_[name.text]);
        expect(Token::Type::RParen);
      } else if (cmd.text == "assert") {
        Scope scope;
        Token at = lex_.peek();
        TermRef t = parse_term(s, scope);
        if (!t->sort.is_bool())
          throw ParseError(ParseError::Kind::Sort, "asserted term is not Bool", at.line, at.col);
        s.assertions.push_back(t);
        expect(Token::Type::RParen);
      } else if (cmd.text == "check-sat") {
        s.check_sat = true;
        expect(Token::Type::RParen);
      } else if (cmd.text == "get-model") {
        s.get_model = true;
        expect(Token::Type::RParen);
      } else if (cmd.text == "exit") {
        expect(Token::Type::RParen);
      } else {
        throw ParseError(ParseError::Kind::Unsupported, "unsupported command " + cmd.text,
                         cmd.line, cmd.col);
      }
    }
    return s;
  }

 private:
  struct Scope {
    std::map<std::string, TermRef> vars;  // binder variables and let bindings
  };

  Token expect(Token::Type ty) {
    Token t = lex_.next();
    if (t.type != ty) {
      static const char* names[] = {"'('", "')'", "symbol", "keyword", "numeral", "string", "end"};
      throw ParseError(ParseError::Kind::Syntax,
                       std::string("expected ") + names[static_cast<int>(ty)] + ", got '" +
                           t.text + "'",
                       t.line, t.col);
    }
    return t;
  }

  std::string read_raw_sexpr() {
    Token t = lex_.next();
    switch (t.type) {
      case Token::Type::LParen: {
        std::string out = "(";
        int depth = 1;
        while (depth > 0) {
          Token u = lex_.next();
          if (u.type == Token::Type::End)
            throw ParseError(ParseError::Kind::Syntax, "unbalanced parentheses", u.line, u.col);
          if (u.type == Token::Type::LParen) ++depth;
          if (u.type == Token::Type::RParen) --depth;
          out += (out.back() == '(' || u.type == Token::Type::RParen ? "" : " ");
          out += u.type == Token::Type::Keyword ? ":" + u.text : u.text;
        }
        return out;
      }
      case Token::Type::String:
      case Token::Type::Symbol:
      case Token::Type::Numeral:
        return t.text;
      case Token::Type::Keyword:
        return ":" + t.text;
      default:
        throw ParseError(ParseError::Kind::Syntax, "expected attribute value", t.line, t.col);
    }
  }

  Sort parse_sort(const Script& s) {
    Token t = lex_.next();
    if (t.type == Token::Type::LParen)
      throw ParseError(ParseError::Kind::Unsupported, "compound sorts are not supported", t.line,
                       t.col);
    if (t.type != Token::Type::Symbol)
      throw ParseError(ParseError::Kind::Syntax, "expected a sort", t.line, t.col);
    if (t.text == "Int") return Sort::integer();
    if (t.text == "Bool") return Sort::boolean();
    for (const auto& ds : s.declared_sorts)
      if (ds == t.text) return Sort::uninterpreted(t.text);
    if (t.text == "Real" || t.text == "Array" || t.text == "String" || t.text.rfind("BitVec", 0) == 0)
      throw ParseError(ParseError::Kind::Unsupported, "unsupported sort " + t.text, t.line, t.col);
    throw ParseError(ParseError::Kind::Sort, "unknown sort " + t.text, t.line, t.col);
  }

  void check_fresh(const Script& s, const Token& name) {
    if (s.find_decl(name.text) || macros_.count(name.text))
      throw ParseError(ParseError::Kind::Sort, "symbol declared twice: " + name.text, name.line,
                       name.col);
  }

  void declare_sort(Script& s, const Token& name) {
    for (const auto& ds : s.declared_sorts)
      if (ds == name.text)
        throw ParseError(ParseError::Kind::Sort, "sort declared twice: " + name.text, name.line,
                         name.col);
    s.declared_sorts.push_back(name.text);
  }

  void declare_fun(Script& s, const Token& name, std::vector<Sort> params, Sort result) {
    check_fresh(s, name);
    s.declarations.push_back(FunDecl{name.text, std::move(params), result});
  }

  void require_int(const TermRef& t, const Token& at) {
    if (!t->sort.is_int())
      throw ParseError(ParseError::Kind::Sort, "expected an Int term", at.line, at.col);
  }
  void require_bool(const TermRef& t, const Token& at) {
    if (!t->sort.is_bool())
      throw ParseError(ParseError::Kind::Sort, "expected a Bool term", at.line, at.col);
  }

  TermRef bool_iff(const TermRef& a, const TermRef& b) {
    return mk_and({mk_implies(a, b), mk_implies(b, a)});
  }

  TermRef equality(const TermRef& a, const TermRef& b, const Token& at) {
    if (a->sort != b->sort)
      throw ParseError(ParseError::Kind::Sort, "equality between different sorts", at.line,
                       at.col);
    if (a->sort.is_bool()) return bool_iff(a, b);
    return mk_cmp(CmpOp::Eq, a, b);
  }

  TermRef bool_xor(const TermRef& a, const TermRef& b) {
    return mk_or({mk_and({a, mk_not(b)}), mk_and({mk_not(a), b})});
  }

  TermRef parse_term(const Script& s, const Scope& scope) {
    Token t = lex_.next();
    switch (t.type) {
      case Token::Type::Numeral:
        return mk_int(Int(t.text));
      case Token::Type::Symbol:
        return resolve_symbol(s, scope, t, {});
      case Token::Type::LParen:
        break;
      default:
        throw ParseError(ParseError::Kind::Syntax, "expected a term", t.line, t.col);
    }

    Token head = lex_.next();
    if (head.type == Token::Type::LParen)
      throw ParseError(ParseError::Kind::Unsupported, "indexed identifiers are not supported",
                       head.line, head.col);
    if (head.type != Token::Type::Symbol)
      throw ParseError(ParseError::Kind::Syntax, "expected an operator", head.line, head.col);
    const std::string& op = head.text;

    if (op == "forall" || op == "exists") {
      expect(Token::Type::LParen);
      std::vector<Binder> binders;
      Scope inner = scope;
      while (lex_.peek().type != Token::Type::RParen) {
        expect(Token::Type::LParen);
        Token vn = expect(Token::Type::Symbol);
        Sort vs = parse_sort(s);
        expect(Token::Type::RParen);
        binders.push_back({vn.text, vs});
        inner.vars[vn.text] = mk_var(vn.text, vs);
      }
      expect(Token::Type::RParen);
      if (binders.empty())
        throw ParseError(ParseError::Kind::Syntax, "empty binder list", head.line, head.col);
      TermRef body = parse_term(s, inner);
      require_bool(body, head);
      expect(Token::Type::RParen);
      return mk_quant(op == "forall" ? Kind::Forall : Kind::Exists, std::move(binders), body);
    }

    if (op == "let") {
      expect(Token::Type::LParen);
      Scope inner = scope;
      std::vector<std::pair<std::string, TermRef>> bindings;
      while (lex_.peek().type != Token::Type::RParen) {
        expect(Token::Type::LParen);
        Token vn = expect(Token::Type::Symbol);
        TermRef bt = parse_term(s, scope);  // parallel let: outer scope
        expect(Token::Type::RParen);
        bindings.emplace_back(vn.text, bt);
      }
      expect(Token::Type::RParen);
      for (auto& [n, bt] : bindings) inner.vars[n] = bt;
      TermRef body = parse_term(s, inner);
      expect(Token::Type::RParen);
      return body;
    }

    if (op == "!") {
      // annotations are semantically transparent; attributes are skipped
      TermRef inner = parse_term(s, scope);
      while (lex_.peek().type == Token::Type::Keyword) {
        lex_.next();
        if (lex_.peek().type != Token::Type::Keyword &&
            lex_.peek().type != Token::Type::RParen)
          read_raw_sexpr();
      }
      expect(Token::Type::RParen);
      return inner;
    }

    std::vector<TermRef> args;
    std::vector<Token> arg_pos;
    while (lex_.peek().type != Token::Type::RParen) {
      arg_pos.push_back(lex_.peek());
      args.push_back(parse_term(s, scope));
    }
    Token close = lex_.next();  // RParen

    auto need = [&](std::size_t n) {
      if (args.size() != n)
        throw ParseError(ParseError::Kind::Syntax,
                         op + " expects " + std::to_string(n) + " arguments", head.line, head.col);
    };
    auto need_at_least = [&](std::size_t n) {
      if (args.size() < n)
        throw ParseError(ParseError::Kind::Syntax, op + " expects more arguments", head.line,
                         head.col);
    };
    auto all_int = [&] {
      for (std::size_t i = 0; i < args.size(); ++i) require_int(args[i], arg_pos[i]);
    };
    auto all_bool = [&] {
      for (std::size_t i = 0; i < args.size(); ++i) require_bool(args[i], arg_pos[i]);
    };
    (void)close;

    if (op == "+") {
      need_at_least(1);
      all_int();
      return mk_add(std::move(args));
    }
    if (op == "-") {
      need_at_least(1);
      all_int();
      if (args.size() == 1) return mk_neg(args[0]);
      TermRef acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = mk_sub(acc, args[i]);
      return acc;
    }
    if (op == "*") {
      need_at_least(1);
      all_int();
      Int k = 1;
      TermRef nonconst;
      for (std::size_t i = 0; i < args.size(); ++i) {
        LinearComb lc = linearize(args[i]);
        if (lc.is_constant()) {
          k *= lc.constant;
        } else if (!nonconst) {
          nonconst = args[i];
        } else {
          throw ParseError(ParseError::Kind::Unsupported,
                           "nonlinear multiplication is not supported", arg_pos[i].line,
                           arg_pos[i].col);
        }
      }
      if (!nonconst) return mk_int(k);
      return mk_mul_const(k, nonconst);
    }
    if (op == "div" || op == "mod") {
      need(2);
      all_int();
      return op == "div" ? mk_div(args[0], args[1]) : mk_mod(args[0], args[1]);
    }
    if (op == "abs") {
      need(1);
      all_int();
      return mk_ite(mk_cmp(CmpOp::Ge, args[0], mk_int(0)), args[0], mk_neg(args[0]));
    }
    if (op == "=") {
      need_at_least(2);
      std::vector<TermRef> conj;
      for (std::size_t i = 0; i + 1 < args.size(); ++i)
        conj.push_back(equality(args[i], args[i + 1], arg_pos[i]));
      return mk_and(std::move(conj));
    }
    if (op == "distinct") {
      need_at_least(2);
      std::vector<TermRef> conj;
      for (std::size_t i = 0; i < args.size(); ++i)
        for (std::size_t j = i + 1; j < args.size(); ++j)
          conj.push_back(mk_not(equality(args[i], args[j], arg_pos[i])));
      return mk_and(std::move(conj));
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      need_at_least(2);
      all_int();
      CmpOp c = op == "<" ? CmpOp::Lt : op == "<=" ? CmpOp::Le : op == ">" ? CmpOp::Gt : CmpOp::Ge;
      std::vector<TermRef> conj;
      for (std::size_t i = 0; i + 1 < args.size(); ++i)
        conj.push_back(mk_cmp(c, args[i], args[i + 1]));
      return mk_and(std::move(conj));
    }
    if (op == "and" || op == "or") {
      all_bool();
      return op == "and" ? mk_and(std::move(args)) : mk_or(std::move(args));
    }
    if (op == "not") {
      need(1);
      all_bool();
      return mk_not(args[0]);
    }
    if (op == "=>") {
      need_at_least(2);
      all_bool();
      TermRef acc = args.back();
      for (std::size_t i = args.size() - 1; i-- > 0;) acc = mk_implies(args[i], acc);
      return acc;
    }
    if (op == "xor") {
      need_at_least(2);
      all_bool();
      TermRef acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i) acc = bool_xor(acc, args[i]);
      return acc;
    }
    if (op == "ite") {
      need(3);
      require_bool(args[0], arg_pos[0]);
      if (args[1]->sort != args[2]->sort)
        throw ParseError(ParseError::Kind::Sort, "ite branch sorts differ", head.line, head.col);
      return mk_ite(args[0], args[1], args[2]);
    }
    if (op == "select" || op == "store" || op == "match" || op == "concat")
      throw ParseError(ParseError::Kind::Unsupported, "unsupported feature " + op, head.line,
                       head.col);

    return resolve_symbol(s, scope, head, std::move(args));
  }

  TermRef resolve_symbol(const Script& s, const Scope& scope, const Token& name,
                         std::vector<TermRef> args) {
    if (name.text == "true" || name.text == "false") {
      if (!args.empty())
        throw ParseError(ParseError::Kind::Syntax, "boolean constant applied to arguments",
                         name.line, name.col);
      return mk_bool(name.text == "true");
    }
    if (args.empty()) {
      auto it = scope.vars.find(name.text);
      if (it != scope.vars.end()) return it->second;
    }
    auto mit = macros_.find(name.text);
    if (mit != macros_.end()) {
      const DefinedFun& mac = mit->second;
      if (mac.params.size() != args.size())
        throw ParseError(ParseError::Kind::Sort, "wrong arity for " + name.text, name.line,
                         name.col);
      std::map<std::string, TermRef> subst;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i]->sort != mac.params[i].sort)
          throw ParseError(ParseError::Kind::Sort, "argument sort mismatch for " + name.text,
                           name.line, name.col);
        subst[mac.params[i].name] = args[i];
      }
      return substitute(mac.body, subst);
    }
    const FunDecl* decl = s.find_decl(name.text);
    if (!decl)
      throw ParseError(ParseError::Kind::Syntax, "unknown symbol " + name.text, name.line,
                       name.col);
    if (decl->params.size() != args.size())
      throw ParseError(ParseError::Kind::Sort, "wrong arity for " + name.text, name.line,
                       name.col);
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i]->sort != decl->params[i])
        throw ParseError(ParseError::Kind::Sort, "argument sort mismatch for " + name.text,
                         name.line, name.col);
    return mk_apply(name.text, std::move(args), decl->result);
  }

  Lexer lex_;
  std::map<std::string, DefinedFun> macros_;
};

inline Script parse_script(const std::string& text) { return Parser(text).parse_script(); }

// ---- sort relaxation ------------------------------------------------------

namespace detail {

inline Sort relax(const Sort& s) { return s.is_uninterpreted() ? Sort::integer() : s; }

inline TermRef relax_term(const TermRef& t) {
  std::vector<TermRef> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(relax_term(a));
    changed |= args.back().get() != a.get();
  }
  Sort ns = relax(t->sort);
  std::vector<Binder> binders = t->binders;
  for (auto& b : binders) {
    if (b.sort.is_uninterpreted()) {
      b.sort = Sort::integer();
      changed = true;
    }
  }
  if (!changed && ns == t->sort) return t;
  auto n = std::make_shared<TermNode>(t->kind, ns);
  n->value = t->value;
  n->bvalue = t->bvalue;
  n->name = t->name;
  n->cmp = t->cmp;
  n->args = std::move(args);
  n->binders = std::move(binders);
  return pwlmbqi::detail::finish(std::move(n));
}

}  // namespace detail

// Replace every uninterpreted sort with Int and drop sort declarations.
inline Script relax_sorts(const Script& s) {
  Script out = s;
  out.declared_sorts.clear();
  for (auto& d : out.declarations) {
    for (auto& p : d.params) p = detail::relax(p);
    d.result = detail::relax(d.result);
  }
  for (auto& d : out.defined) {
    for (auto& p : d.params) p.sort = detail::relax(p.sort);
    d.result = detail::relax(d.result);
    d.body = detail::relax_term(d.body);
  }
  for (auto& a : out.assertions) a = detail::relax_term(a);
  return out;
}

}  // namespace pwlmbqi::smtlib
