#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pwlmbqi/sorts.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi::smtlib {

struct FunDecl {
  std::string name;
  std::vector<Sort> params;
  Sort result = Sort::integer();
};

struct DefinedFun {
  std::string name;
  std::vector<Binder> params;
  Sort result = Sort::integer();
  TermRef body;
};

// Parsed SMT-LIB script; semantics is the conjunction of its assertions.
struct Script {
  std::string logic;
  std::vector<std::pair<std::string, std::string>> metadata;  // set-info pairs
  std::vector<std::string> declared_sorts;
  std::vector<FunDecl> declarations;
  std::vector<DefinedFun> defined;  // macro-expanded into assertions at parse time
  std::vector<TermRef> assertions;
  std::vector<std::string> warnings;
  bool check_sat = false;
  bool get_model = false;

  const FunDecl* find_decl(const std::string& name) const {
    for (const auto& d : declarations)
      if (d.name == name) return &d;
    return nullptr;
  }
};

}  // namespace pwlmbqi::smtlib
