#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwlmbqi/smtlib/parser.hpp"
#include "pwlmbqi/smtlib/script.hpp"
#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

// Satisfiable-fragment extraction: keep exactly the assertions that mention
// at least one chosen uninterpreted function and no other uninterpreted
// function. 0-ary constants never disqualify an assertion and never count
// toward the choice; predicates count as functions. Sorts are relaxed to Int
// on the way out.

namespace detail {

// applied uninterpreted symbols with arity >= 1
inline std::set<std::string> applied_functions(const TermRef& t) {
  std::map<std::string, std::size_t> occ;
  collect_symbols(t, occ);
  std::set<std::string> out;
  for (const auto& [name, arity] : occ)
    if (arity >= 1) out.insert(name);
  return out;
}

inline std::set<std::string> occurring_symbols(const TermRef& t) {
  std::map<std::string, std::size_t> occ;
  collect_symbols(t, occ);
  std::set<std::string> out;
  for (const auto& [name, arity] : occ) {
    (void)arity;
    out.insert(name);
  }
  return out;
}

}  // namespace detail

inline smtlib::Script fragment(const smtlib::Script& s, const std::set<std::string>& symbols) {
  for (const auto& sym : symbols) {
    const smtlib::FunDecl* d = s.find_decl(sym);
    if (!d) throw std::invalid_argument("fragment: unknown symbol " + sym);
    if (d->params.empty())
      throw std::invalid_argument("fragment: " + sym + " is a constant, not a function");
  }

  smtlib::Script out;
  out.logic = s.logic;
  out.metadata = s.metadata;
  out.check_sat = true;

  std::set<std::string> used;
  for (const auto& a : s.assertions) {
    std::set<std::string> funcs = detail::applied_functions(a);
    bool has_chosen = false, has_other = false;
    for (const auto& f : funcs) {
      if (symbols.count(f)) has_chosen = true;
      else has_other = true;
    }
    if (!has_chosen || has_other) continue;
    out.assertions.push_back(a);
    for (const auto& name : detail::occurring_symbols(a)) used.insert(name);
  }
  for (const auto& d : s.declarations)
    if (used.count(d.name)) out.declarations.push_back(d);
  out.declared_sorts = s.declared_sorts;
  return smtlib::relax_sorts(out);
}

// One fragment per k-subset of the script's applied uninterpreted functions,
// in lexicographic subset order; empty fragments are skipped.
inline std::vector<std::pair<std::vector<std::string>, smtlib::Script>> enumerate_fragments(
    const smtlib::Script& s, std::size_t k, std::size_t cap = 0) {
  if (k == 0) throw std::invalid_argument("enumerate_fragments: k must be positive");
  std::set<std::string> pool_set;
  for (const auto& a : s.assertions)
    for (const auto& f : detail::applied_functions(a)) pool_set.insert(f);
  std::vector<std::string> pool(pool_set.begin(), pool_set.end());

  std::vector<std::pair<std::vector<std::string>, smtlib::Script>> out;
  if (k > pool.size()) return out;

  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<std::string> chosen;
    for (std::size_t i : idx) chosen.push_back(pool[i]);
    smtlib::Script frag = fragment(s, std::set<std::string>(chosen.begin(), chosen.end()));
    if (!frag.assertions.empty()) {
      out.emplace_back(chosen, std::move(frag));
      if (cap > 0 && out.size() >= cap) break;
    }
    // advance the combination
    std::size_t i = k;
    while (i-- > 0) {
      if (idx[i] + (k - i) < pool.size()) {
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return out;
    }
  }
  return out;
}

}  // namespace pwlmbqi
