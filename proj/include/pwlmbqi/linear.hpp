#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "pwlmbqi/term.hpp"

namespace pwlmbqi {

// Integer linear combination over "atomic" Int subterms (variables,
// applications, div/mod, Int-valued ite). The workhorse behind comparison
// canonicalization and the ground solver's atom language.
struct LinearComb {
  std::map<TermRef, Int, TermLess> coeffs;  // unit -> nonzero coefficient
  Int constant = 0;

  void add_unit(const TermRef& unit, const Int& k) {
    if (k == 0) return;
    auto it = coeffs.find(unit);
    if (it == coeffs.end()) {
      coeffs.emplace(unit, k);
    } else {
      it->second += k;
      if (it->second == 0) coeffs.erase(it);
    }
  }

  void add(const LinearComb& other, const Int& scale) {
    if (scale == 0) return;
    constant += other.constant * scale;
    for (const auto& [u, k] : other.coeffs) add_unit(u, k * scale);
  }

  bool is_constant() const { return coeffs.empty(); }

  friend bool operator==(const LinearComb& a, const LinearComb& b) {
    if (a.constant != b.constant || a.coeffs.size() != b.coeffs.size()) return false;
    auto ia = a.coeffs.begin();
    auto ib = b.coeffs.begin();
    for (; ia != a.coeffs.end(); ++ia, ++ib) {
      if (ia->second != ib->second || !equal(ia->first, ib->first)) return false;
    }
    return true;
  }

  friend bool operator<(const LinearComb& a, const LinearComb& b) {
    if (a.constant != b.constant) return a.constant < b.constant;
    auto ia = a.coeffs.begin(), ib = b.coeffs.begin();
    for (; ia != a.coeffs.end() && ib != b.coeffs.end(); ++ia, ++ib) {
      if (int c = compare(ia->first, ib->first)) return c < 0;
      if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.coeffs.end() && ib != b.coeffs.end();
  }
};

// Decompose an Int term into a linear combination. `unit_hook` maps atomic
// subterms (Apply/Div/Mod/Ite/Var) to the unit term to use; identity by
// default, the ground solver substitutes canonicalized units.
template <typename UnitFn>
LinearComb linearize(const TermRef& t, UnitFn&& unit_hook) {
  LinearComb out;
  switch (t->kind) {
    case Kind::IntConst:
      out.constant = t->value;
      return out;
    case Kind::Add:
      for (const auto& a : t->args) out.add(linearize(a, unit_hook), 1);
      return out;
    case Kind::Sub:
      out.add(linearize(t->args[0], unit_hook), 1);
      out.add(linearize(t->args[1], unit_hook), -1);
      return out;
    case Kind::Neg:
      out.add(linearize(t->args[0], unit_hook), -1);
      return out;
    case Kind::MulConst:
      out.add(linearize(t->args[0], unit_hook), t->value);
      return out;
    case Kind::Var:
    case Kind::Apply:
    case Kind::Div:
    case Kind::Mod:
    case Kind::Ite:
      unit_hook(t, out);
      return out;
    default:
      throw std::logic_error("linearize: non-Int term");
  }
}

inline LinearComb linearize(const TermRef& t) {
  return linearize(t, [](const TermRef& u, LinearComb& out) { out.add_unit(u, 1); });
}

// Rebuild a term from a linear combination: sum of scaled units plus the
// constant, units in their canonical order.
inline TermRef linear_to_term(const LinearComb& lc) {
  std::vector<TermRef> parts;
  for (const auto& [u, k] : lc.coeffs) {
    if (k == 1) {
      parts.push_back(u);
    } else if (k == -1) {
      parts.push_back(mk_neg(u));
    } else {
      parts.push_back(mk_mul_const(k, u));
    }
  }
  if (lc.constant != 0 || parts.empty()) parts.push_back(mk_int(lc.constant));
  return mk_add(std::move(parts));
}

}  // namespace pwlmbqi
