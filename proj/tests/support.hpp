#pragma once

// Shared test helpers: deterministic generators and independent brute-force
// oracles. The oracles deliberately avoid the library's solving paths.

#include <optional>
#include <random>
#include <set>
#include <vector>

#include "pwlmbqi/int_feasibility.hpp"
#include "pwlmbqi/model.hpp"
#include "pwlmbqi/pwl_fit.hpp"
#include "pwlmbqi/term.hpp"

namespace testsupport {

using pwlmbqi::Int;

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(unsigned seed) : engine(seed) {}
  long pick(long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(engine);
  }
  bool coin() { return pick(0, 1) == 1; }
};

// brute force over y in [-box,box]^n with c solved from the first row;
// equivalent to searching (y,c) in the full box since rows are equations
inline std::optional<std::pair<std::vector<Int>, Int>> dio_oracle(
    const std::vector<std::pair<std::vector<Int>, Int>>& rows, std::size_t arity, long box) {
  std::vector<long> y(arity, -box);
  if (rows.empty()) return std::make_pair(std::vector<Int>(arity, Int(0)), Int(0));
  while (true) {
    Int c0 = rows[0].second;
    for (std::size_t i = 0; i < arity; ++i) c0 -= rows[0].first[i] * y[i];
    if (c0 >= -box && c0 <= box) {
      bool ok = true;
      for (const auto& [a, v] : rows) {
        Int lhs = c0;
        for (std::size_t i = 0; i < arity; ++i) lhs += a[i] * y[i];
        if (lhs != v) {
          ok = false;
          break;
        }
      }
      if (ok) {
        std::vector<Int> yy(arity);
        for (std::size_t i = 0; i < arity; ++i) yy[i] = y[i];
        return std::make_pair(yy, c0);
      }
    }
    std::size_t i = 0;
    while (i < arity && y[i] == box) y[i++] = -box;
    if (i == arity) return std::nullopt;
    ++y[i];
  }
}

// brute force over y in [-box,box]^n; for each y the feasible c values form
// an interval
inline std::optional<std::pair<std::vector<Int>, Int>> ineq_oracle(
    const std::vector<pwlmbqi::InequalitySystem::Row>& rows, std::size_t arity, long box) {
  std::vector<long> y(arity, -box);
  if (arity == 0) {
    // rows are 0 >= c or 0 < c; c in [-box,box]
    for (long c = -box; c <= box; ++c) {
      bool ok = true;
      for (const auto& r : rows)
        if (r.positive ? !(0 >= c) : !(0 < c)) ok = false;
      if (ok) return std::make_pair(std::vector<Int>{}, Int(c));
    }
    return std::nullopt;
  }
  while (true) {
    Int clo = -box, chi = box;
    for (const auto& r : rows) {
      Int dot = 0;
      for (std::size_t i = 0; i < arity; ++i) dot += r.coeffs[i] * y[i];
      if (r.positive) {
        if (dot < chi) chi = dot;  // c <= dot
      } else {
        if (dot + 1 > clo) clo = dot + 1;  // c >= dot+1
      }
    }
    if (clo <= chi) {
      std::vector<Int> yy(arity);
      for (std::size_t i = 0; i < arity; ++i) yy[i] = y[i];
      return std::make_pair(yy, clo);
    }
    std::size_t i = 0;
    while (i < arity && y[i] == box) y[i++] = -box;
    if (i == arity) return std::nullopt;
    ++y[i];
  }
}

// random consistent point set: distinct argument tuples
inline std::vector<pwlmbqi::FunctionPoint> random_points(Rng& rng, std::size_t arity,
                                                         std::size_t max_points, bool boolean,
                                                         long lo = -30, long hi = 30) {
  std::set<std::vector<Int>> seen;
  std::vector<pwlmbqi::FunctionPoint> out;
  std::size_t n = static_cast<std::size_t>(rng.pick(1, static_cast<long>(max_points)));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Int> args(arity);
    for (auto& a : args) a = rng.pick(lo, hi);
    if (!seen.insert(args).second) continue;
    pwlmbqi::FunctionPoint p;
    p.args = std::move(args);
    if (boolean) p.value = rng.coin();
    else p.value = Int(rng.pick(lo, hi));
    out.push_back(std::move(p));
  }
  return out;
}

// the model learned in the running two-halfspace example: R(x,y) <-> x = y
inline pwlmbqi::CandidateModel equality_model() {
  using namespace pwlmbqi;
  TermRef c1 = mk_cmp(CmpOp::Ge, mk_sub(param_var(0), param_var(1)), mk_int(0));
  TermRef c2 = mk_cmp(CmpOp::Ge, mk_sub(param_var(1), param_var(0)), mk_int(0));
  PwlTerm inner = PwlTerm::ite(c2, PwlTerm::bool_leaf(2, true), PwlTerm::bool_leaf(2, false));
  PwlTerm tree = PwlTerm::ite(c1, std::move(inner), PwlTerm::bool_leaf(2, false));
  CandidateModel m;
  m.define("R", {2, Sort::boolean(), std::move(tree)});
  return m;
}

}  // namespace testsupport
