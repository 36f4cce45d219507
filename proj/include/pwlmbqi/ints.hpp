#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace pwlmbqi {

// All integer arithmetic in the library is arbitrary precision; coefficient
// growth in elimination steps must never overflow.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }

// floor(a / b), b != 0
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;  // truncates toward zero
  if ((a % b) != 0 && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b) != 0 && ((a < 0) == (b < 0))) q += 1;
  return q;
}

// SMT-LIB Euclidean division: remainder is in [0, |b|).
inline Int euclid_div(const Int& a, const Int& b) {
  Int q = a / b;
  Int r = a - q * b;
  if (r < 0) q += (b > 0) ? -1 : 1;
  return q;
}

inline Int euclid_mod(const Int& a, const Int& b) {
  Int r = a % b;
  if (r < 0) r += boost::multiprecision::abs(b);
  return r;
}

inline Int abs(const Int& a) { return boost::multiprecision::abs(a); }

inline Rat rat_floor(const Rat& q) {
  return Rat(floor_div(boost::multiprecision::numerator(q), boost::multiprecision::denominator(q)));
}

inline bool is_integral(const Rat& q) { return boost::multiprecision::denominator(q) == 1; }

inline Int to_int(const Rat& q) { return boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q); }

inline std::string to_string(const Int& v) { return v.str(); }

inline std::size_t hash_int(const Int& v) {
  if (v >= INT64_MIN && v <= INT64_MAX) return std::hash<std::int64_t>{}(static_cast<std::int64_t>(v));
  return std::hash<std::string>{}(v.str());
}

}  // namespace pwlmbqi
