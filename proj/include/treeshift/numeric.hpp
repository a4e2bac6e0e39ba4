#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdlib>
#include <optional>
#include <string>

#include "treeshift/common.hpp"

namespace treeshift {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer ipow(const Integer& base, unsigned exp) {
  Integer acc = 1;
  Integer b = base;
  for (unsigned e = exp; e != 0; e >>= 1) {
    if (e & 1) acc *= b;
    if (e > 1) b *= b;
  }
  return acc;
}

inline Rational rpow(const Rational& base, int exp) {
  if (exp >= 0) {
    return Rational(ipow(numerator(base), static_cast<unsigned>(exp)),
                    ipow(denominator(base), static_cast<unsigned>(exp)));
  }
  if (base == 0) throw ContractError("rpow: negative power of zero");
  return Rational(ipow(denominator(base), static_cast<unsigned>(-exp)),
                  ipow(numerator(base), static_cast<unsigned>(-exp)));
}

inline Rational rabs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

/// H_n = sum_{k=1..n} 1/k, H_0 = 0.
inline Rational harmonic_number(int n) {
  Rational h = 0;
  for (int k = 1; k <= n; ++k) h += Rational(1, k);
  return h;
}

/// "p/q" with the "/q" omitted for integers.
inline std::string rational_to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

/// Accepts an optionally signed integer or integer fraction "p/q".
inline std::optional<Rational> parse_rational(const std::string& text) {
  auto is_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (t[i] < '0' || t[i] > '9') return false;
    return true;
  };
  std::size_t slash = text.find('/');
  if (slash == std::string::npos) {
    if (!is_int(text)) return std::nullopt;
    return Rational(Integer(text));
  }
  std::string num = text.substr(0, slash);
  std::string den = text.substr(slash + 1);
  if (!is_int(num) || !is_int(den)) return std::nullopt;
  Integer d(den);
  if (d == 0) return std::nullopt;
  return Rational(Integer(num), d);
}

}  // namespace treeshift
