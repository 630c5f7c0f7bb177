#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "matchwalk/error.hpp"

namespace matchwalk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Parses "3", "1/2", "0.25" or "-1.5e-1" exactly.
inline Rational parse_rational(std::string_view s) {
  auto fail = [&] { return PreconditionError("not a rational number: '" + std::string(s) + "'"); };
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw fail();

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw fail();
    return num / den;
  }

  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  BigInt digits = 0;
  long scale = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      if (dot) --scale;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw fail();
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw fail();
    std::string exp(s.substr(i + 1));
    if (exp.empty()) throw fail();
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(exp, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != exp.size()) throw fail();
    scale += e;
  }
  Rational r(digits);
  BigInt ten = 10;
  if (scale > 0) r *= boost::multiprecision::pow(ten, static_cast<unsigned>(scale));
  if (scale < 0) r /= boost::multiprecision::pow(ten, static_cast<unsigned>(-scale));
  return negative ? Rational(-r) : r;
}

/// ceil(q) for q > 0.
inline std::int64_t ceil_positive(const Rational& q) {
  BigInt n = numerator(q), d = denominator(q);
  BigInt c = (n + d - 1) / d;
  return c.convert_to<std::int64_t>();
}

inline std::int64_t floor_nonnegative(const Rational& q) {
  BigInt f = numerator(q) / denominator(q);
  return f.convert_to<std::int64_t>();
}

}  // namespace matchwalk
