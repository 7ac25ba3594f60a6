#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace folsing {

using Rational = mpq_class;
using Integer = mpz_class;

/// num/den in lowest terms. The two-argument mpq_class constructor does not
/// reduce, and GMP arithmetic assumes reduced operands.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "p", "p/q", "-p/q" or a plain decimal such as "-1.25" exactly.
/// Throws InputError on anything else.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" form; the denominator is always written, even when 1.
std::string format_rational(const Rational& value);

/// Shortest human form: "3", "-1/2".
std::string pretty_rational(const Rational& value);

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace folsing
