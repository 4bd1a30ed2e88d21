#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace ck {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p", "-p", "p/q" (whitespace allowed around the slash). Result is canonical.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers print without the denominator.
std::string to_string(const Rational& q);

/// Decimal rendering with the given number of significant digits (reports only).
std::string to_decimal(const Rational& q, int significant = 6);

/// Exact square root when q is the square of a rational, std::nullopt otherwise.
std::optional<Rational> exact_sqrt(const Rational& q);

Rational factorial(int k);

/// Generalized binomial coefficient (r choose k) for rational r.
Rational binomial(const Rational& r, int k);

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace ck
