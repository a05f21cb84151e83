#pragma once

// Exact-arithmetic helpers shared by every module. Rationals are GMP mpq
// values; the wire representation is always "numerator/denominator".

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sgt {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", "p", or a decimal such as "0.25" into an exact rational.
Rational parse_rational(std::string_view text);

/// Always emits "p/q" (integers become "p/1").
std::string to_fraction_string(const Rational& q);

long double to_long_double(const Rational& q);

/// Natural log of a positive rational, accurate for huge numerators and
/// denominators where a plain conversion would overflow.
long double log_rational(const Rational& q);

Integer pow_integer(const Integer& base, unsigned long exponent);
Rational pow_rational(const Rational& base, unsigned long exponent);

Integer lcm(const Integer& a, const Integer& b);

/// Euler's totient.
std::uint64_t totient(std::uint64_t n);

class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sgt
