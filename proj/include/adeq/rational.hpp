#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <string_view>

namespace adeq {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses an exact rational from "p/q", an integer, or a decimal literal such
/// as "1.25" or "3e-2". Throws ParseError on malformed text.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise (always in lowest terms).
std::string to_string(const Rational& value);

/// Exact binary value of a finite double.
Rational exact_from_double(double value);

inline double to_double(const Rational& value) { return value.get_d(); }

/// Number of bits in |value|; zero has bit length 0.
std::size_t bit_length(const Integer& value);

Integer lcm(const Integer& a, const Integer& b);

/// Floor of the square root of a non-negative integer.
Integer isqrt(const Integer& value);

/// Smallest integer r with r * r >= value.
Integer ceil_sqrt(const Integer& value);

Integer factorial(unsigned long n);

}  // namespace adeq
