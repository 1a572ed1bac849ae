#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace coxcheck {

/// Exact belief value. Numerator and denominator are unbounded.
using Rational = mpq_class;

/// Copy reduced to lowest terms. Values built from (numerator, denominator) pairs are not
/// reduced automatically, and GMP comparisons assume reduced operands.
Rational canonical(Rational q);
std::vector<Rational> canonical(std::vector<Rational> values);

/// Parses an integer, a fraction "p/q" or a decimal literal ("0.25", "-1.5e-2")
/// into an exact rational. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

long double to_long_double(const Rational& q);

Rational power(const Rational& base, unsigned exponent);

/// Last continued-fraction convergent of x whose denominator does not exceed max_den.
Rational nearest_convergent(long double x, std::uint64_t max_den);

}  // namespace coxcheck
