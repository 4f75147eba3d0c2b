#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace prfront {

/// Exact rational used for every time, rate and resource quantity.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses a decimal literal ("206.5", "-3", "1e6", "0.48") or a ratio ("1375/3").
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// True when the value is a whole number.
bool is_integer(const Rational& value);

/// Fixed-point rendering with `places` decimals, rounding half away from zero.
std::string to_fixed(const Rational& value, int places);

/// Shortest exact rendering: a terminating decimal when one exists, else "p/q".
/// parse_rational(to_exact(x)) == x for every x.
std::string to_exact(const Rational& value);

double to_double(const Rational& value);

Rational rational_min(const Rational& a, const Rational& b);
Rational rational_max(const Rational& a, const Rational& b);

}  // namespace prfront
