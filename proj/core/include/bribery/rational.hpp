#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace bribery {

// Exact arbitrary-precision rational. Powers, thresholds and rewards all use
// this type so that comparisons against the threshold are never rounded.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Accepts "n", "n/d", "-n/d" and finite decimals such as "0.25" or "-1.5".
// Throws Error(ErrorCode::kParse) on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

// Canonical text form: "n" for integers, otherwise "n/d" in lowest terms.
std::string to_string(const Rational& value);

// Decimal rendering rounded half away from zero to `digits` places. Only used
// for convenience columns; every exact value is also reported as a fraction.
std::string to_decimal_string(const Rational& value, int digits = 6);

inline Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

}  // namespace bribery
