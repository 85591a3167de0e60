#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace syzlab {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Renders as "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);

/// Accepts "p", "p/q", or a decimal literal such as "-0.125" (converted exactly).
Rational parse_rational(std::string_view text);

/// Exact value of a finite double (every double is a dyadic rational).
Rational exact(double x);

bool is_integer(const Rational& q);

}  // namespace syzlab
