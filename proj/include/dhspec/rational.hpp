#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace dhspec {

/// Exact fraction, always kept in lowest terms with a positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

Rational rat(long num, long den = 1);

/// Parses `p/q`, a plain integer, or a decimal literal such as `1.25` or
/// `-3e-2`. Decimals are converted exactly (1.25 -> 5/4).
Rational parse_rational(std::string_view text);

/// `p/q`, or just `p` when the denominator is one.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

bool is_integer(const Rational& q);

/// Exact square root when both numerator and denominator are perfect squares.
bool exact_sqrt(const Rational& q, Rational& root);

}  // namespace dhspec
