#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <vector>

namespace rentharmony {

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator (GMP mpq canonical form).
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;
using RVec = std::vector<Rational>;

/// Parses "p", "-p" or "p/q". Throws std::invalid_argument on malformed input
/// or a zero denominator.
Rational parse_rational(const std::string& text);

/// Canonical text form: "p" for integers, otherwise "p/q".
std::string to_string(const Rational& value);

/// Largest integer not exceeding `value`.
BigInt floor_of(const Rational& value);

Rational sum(const RVec& values);

}  // namespace rentharmony
