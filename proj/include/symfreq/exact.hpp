#pragma once

// Arbitrary-precision integers and rationals used by every exact computation
// in the library. Thin aliases over GMP's C++ classes plus a few helpers.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace symfreq {

using BigInt = mpz_class;
using Rational = mpq_class;

// Accepts "a/b", an integer "a", or a finite decimal "0.25" (converted exactly).
Rational parse_rational(std::string_view text);

std::string to_string(const BigInt& value);
// Always "num/den"; integers come out as "n/1".
std::string to_string(const Rational& value);
double to_double(const Rational& value);

BigInt ipow(const BigInt& base, unsigned long exponent);
Rational rpow(const Rational& base, unsigned long exponent);
BigInt binomial(unsigned long n, unsigned long k);

// ceil/floor of a rational as a BigInt.
BigInt ceil(const Rational& value);
BigInt floor(const Rational& value);

// Saturating conversion used by desk-scale guards: q^e, capped at UINT64_MAX.
std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exponent);

}  // namespace symfreq
