#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>

namespace rfib {

using BigInt = mpz_class;
using Rational = mpq_class;

// Natural log of |x|; -inf when x == 0. Valid far beyond double range.
double log_abs(const BigInt& x);

// log|p/q| for a rational, again without converting through double.
double log_abs(const Rational& x);

std::size_t decimal_digits(const BigInt& x);
// Upper estimate from the bit length; cheap for million-digit values.
std::size_t approx_decimal_digits(const BigInt& x);

// Nearest double to x, computed from mantissa/exponent pairs so that huge
// numerators and denominators do not overflow.
double to_double(const Rational& x);
long double to_long_double(const Rational& x);

int sign(const BigInt& x);

inline BigInt big(std::uint64_t v) { return BigInt(static_cast<unsigned long>(v)); }

// x = m * 2^exp with |m| in [0.5, 1), m carrying the sign and 64 bits.
long double mantissa64(const BigInt& x, long& exp);

// x / y from the leading bits of each; 0 when x is 0.
long double ratio_ld(const BigInt& x, const BigInt& y);

// Full decimal rendering, or "sign + leading digits + ...(N digits)" past
// `threshold` digits unless `full` is set.
std::string render(const BigInt& x, bool full = false, std::size_t threshold = 40);
std::string render(const Rational& x, bool full = false, std::size_t threshold = 40);

}  // namespace rfib
