#include "rfib/bigint.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rfib {

double log_abs(const BigInt& x) {
  if (sgn(x) == 0) return -std::numeric_limits<double>::infinity();
  long exp = 0;
  long double mant = std::fabs(mantissa64(x, exp));
  return static_cast<double>(std::log(mant) +
                             static_cast<long double>(exp) * std::numbers::ln2_v<long double>);
}

double log_abs(const Rational& x) {
  return log_abs(x.get_num()) - log_abs(x.get_den());
}

std::size_t decimal_digits(const BigInt& x) {
  if (sgn(x) == 0) return 1;
  // mpz_sizeinbase may overshoot by one for base 10.
  std::size_t n = mpz_sizeinbase(x.get_mpz_t(), 10);
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, n - 1);
  BigInt ax = abs(x);
  return ax < p ? n - 1 : n;
}

std::size_t approx_decimal_digits(const BigInt& x) {
  const auto bits = mpz_sizeinbase(x.get_mpz_t(), 2);
  return static_cast<std::size_t>(static_cast<double>(bits) * 0.30102999566398120) + 1;
}

double to_double(const Rational& x) { return static_cast<double>(to_long_double(x)); }

long double mantissa64(const BigInt& x, long& exp) {
  const mpz_srcptr z = x.get_mpz_t();
  const std::size_t n = mpz_size(z);
  if (n == 0) {
    exp = 0;
    return 0.0L;
  }
  static_assert(GMP_NUMB_BITS == 64);
  const mp_limb_t hi = mpz_getlimbn(z, static_cast<mp_size_t>(n - 1));
  const mp_limb_t lo = n > 1 ? mpz_getlimbn(z, static_cast<mp_size_t>(n - 2)) : 0;
  const int bits = 64 - __builtin_clzll(hi);
  std::uint64_t top = bits == 64 ? hi : (hi << (64 - bits)) | (lo >> bits);
  exp = static_cast<long>((n - 1) * 64 + static_cast<std::size_t>(bits));
  const long double m = std::ldexp(static_cast<long double>(top), -64);
  return sgn(x) < 0 ? -m : m;
}

long double ratio_ld(const BigInt& x, const BigInt& y) {
  if (sgn(x) == 0) return 0.0L;
  long ex = 0, ey = 0;
  const long double mx = mantissa64(x, ex);
  const long double my = mantissa64(y, ey);
  return std::ldexp(mx / my, static_cast<int>(ex - ey));
}

long double to_long_double(const Rational& x) {
  if (sgn(x) == 0) return 0.0L;
  long ne = 0, de = 0;
  long double num = mantissa64(x.get_num(), ne);
  long double den = mantissa64(x.get_den(), de);
  return std::ldexp(num / den, static_cast<int>(ne - de));
}

int sign(const BigInt& x) { return sgn(x); }

std::string render(const BigInt& x, bool full, std::size_t threshold) {
  std::string s = x.get_str();
  if (full) return s;
  bool neg = !s.empty() && s.front() == '-';
  std::size_t digits = s.size() - (neg ? 1 : 0);
  if (digits <= threshold) return s;
  std::string out = neg ? "-" : "";
  out += s.substr(neg ? 1 : 0, 12);
  out += "...(" + std::to_string(digits) + " digits)";
  return out;
}

std::string render(const Rational& x, bool full, std::size_t threshold) {
  if (x.get_den() == 1) return render(BigInt(x.get_num()), full, threshold);
  return render(BigInt(x.get_num()), full, threshold) + "/" +
         render(BigInt(x.get_den()), full, threshold);
}

}  // namespace rfib
