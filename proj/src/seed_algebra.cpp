#include "rfib/seed_algebra.hpp"

#include <sstream>

#include "rfib/errors.hpp"

namespace rfib {

SeedMatrix::SeedMatrix(int eps, std::int64_t s) : epsilon(eps), shift(s) {
  if (eps != 1 && eps != -1) {
    throw InvalidSpec("seed epsilon must be +1 or -1, got " + std::to_string(eps));
  }
}

IMatrix2 IMatrix2::of(long a, long b, long c, long d) {
  return {BigInt(a), BigInt(b), BigInt(c), BigInt(d)};
}

BigInt IMatrix2::max_abs_entry() const {
  BigInt m = abs(a);
  for (const BigInt* e : {&b, &c, &d}) {
    if (abs(*e) > m) m = abs(*e);
  }
  return m;
}

std::size_t IMatrix2::max_digits() const { return approx_decimal_digits(max_abs_entry()); }

std::string IMatrix2::str() const {
  std::ostringstream os;
  os << "[[" << render(a) << "," << render(b) << "],[" << render(c) << "," << render(d) << "]]";
  return os.str();
}

IMatrix2 operator*(const IMatrix2& x, const IMatrix2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

IMatrix2 seed_to_matrix(const SeedMatrix& seed) {
  return IMatrix2::of(0, seed.epsilon, 1, static_cast<long>(seed.shift));
}

IMatrix2 mat_mul(const IMatrix2& x, const IMatrix2& y) { return x * y; }

IMatrix2 mat_pow(IMatrix2 x, std::uint64_t n) {
  IMatrix2 result;
  while (n > 0) {
    if (n & 1) result = result * x;
    n >>= 1;
    if (n > 0) x = x * x;
  }
  return result;
}

void right_multiply(IMatrix2& m, const SeedMatrix& seed) {
  // [[a,b],[c,d]] * [[0,e],[1,s]] = [[b, e*a + s*b], [d, e*c + s*d]]
  const long s = static_cast<long>(seed.shift);
  BigInt top = m.b * s;
  BigInt bottom = m.d * s;
  if (seed.epsilon > 0) {
    top += m.a;
    bottom += m.c;
  } else {
    top -= m.a;
    bottom -= m.c;
  }
  m.a.swap(m.b);
  m.b.swap(top);
  m.c.swap(m.d);
  m.d.swap(bottom);
}

IMatrix2 fibonacci_power_form(PowerKind kind, std::uint64_t n) {
  if (n == 0) throw InvalidSpec("fibonacci_power_form requires n >= 1");
  BigInt f_prev, f_n, f_next;
  mpz_fib2_ui(f_n.get_mpz_t(), f_prev.get_mpz_t(), n);
  f_next = f_n + f_prev;
  if (kind == PowerKind::ALike) return {f_prev, f_n, f_n, f_next};
  IMatrix2 m{f_prev, -f_n, -f_n, f_next};
  return (n % 2 == 0) ? m : -m;
}

IMatrix2 fibonacci_power_form(const SeedMatrix& seed, std::uint64_t n) {
  if (seed == seed_a()) return fibonacci_power_form(PowerKind::ALike, n);
  if (seed == seed_b()) return fibonacci_power_form(PowerKind::BLike, n);
  throw InvalidSpec("fibonacci_power_form only applies to the seeds A and B");
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::Determinant: return "det";
    case Condition::CornerMagnitude: return "|d|>=2";
    case Condition::UpperRightNonzero: return "b!=0";
    case Condition::LowerLeftNonzero: return "c!=0";
    case Condition::RatioAB: return "|a|<=|b|";
    case Condition::RatioCD: return "|c|<=|d|";
    case Condition::RatioAC: return "|a|<=|c|";
    case Condition::RatioBD: return "|b|<=|d|";
  }
  return "?";
}

bool ValidationReport::has(Condition c) const {
  for (const auto& v : violations) {
    if (v.condition == c) return true;
  }
  return false;
}

ValidationReport validate_base_product(const IMatrix2& p) {
  ValidationReport report;
  auto fail = [&](Condition c, std::string detail) {
    report.violations.push_back({c, std::move(detail)});
  };
  const BigInt aa = abs(p.a), ab = abs(p.b), ac = abs(p.c), ad = abs(p.d);

  if (abs(p.det()) != 1) fail(Condition::Determinant, "det = " + render(p.det()));
  if (ad < 2) fail(Condition::CornerMagnitude, "|d| = " + render(ad));
  if (p.b == 0) fail(Condition::UpperRightNonzero, "b = 0");
  if (p.c == 0) fail(Condition::LowerLeftNonzero, "c = 0");
  if (aa > ab) fail(Condition::RatioAB, render(aa) + " > " + render(ab));
  if (ac > ad) fail(Condition::RatioCD, render(ac) + " > " + render(ad));
  if (aa > ac) fail(Condition::RatioAC, render(aa) + " > " + render(ac));
  if (ab > ad) fail(Condition::RatioBD, render(ab) + " > " + render(ad));

  report.passed = report.violations.empty();
  return report;
}

}  // namespace rfib
