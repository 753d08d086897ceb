#include "rfib/log_matrix.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rfib {

LogMatrix2 LogMatrix2::from_exact(const IMatrix2& m) {
  LogMatrix2 r;
  long ref = 0;
  mantissa64(m.max_abs_entry(), ref);
  const BigInt* entries[] = {&m.a, &m.b, &m.c, &m.d};
  for (int i = 0; i < 4; ++i) {
    long e = 0;
    long double mant = mantissa64(*entries[i], e);
    r.unit[i] = std::ldexp(mant, static_cast<int>(e - ref));
  }
  r.log_scale = static_cast<long double>(ref) * std::numbers::ln2_v<long double>;
  r.normalize();
  return r;
}

long double LogMatrix2::log_abs(int entry) const {
  const long double v = std::fabs(unit[entry]);
  if (v == 0.0L) return -std::numeric_limits<long double>::infinity();
  return log_scale + std::log(v);
}

void LogMatrix2::normalize() {
  long double m = 0.0L;
  for (long double v : unit) m = std::max(m, std::fabs(v));
  if (m == 0.0L) return;
  for (long double& v : unit) v /= m;
  log_scale += std::log(m);
}

LogMatrix2 operator*(const LogMatrix2& x, const LogMatrix2& y) {
  const auto& p = x.unit;
  const auto& q = y.unit;
  LogMatrix2 r;
  r.unit = {p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3],
            p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3]};
  r.log_scale = x.log_scale + y.log_scale;
  r.normalize();
  return r;
}

LogMatrix2 pow(LogMatrix2 x, std::uint64_t n) {
  LogMatrix2 result;
  while (n > 0) {
    if (n & 1) result = result * x;
    n >>= 1;
    if (n > 0) x = x * x;
  }
  return result;
}

}  // namespace rfib
