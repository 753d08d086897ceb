#pragma once

#include <array>
#include <cstdint>

#include "rfib/seed_algebra.hpp"

namespace rfib {

// A 2x2 real matrix stored as exp(log_scale) * unit, where the largest
// entry of `unit` has magnitude 1. Signs live in `unit`.
struct LogMatrix2 {
  std::array<long double, 4> unit{1.0L, 0.0L, 0.0L, 1.0L};  // a, b, c, d
  long double log_scale = 0.0L;

  static LogMatrix2 identity() { return {}; }
  static LogMatrix2 from_exact(const IMatrix2& m);

  // Natural log of |entry|; entry index 0..3 is a, b, c, d.
  long double log_abs(int entry) const;
  // entry_i / entry_j, well defined without leaving the unit scale.
  long double ratio(int i, int j) const { return unit[i] / unit[j]; }

  void normalize();
};

LogMatrix2 operator*(const LogMatrix2& x, const LogMatrix2& y);
LogMatrix2 pow(LogMatrix2 x, std::uint64_t n);

}  // namespace rfib
