#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfib/bigint.hpp"

namespace rfib {

/// One step of a generalized random Fibonacci recurrence,
/// realized as [[0, epsilon], [1, shift]].
///
/// Right-multiplying the row vector [G_m, G_{m+1}] by this matrix yields
/// [G_{m+1}, epsilon * G_m + shift * G_{m+1}].
struct SeedMatrix {
  int epsilon = 1;
  std::int64_t shift = 0;

  SeedMatrix() = default;
  /// Throws InvalidSpec unless epsilon is +1 or -1.
  SeedMatrix(int epsilon, std::int64_t shift);

  bool operator==(const SeedMatrix&) const = default;
};

/// Exact 2x2 integer matrix [[a, b], [c, d]].
struct IMatrix2 {
  BigInt a{1}, b{0}, c{0}, d{1};

  static IMatrix2 identity() { return {}; }
  static IMatrix2 of(long a, long b, long c, long d);

  BigInt det() const { return a * d - b * c; }
  BigInt max_abs_entry() const;
  std::size_t max_digits() const;

  bool operator==(const IMatrix2& o) const {
    return a == o.a && b == o.b && c == o.c && d == o.d;
  }
  IMatrix2 operator-() const { return {-a, -b, -c, -d}; }

  std::string str() const;
};

IMatrix2 operator*(const IMatrix2& x, const IMatrix2& y);

/// The matrix A = [[0,1],[1,1]] (a "+" step).
inline SeedMatrix seed_a() { return {1, 1}; }
/// The matrix B = [[0,1],[1,-1]] (a "-" step).
inline SeedMatrix seed_b() { return {1, -1}; }

IMatrix2 seed_to_matrix(const SeedMatrix& seed);

IMatrix2 mat_mul(const IMatrix2& x, const IMatrix2& y);

// Square-and-multiply; n == 0 gives the identity.
IMatrix2 mat_pow(IMatrix2 x, std::uint64_t n);

// In-place right multiplication by a seed; the hot path of every streaming
// product.
void right_multiply(IMatrix2& m, const SeedMatrix& seed);

enum class PowerKind { ALike, BLike };

/// Closed forms of the seed powers:
///   A^n = [[F_{n-1}, F_n], [F_n, F_{n+1}]]
///   B^n = (-1)^n [[F_{n-1}, -F_n], [-F_n, F_{n+1}]]
/// Requires n >= 1.
IMatrix2 fibonacci_power_form(PowerKind kind, std::uint64_t n);

/// Same, dispatching on a seed; throws InvalidSpec for seeds other than A, B.
IMatrix2 fibonacci_power_form(const SeedMatrix& seed, std::uint64_t n);

enum class Condition {
  Determinant,        // |det| == 1
  CornerMagnitude,    // |d| >= 2
  UpperRightNonzero,  // b != 0
  LowerLeftNonzero,   // c != 0
  RatioAB,            // |a| <= |b|
  RatioCD,            // |c| <= |d|
  RatioAC,            // |a| <= |c|
  RatioBD,            // |b| <= |d|
};

std::string to_string(Condition c);

struct Violation {
  Condition condition;
  std::string detail;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;

  bool has(Condition c) const;
};

/// Checks the admissibility conditions for a base product P_1 or P_2.
/// Ratio conditions are compared as |x| <= |y| in exact integers.
ValidationReport validate_base_product(const IMatrix2& p);

}  // namespace rfib
