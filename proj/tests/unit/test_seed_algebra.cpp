#include <gtest/gtest.h>

#include <random>

#include "../support/oracles.hpp"
#include "rfib/errors.hpp"
#include "rfib/seed_algebra.hpp"

using namespace rfib;

namespace {

IMatrix2 from_oracle(const oracle::Mat& m) { return {m.a, m.b, m.c, m.d}; }

IMatrix2 A() { return seed_to_matrix(seed_a()); }
IMatrix2 B() { return seed_to_matrix(seed_b()); }

}  // namespace

TEST(SeedAlgebra, SeedMatrices) {
  EXPECT_EQ(A(), IMatrix2::of(0, 1, 1, 1));
  EXPECT_EQ(B(), IMatrix2::of(0, 1, 1, -1));
  const IMatrix2 r = seed_to_matrix(SeedMatrix(-1, 0));
  EXPECT_EQ(r, IMatrix2::of(0, -1, 1, 0));
  EXPECT_EQ(r.det(), 1);
  EXPECT_THROW(SeedMatrix(2, 1), InvalidSpec);
  EXPECT_THROW(SeedMatrix(0, 1), InvalidSpec);
}

TEST(SeedAlgebra, MatMul) {
  EXPECT_EQ(mat_mul(A(), A()), IMatrix2::of(1, 1, 1, 2));
  const IMatrix2 a3 = IMatrix2::of(1, 2, 2, 3);
  const IMatrix2 b3 = IMatrix2::of(-1, 2, 2, -3);
  EXPECT_EQ(a3 * b3, IMatrix2::of(3, -4, 4, -5));
  // Scalar recurrence oracle for A^3 B^3.
  const auto p = oracle::fold({{1, 1}, {1, -1}}, "aaabbb");
  EXPECT_EQ(mat_mul(mat_pow(A(), 3), mat_pow(B(), 3)), from_oracle(p));
  const IMatrix2 x = IMatrix2::of(7, -3, 5, 2);
  EXPECT_EQ(IMatrix2::identity() * x, x);
}

TEST(SeedAlgebra, MatPow) {
  EXPECT_EQ(mat_pow(A(), 0), IMatrix2::identity());
  EXPECT_EQ(mat_pow(A(), 5), IMatrix2::of(3, 5, 5, 8));
  EXPECT_EQ(mat_pow(B(), 4), IMatrix2::of(2, -3, -3, 5));
}

TEST(SeedAlgebra, MatPowMatchesFold) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const long s = static_cast<long>(rng() % 11) - 5;
    const long e = (rng() & 1) ? 1 : -1;
    const SeedMatrix seed(static_cast<int>(e), s);
    const IMatrix2 x = seed_to_matrix(seed) * seed_to_matrix(seed_b());
    oracle::Mat ox = oracle::mul(oracle::seed_mat({e, s}), oracle::seed_mat({1, -1}));
    for (unsigned n = 0; n <= 64; ++n) {
      ASSERT_EQ(mat_pow(x, n), from_oracle(oracle::naive_pow(ox, n))) << "n = " << n;
    }
  }
}

TEST(SeedAlgebra, RightMultiplyMatchesProduct) {
  IMatrix2 m = IMatrix2::of(3, -7, 2, 5);
  const SeedMatrix s(-1, 4);
  const IMatrix2 expect = m * seed_to_matrix(s);
  right_multiply(m, s);
  EXPECT_EQ(m, expect);
}

TEST(SeedAlgebra, FibonacciPowerForm) {
  EXPECT_EQ(fibonacci_power_form(PowerKind::ALike, 2), IMatrix2::of(1, 1, 1, 2));
  EXPECT_EQ(fibonacci_power_form(PowerKind::BLike, 3), IMatrix2::of(-1, 2, 2, -3));
  EXPECT_EQ(fibonacci_power_form(PowerKind::ALike, 1), A());
  EXPECT_THROW(fibonacci_power_form(PowerKind::ALike, 0), InvalidSpec);
  EXPECT_THROW(fibonacci_power_form(SeedMatrix(-1, 1), 3), InvalidSpec);
  for (unsigned n = 1; n <= 200; ++n) {
    ASSERT_EQ(fibonacci_power_form(seed_a(), n), mat_pow(A(), n));
    ASSERT_EQ(fibonacci_power_form(seed_b(), n), mat_pow(B(), n));
  }
  const IMatrix2 a30 = fibonacci_power_form(PowerKind::ALike, 30);
  EXPECT_EQ(a30.b, oracle::fib(30));
}

TEST(SeedAlgebra, Validation) {
  EXPECT_TRUE(validate_base_product(IMatrix2::of(1, 1, 1, 2)).passed);
  const ValidationReport a = validate_base_product(A());
  EXPECT_FALSE(a.passed);
  EXPECT_TRUE(a.has(Condition::CornerMagnitude));
  EXPECT_TRUE(validate_base_product(IMatrix2::of(3, -4, 4, -5)).passed);

  const ValidationReport zero_b = validate_base_product(IMatrix2::of(1, 0, 3, 1));
  EXPECT_TRUE(zero_b.has(Condition::UpperRightNonzero));
  EXPECT_TRUE(validate_base_product(IMatrix2::of(2, 1, 1, 1)).has(Condition::RatioAB));
  EXPECT_TRUE(validate_base_product(IMatrix2::of(1, 3, 3, 2)).has(Condition::RatioCD));
  EXPECT_TRUE(validate_base_product(IMatrix2::of(2, 5, 1, 3)).has(Condition::RatioAC));
  EXPECT_TRUE(validate_base_product(IMatrix2::of(1, 2, 2, 6)).has(Condition::Determinant));
  // a = 0 is admissible: |a| <= |b| holds.
  EXPECT_TRUE(validate_base_product(IMatrix2::of(0, 1, 1, 2)).passed);
  for (const auto& r : {validate_base_product(A()), validate_base_product(IMatrix2::of(1, 1, 1, 2))}) {
    EXPECT_EQ(r.passed, r.violations.empty());
  }
}

TEST(SeedAlgebra, DeterminantOfRandomWords) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<SeedMatrix> seeds;
    for (int i = 0; i < 3; ++i) {
      seeds.emplace_back((rng() & 1) ? 1 : -1, static_cast<long>(rng() % 11) - 5);
    }
    IMatrix2 m;
    const std::size_t len = 1 + rng() % 40;
    for (std::size_t i = 0; i < len; ++i) m = m * seed_to_matrix(seeds[rng() % 3]);
    ASSERT_EQ(abs(m.det()), 1);
  }
}

TEST(SeedAlgebra, SignCoupling) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    IMatrix2 m;
    const std::size_t len = 1 + rng() % 12;
    for (std::size_t i = 0; i < len; ++i) {
      m = m * seed_to_matrix(SeedMatrix((rng() & 1) ? 1 : -1, static_cast<long>(rng() % 7) - 3));
    }
    if (sign(m.a) == 0 || sign(m.b) == 0 || sign(m.c) == 0 || sign(m.d) == 0) continue;
    ++checked;
    ASSERT_EQ(sign(m.a) * sign(m.c), sign(m.b) * sign(m.d)) << m.str();
  }
  EXPECT_GT(checked, 500);
}

TEST(SeedAlgebra, Rendering) {
  EXPECT_EQ(render(BigInt(-42)), "-42");
  BigInt big_value;
  mpz_ui_pow_ui(big_value.get_mpz_t(), 10, 60);
  EXPECT_EQ(render(big_value), "100000000000...(61 digits)");
  EXPECT_EQ(render(big_value, true).size(), 61u);
  EXPECT_EQ(decimal_digits(big_value), 61u);
  EXPECT_EQ(decimal_digits(BigInt(999)), 3u);
  EXPECT_NEAR(log_abs(big_value), 60 * std::log(10.0), 1e-9);
}
