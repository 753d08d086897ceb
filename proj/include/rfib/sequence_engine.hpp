#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rfib/word_engine.hpp"

namespace rfib {

/// G_1, G_2 held as exact rationals. A floating input is stored as the exact
/// value of the double and marked approximate.
struct InitialPair {
  Rational g1{0}, g2{0};
  bool approximate = false;

  static InitialPair exact(Rational g1, Rational g2);
  static InitialPair floating(double g1, double g2);
  bool all_zero() const { return sgn(g1) == 0 && sgn(g2) == 0; }
};

struct SequenceOptions {
  /// Keep every G_n numerator (memory grows quadratically in N).
  bool store_terms = false;
};

/// Terms G_1..G_{N+2}. All terms share the denominator `denominator`;
/// numerators are integers.
struct SequenceRun {
  std::uint64_t N = 0;
  BigInt denominator{1};
  std::vector<BigInt> numerators;  // G_1.. when stored, else empty
  std::vector<double> log_abs;     // log|G_n| for n = 1..N+2, index n-1
  BigInt last[2];                  // numerators of G_{N+1}, G_{N+2}
  bool all_zero = false;
  bool approximate = false;

  std::uint64_t size() const { return N + 2; }
  bool has_terms() const { return !numerators.empty(); }
  /// Exact G_n; needs stored terms unless n >= N + 1.
  Rational term(std::uint64_t n) const;
  double log_abs_term(std::uint64_t n) const { return log_abs.at(n - 1); }
};

/// Calls visit(n, num_{n-1}, num_n) for n = 3..N+2 in order, with numerators
/// over the common denominator. Stops early when visit returns false.
void for_each_term(const WordSpec& spec, const InitialPair& init, std::uint64_t N,
                   const std::function<bool(std::uint64_t, const BigInt&, const BigInt&)>& visit);

BigInt common_denominator(const InitialPair& init);

SequenceRun generate_sequence(const WordSpec& spec, const InitialPair& init, std::uint64_t N,
                              const SequenceOptions& opt = {});

struct RootSample {
  std::uint64_t n;
  double root;  // |G_n|^{1/n}
};

struct RootGrowth {
  std::vector<RootSample> samples;
  std::uint64_t skipped_zeros = 0;
};

/// Samples at n = stride, 2 stride, ... up to N + 2, skipping zero terms.
RootGrowth root_growth(const SequenceRun& run, std::uint64_t stride);

struct DegenerateStatus {
  bool warning = false;
  std::string note;
};

/// Warns when |g1 M + g2| <= tol + |g1| err_M for an approximate init. Exact
/// rational inits are always ok.
DegenerateStatus degenerate_check(const InitialPair& init, long double M, double err_M,
                                  double tol);

struct CheckpointRatio {
  std::uint64_t n;
  long double ratio;         // G_{n+1} / G_{n+2}
  long double column_ratio;  // e_n / g_n
};

/// Ratios at every checkpoint n_j <= limit. Throws Error naming the index when
/// G_{n_j+2} or g_{n_j} is zero.
std::vector<CheckpointRatio> checkpoint_ratios(const WordSpec& spec, const InitialPair& init,
                                               const ProductTower& tower, std::uint64_t limit);

}  // namespace rfib
