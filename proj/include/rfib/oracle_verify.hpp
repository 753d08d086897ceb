#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rfib/growth_analysis.hpp"

namespace rfib {

struct LemmaFailure {
  std::string detail;
  std::vector<std::pair<std::string, IMatrix2>> matrices;
};

struct LemmaReport {
  std::string lemma;
  std::uint64_t instances = 0;  // instances that met the hypotheses and were checked
  std::uint64_t filtered = 0;   // candidates rejected by the hypothesis filter
  std::uint64_t failure_count = 0;
  std::vector<LemmaFailure> failures;  // first kMaxWitnesses failures
  double elapsed_seconds = 0;
  std::vector<std::string> notes;

  static constexpr std::size_t kMaxWitnesses = 20;

  bool passed() const { return failure_count == 0; }
  double filter_rate() const;
  void fail(LemmaFailure f);
  void merge(const LemmaReport& other);
};

enum class PopulationKind {
  ABBlocks,      // runs A^j, B^k with 2 <= j, k <= 6
  GeneralSeeds,  // 1..3 seeds with |shift| <= 5, epsilon = +-1
};

/// Deterministic source of random seed-word products of length <= max_len.
class MatrixPopulation {
 public:
  MatrixPopulation(std::uint64_t seed, PopulationKind kind, std::size_t max_len = 12);

  IMatrix2 next();
  /// A random seed set and word (general kind) or {A, B} and a block word.
  std::pair<std::vector<SeedMatrix>, Word> next_word();
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  PopulationKind kind_;
  std::size_t max_len_;
};

enum class DetPopulation { PlusOne, AbsOne };

/// Sandwich closure under products: both halves of the lemma on random pairs
/// drawn from both population kinds. Runs until `trials` instances pass the
/// hypothesis filter or the attempt budget runs out.
LemmaReport verify_lemma_positive(DetPopulation det, std::uint64_t trials, std::uint64_t seed);

/// Monotonicity of the entries of p^i for 2 <= i <= i_max.
LemmaReport verify_lemma_power(const IMatrix2& p, unsigned i_max);
/// The same over validated random products until `trials` matrices are checked.
LemmaReport verify_lemma_power(std::uint64_t trials, unsigned i_max, std::uint64_t seed);

/// sign(a/c) = sign(b/d) over random products with nonzero entries.
LemmaReport verify_samesigns(std::uint64_t trials, std::uint64_t seed);

/// |d_{m+2}| > |d_m|, |b_{m+2}| >= |b_{m+1}|, and growth of |a| past the
/// level after which |b| stays >= 2, over the exact levels of one tower.
LemmaReport verify_entry_divergence(const ProductTower& tower);
/// The same over random Exponential towers until `trials` level checks ran.
LemmaReport verify_entry_divergence(std::uint64_t trials, std::uint64_t seed);

/// t1^{l + sum n_i} prod |c_{m_i}|^{n_i} <= |g_n| <= t2^{...} prod ... at every
/// checkpoint n <= limit, decomposed over levels >= the sandwich base.
LemmaReport verify_g_bounds(const WordSpec& spec, const ProductTower& tower, std::uint64_t limit);

/// |g_{n_k}| <= n_k max(|c_1|, |c_2|) at checkpoints and all entries of Q_n
/// below D n for n <= N.
LemmaReport verify_linear_growth(const WordSpec& spec, const ProductTower& tower, std::uint64_t N);

/// Random n <= n_max: recomposed factors times Q_{remainder} equal Q_n, and
/// the factor constraints hold.
LemmaReport verify_decomposition(const WordSpec& spec, const ProductTower& tower,
                                 std::uint64_t trials, std::uint64_t seed,
                                 std::uint64_t n_max = 10000);

}  // namespace rfib
