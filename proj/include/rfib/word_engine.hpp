#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rfib/bigint.hpp"
#include "rfib/log_matrix.hpp"
#include "rfib/seed_algebra.hpp"

namespace rfib {

// A word over the seed alphabet; entries are 0-based seed indices.
using Word = std::vector<std::size_t>;

inline constexpr std::size_t kDefaultDigitCap = 200000;

/// The partial quotients (q_m), m >= 1, that drive the tower.
class QuotientSource {
 public:
  /// Finite list q_1, q_2, ...; `name` tags a named constant such as
  /// "one_over_pi" whose terms the caller supplies.
  static QuotientSource explicit_terms(std::vector<std::uint64_t> terms,
                                       std::string name = "explicit");
  /// Unbounded sequence with every q_m equal to `value`.
  static QuotientSource constant(std::uint64_t value);

  std::optional<std::uint64_t> at(std::size_t m) const;
  /// Throws QuotientExhausted when q_m is not available.
  std::uint64_t require(std::size_t m) const;

  bool unbounded() const { return constant_.has_value(); }
  /// Number of available terms; SIZE_MAX when unbounded.
  std::size_t available() const;
  const std::string& name() const { return name_; }
  const std::vector<std::uint64_t>& terms() const { return terms_; }
  std::optional<std::uint64_t> constant_value() const { return constant_; }

 private:
  std::vector<std::uint64_t> terms_;
  std::optional<std::uint64_t> constant_;
  std::string name_;
};

/// Seeds, the two base words, and the quotient schedule. Levels are labelled
/// so that P_{m+2} = P_{m+1}^{q_m} P_m for m >= first_level, with P at
/// first_level built from p1_word and the next level from p2_word.
class WordSpec {
 public:
  /// Validates seeds, word indices, and both base products; throws InvalidSpec.
  WordSpec(std::vector<SeedMatrix> seeds, Word p1_word, Word p2_word, QuotientSource quotients,
           int first_level = 1);

  const std::vector<SeedMatrix>& seeds() const { return seeds_; }
  const Word& p1_word() const { return p1_; }
  const Word& p2_word() const { return p2_; }
  const QuotientSource& quotients() const { return quotients_; }
  int first_level() const { return first_level_; }

  IMatrix2 p1() const;
  IMatrix2 p2() const;
  std::uint64_t quotient(int m) const { return quotients_.require(static_cast<std::size_t>(m)); }

  /// True when p1_word is a prefix of p2_word.
  bool has_prefix_property() const;
  /// The pair (P_{f+1}, P_{f+2}) as a new spec starting one level higher.
  WordSpec reindexed() const;
  /// This spec if it has the prefix property, otherwise reindexed().
  WordSpec normalized() const;
  /// Lowest tower level usable in prefix decompositions.
  int decomposition_base() const { return first_level_ + (has_prefix_property() ? 1 : 2); }

 private:
  std::vector<SeedMatrix> seeds_;
  Word p1_;
  Word p2_;
  QuotientSource quotients_;
  int first_level_;
};

IMatrix2 word_product(std::span<const SeedMatrix> seeds, std::span<const std::size_t> word);

/// A run A^j or B^k in the two-seed construction; exponent must be >= 2.
struct Block {
  PowerKind kind;
  unsigned exponent;
};

/// Seeds {A, B} (indices 0 and 1) with base words built from blocks.
WordSpec ab_block_spec(const std::vector<Block>& p1, const std::vector<Block>& p2,
                       QuotientSource quotients);
Word ab_block_word(const std::vector<Block>& blocks);

struct TowerLevel {
  int level = 0;
  std::uint64_t length = 0;  // k_m
  std::uint64_t p1_count = 0;
  std::uint64_t p2_count = 0;
  std::optional<IMatrix2> exact;
  LogMatrix2 approx;

  bool is_exact() const { return exact.has_value(); }
  double log_abs_c() const;
};

class ProductTower {
 public:
  int first_level() const { return levels_.front().level; }
  int top_level() const { return levels_.back().level; }
  int top_exact_level() const;
  const TowerLevel& at(int m) const;
  const std::vector<TowerLevel>& levels() const { return levels_; }
  /// q_m as used while building (first_level <= m <= top_level - 2).
  std::uint64_t quotient(int m) const;
  std::size_t exact_digit_cap() const { return cap_; }
  /// Relative difference of log|c| between exact and log-domain arithmetic
  /// at the top exact level.
  double exact_log_agreement() const { return agreement_; }

 private:
  friend ProductTower build_tower(const WordSpec&, int, std::size_t);
  std::vector<TowerLevel> levels_;
  std::vector<std::uint64_t> quotients_;
  std::size_t cap_ = kDefaultDigitCap;
  double agreement_ = 0.0;
};

/// Levels first_level..horizon. Levels whose entries would exceed
/// `exact_digit_cap` decimal digits carry only the log-domain surrogate.
ProductTower build_tower(const WordSpec& spec, int horizon,
                         std::size_t exact_digit_cap = kDefaultDigitCap);

/// Lazy generator of the limiting seed word. Memory is bounded by the tower
/// depth reached so far.
class SymbolStream {
 public:
  /// Throws PrefixViolation if p1_word is not a prefix of p2_word.
  explicit SymbolStream(WordSpec spec);

  std::size_t next();
  std::uint64_t position() const { return position_; }
  std::size_t depth() const { return stack_.size(); }

 private:
  struct Frame {
    int level;
    std::uint64_t child;
  };
  WordSpec spec_;
  std::vector<Frame> stack_;
  int root_level_;
  std::uint64_t position_ = 0;
};

SymbolStream symbol_stream(const WordSpec& spec);

/// The first n symbols of the limiting word (reindexing if needed).
Word stream_prefix(const WordSpec& spec, std::uint64_t n);

/// Q_n, the product of the first n stream matrices. Throws
/// DigitBudgetExceeded when entries outgrow `digit_cap` digits.
IMatrix2 prefix_product(const WordSpec& spec, std::uint64_t n,
                        std::size_t digit_cap = kDefaultDigitCap);

struct DecompositionFactor {
  int level;
  std::uint64_t exponent;
  bool operator==(const DecompositionFactor&) const = default;
};

/// Q_n = P_{m_l}^{n_l} ... P_{m_1}^{n_1} * (last remainder_len symbols).
struct Decomposition {
  std::vector<DecompositionFactor> factors;  // ascending level
  std::uint64_t remainder_len = 0;
  int base_level = 2;
};

/// Greedy peeling of the largest tower power, recursing on the remainder.
/// `base_level` defaults to spec.decomposition_base().
Decomposition decompose_prefix(const WordSpec& spec, std::uint64_t n, const ProductTower& tower,
                               std::optional<int> base_level = std::nullopt);

/// Product of the factors (without the remainder).
IMatrix2 recompose(const Decomposition& d, const ProductTower& tower);

/// All n in [1, limit] whose decomposition has no remainder, ascending.
std::vector<std::uint64_t> checkpoint_indices(const WordSpec& spec, const ProductTower& tower,
                                              std::uint64_t limit,
                                              std::optional<int> base_level = std::nullopt);

/// n1_m / (n1_m + n2_m): share of P_1 blocks among the blocks of P_m.
Rational letter_frequency(const ProductTower& tower, int m);
/// n1_m / n2_m; nullopt at the level where n2 is zero.
std::optional<Rational> p1_p2_ratio(const ProductTower& tower, int m);

/// Convergents of [0; q_1, q_2, ...]: the first `count` of them.
std::vector<Rational> cf_convergents(const QuotientSource& quotients, std::size_t count);

/// P_m spelled in base blocks: true for a P_1 block, false for P_2.
std::vector<bool> block_word(const WordSpec& spec, int m);

}  // namespace rfib
