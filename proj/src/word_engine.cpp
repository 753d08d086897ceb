#include "rfib/word_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rfib/errors.hpp"

namespace rfib {

QuotientSource QuotientSource::explicit_terms(std::vector<std::uint64_t> terms, std::string name) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i] == 0) {
      throw InvalidSpec("partial quotient q_" + std::to_string(i + 1) + " must be positive");
    }
  }
  QuotientSource q;
  q.terms_ = std::move(terms);
  q.name_ = std::move(name);
  return q;
}

QuotientSource QuotientSource::constant(std::uint64_t value) {
  if (value == 0) throw InvalidSpec("constant partial quotient must be positive");
  QuotientSource q;
  q.constant_ = value;
  q.name_ = "constant";
  return q;
}

std::optional<std::uint64_t> QuotientSource::at(std::size_t m) const {
  if (m == 0) return std::nullopt;
  if (constant_) return constant_;
  if (m > terms_.size()) return std::nullopt;
  return terms_[m - 1];
}

std::uint64_t QuotientSource::require(std::size_t m) const {
  auto q = at(m);
  if (!q) throw QuotientExhausted(m);
  return *q;
}

std::size_t QuotientSource::available() const {
  return constant_ ? std::numeric_limits<std::size_t>::max() : terms_.size();
}

IMatrix2 word_product(std::span<const SeedMatrix> seeds, std::span<const std::size_t> word) {
  IMatrix2 m;
  for (std::size_t i : word) right_multiply(m, seeds[i]);
  return m;
}

namespace {

void require_valid(const IMatrix2& p, const std::string& label) {
  ValidationReport r = validate_base_product(p);
  if (r.passed) return;
  std::string msg = label + " = " + p.str() + " fails validation:";
  for (const Violation& v : r.violations) msg += " " + to_string(v.condition) + " (" + v.detail + ")";
  throw InvalidSpec(msg);
}

void check_word(const Word& w, std::size_t nseeds, const std::string& label) {
  if (w.empty()) throw InvalidSpec(label + " word is empty");
  for (std::size_t i : w) {
    if (i >= nseeds) {
      throw InvalidSpec(label + " word uses seed index " + std::to_string(i + 1) + " but only " +
                        std::to_string(nseeds) + " seeds are defined");
    }
  }
}

std::uint64_t checked_length(std::uint64_t q, std::uint64_t k1, std::uint64_t k0) {
  std::uint64_t prod = 0, sum = 0;
  if (__builtin_mul_overflow(q, k1, &prod) || __builtin_add_overflow(prod, k0, &sum)) {
    throw Error("tower level length exceeds 64 bits");
  }
  return sum;
}

}  // namespace

WordSpec::WordSpec(std::vector<SeedMatrix> seeds, Word p1_word, Word p2_word,
                   QuotientSource quotients, int first_level)
    : seeds_(std::move(seeds)),
      p1_(std::move(p1_word)),
      p2_(std::move(p2_word)),
      quotients_(std::move(quotients)),
      first_level_(first_level) {
  if (seeds_.empty()) throw InvalidSpec("no seeds defined");
  if (first_level_ < 1) throw InvalidSpec("first level must be >= 1");
  check_word(p1_, seeds_.size(), "P_1");
  check_word(p2_, seeds_.size(), "P_2");
  require_valid(p1(), "P_" + std::to_string(first_level_));
  require_valid(p2(), "P_" + std::to_string(first_level_ + 1));
}

IMatrix2 WordSpec::p1() const { return word_product(seeds_, p1_); }
IMatrix2 WordSpec::p2() const { return word_product(seeds_, p2_); }

bool WordSpec::has_prefix_property() const {
  return p1_.size() <= p2_.size() && std::equal(p1_.begin(), p1_.end(), p2_.begin());
}

WordSpec WordSpec::reindexed() const {
  const std::uint64_t q = quotient(first_level_);
  Word next;
  next.reserve(p2_.size() * q + p1_.size());
  for (std::uint64_t i = 0; i < q; ++i) next.insert(next.end(), p2_.begin(), p2_.end());
  next.insert(next.end(), p1_.begin(), p1_.end());
  return WordSpec(seeds_, p2_, std::move(next), quotients_, first_level_ + 1);
}

WordSpec WordSpec::normalized() const { return has_prefix_property() ? *this : reindexed(); }

Word ab_block_word(const std::vector<Block>& blocks) {
  Word w;
  for (const Block& b : blocks) {
    if (b.exponent < 2) throw InvalidSpec("A/B block exponents must be at least 2");
    w.insert(w.end(), b.exponent, b.kind == PowerKind::ALike ? 0 : 1);
  }
  return w;
}

WordSpec ab_block_spec(const std::vector<Block>& p1, const std::vector<Block>& p2,
                       QuotientSource quotients) {
  return WordSpec({seed_a(), seed_b()}, ab_block_word(p1), ab_block_word(p2),
                  std::move(quotients));
}

double TowerLevel::log_abs_c() const {
  return exact ? log_abs(exact->c) : static_cast<double>(approx.log_abs(2));
}

int ProductTower::top_exact_level() const {
  int top = first_level() - 1;
  for (const TowerLevel& l : levels_) {
    if (!l.is_exact()) break;
    top = l.level;
  }
  return top;
}

const TowerLevel& ProductTower::at(int m) const {
  if (m < first_level() || m > top_level()) {
    throw InsufficientHorizon("tower has no level " + std::to_string(m) + " (levels " +
                              std::to_string(first_level()) + ".." +
                              std::to_string(top_level()) + ")");
  }
  return levels_[static_cast<std::size_t>(m - first_level())];
}

std::uint64_t ProductTower::quotient(int m) const {
  if (m < first_level() || m > top_level() - 2) {
    throw InsufficientHorizon("quotient q_" + std::to_string(m) + " was not used by this tower");
  }
  return quotients_[static_cast<std::size_t>(m - first_level())];
}

ProductTower build_tower(const WordSpec& spec, int horizon, std::size_t exact_digit_cap) {
  const int f = spec.first_level();
  if (horizon < f + 1) {
    throw InsufficientHorizon("horizon " + std::to_string(horizon) + " is below level " +
                              std::to_string(f + 1));
  }
  ProductTower t;
  t.cap_ = exact_digit_cap;

  TowerLevel l1{f, spec.p1_word().size(), 1, 0, spec.p1(), {}};
  l1.approx = LogMatrix2::from_exact(*l1.exact);
  TowerLevel l2{f + 1, spec.p2_word().size(), 0, 1, spec.p2(), {}};
  l2.approx = LogMatrix2::from_exact(*l2.exact);
  t.levels_.push_back(std::move(l1));
  t.levels_.push_back(std::move(l2));

  const long double ln10 = std::log(10.0L);
  for (int m = f; m + 2 <= horizon; ++m) {
    const std::uint64_t q = spec.quotient(m);
    t.quotients_.push_back(q);
    const TowerLevel& lo = t.levels_[t.levels_.size() - 2];
    const TowerLevel& hi = t.levels_.back();
    TowerLevel next;
    next.level = m + 2;
    next.length = checked_length(q, hi.length, lo.length);
    next.p1_count = checked_length(q, hi.p1_count, lo.p1_count);
    next.p2_count = checked_length(q, hi.p2_count, lo.p2_count);
    next.approx = pow(hi.approx, q) * lo.approx;
    const long double est_digits = next.approx.log_scale / ln10 + 1.0L;
    if (lo.exact && hi.exact && est_digits <= static_cast<long double>(exact_digit_cap)) {
      next.exact = mat_pow(*hi.exact, q) * *lo.exact;
    }
    t.levels_.push_back(std::move(next));
  }

  const TowerLevel& top = t.at(t.top_exact_level());
  const double exact_log = log_abs(top.exact->c);
  const double approx_log = static_cast<double>(top.approx.log_abs(2));
  t.agreement_ = exact_log == 0.0 ? std::fabs(approx_log)
                                  : std::fabs(exact_log - approx_log) / std::fabs(exact_log);
  return t;
}

SymbolStream::SymbolStream(WordSpec spec) : spec_(std::move(spec)), root_level_(0) {
  if (!spec_.has_prefix_property()) {
    throw PrefixViolation("the first base word is not a prefix of the second; reindex the spec");
  }
  root_level_ = spec_.first_level() + 1;
  stack_.push_back({root_level_, 0});
}

std::size_t SymbolStream::next() {
  const int f = spec_.first_level();
  while (true) {
    if (stack_.empty()) {
      // The finished root is the first child of the next level.
      ++root_level_;
      stack_.push_back({root_level_, 1});
    }
    Frame& top = stack_.back();
    if (top.level <= f + 1) {
      const Word& w = top.level == f ? spec_.p1_word() : spec_.p2_word();
      if (top.child < w.size()) {
        ++position_;
        return w[top.child++];
      }
      stack_.pop_back();
      continue;
    }
    const std::uint64_t q = spec_.quotient(top.level - 2);
    if (top.child > q) {
      stack_.pop_back();
      continue;
    }
    const int child_level = top.child < q ? top.level - 1 : top.level - 2;
    ++top.child;
    stack_.push_back({child_level, 0});
  }
}

SymbolStream symbol_stream(const WordSpec& spec) { return SymbolStream(spec); }

Word stream_prefix(const WordSpec& spec, std::uint64_t n) {
  SymbolStream s(spec.normalized());
  Word w;
  w.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) w.push_back(s.next());
  return w;
}

IMatrix2 prefix_product(const WordSpec& spec, std::uint64_t n, std::size_t digit_cap) {
  SymbolStream s(spec.normalized());
  const auto& seeds = spec.seeds();
  const std::size_t bit_cap = static_cast<std::size_t>(static_cast<double>(digit_cap) * 3.3219281) + 1;
  IMatrix2 m;
  for (std::uint64_t i = 0; i < n; ++i) {
    right_multiply(m, seeds[s.next()]);
    if ((i & 63) == 63 && (mpz_sizeinbase(m.b.get_mpz_t(), 2) > bit_cap ||
                           mpz_sizeinbase(m.d.get_mpz_t(), 2) > bit_cap)) {
      throw DigitBudgetExceeded("prefix product Q_" + std::to_string(n) + " exceeds " +
                                std::to_string(digit_cap) + " digits at step " +
                                std::to_string(i + 1));
    }
  }
  return m;
}

Decomposition decompose_prefix(const WordSpec& spec, std::uint64_t n, const ProductTower& tower,
                               std::optional<int> base_level) {
  const int base = base_level.value_or(spec.decomposition_base());
  if (tower.first_level() != spec.first_level()) {
    throw InvalidSpec("tower and spec use different level labels");
  }
  if (base < spec.decomposition_base()) {
    throw PrefixViolation("decomposition base " + std::to_string(base) + " is below " +
                          std::to_string(spec.decomposition_base()));
  }
  if (base > tower.top_level()) {
    throw InsufficientHorizon("decomposition base exceeds the tower horizon");
  }
  Decomposition d;
  d.base_level = base;
  std::uint64_t rest = n;
  while (rest >= tower.at(base).length) {
    int m = base;
    while (m < tower.top_level() && tower.at(m + 1).length <= rest) ++m;
    if (m == tower.top_level()) {
      throw InsufficientHorizon("k_" + std::to_string(m) + " = " +
                                std::to_string(tower.at(m).length) + " does not exceed n = " +
                                std::to_string(n));
    }
    const std::uint64_t i = rest / tower.at(m).length;
    d.factors.push_back({m, i});
    rest -= i * tower.at(m).length;
  }
  std::reverse(d.factors.begin(), d.factors.end());
  d.remainder_len = rest;
  return d;
}

IMatrix2 recompose(const Decomposition& d, const ProductTower& tower) {
  IMatrix2 m;
  for (auto it = d.factors.rbegin(); it != d.factors.rend(); ++it) {
    const TowerLevel& l = tower.at(it->level);
    if (!l.exact) {
      throw DigitBudgetExceeded("level " + std::to_string(it->level) + " is not exact");
    }
    m = m * mat_pow(*l.exact, it->exponent);
  }
  return m;
}

std::vector<std::uint64_t> checkpoint_indices(const WordSpec& spec, const ProductTower& tower,
                                              std::uint64_t limit, std::optional<int> base_level) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 1; n <= limit; ++n) {
    if (decompose_prefix(spec, n, tower, base_level).remainder_len == 0) out.push_back(n);
  }
  return out;
}

Rational letter_frequency(const ProductTower& tower, int m) {
  const TowerLevel& l = tower.at(m);
  Rational r(big(l.p1_count), big(l.p1_count) + big(l.p2_count));
  r.canonicalize();
  return r;
}

std::optional<Rational> p1_p2_ratio(const ProductTower& tower, int m) {
  const TowerLevel& l = tower.at(m);
  if (l.p2_count == 0) return std::nullopt;
  Rational r(big(l.p1_count), big(l.p2_count));
  r.canonicalize();
  return r;
}

std::vector<Rational> cf_convergents(const QuotientSource& quotients, std::size_t count) {
  std::vector<Rational> out;
  BigInt p_prev(1), q_prev(0), p(0), q(1);
  for (std::size_t m = 1; m <= count; ++m) {
    const BigInt a = big(quotients.require(m));
    BigInt p_next = a * p + p_prev;
    BigInt q_next = a * q + q_prev;
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    Rational r(p, q);
    r.canonicalize();
    out.push_back(r);
  }
  return out;
}

std::vector<bool> block_word(const WordSpec& spec, int m) {
  const int f = spec.first_level();
  if (m < f) throw InvalidSpec("level below the first level");
  std::vector<bool> lo{true}, hi{false};
  if (m == f) return lo;
  for (int level = f + 2; level <= m; ++level) {
    const std::uint64_t q = spec.quotient(level - 2);
    if ((hi.size() * q + lo.size()) > 50'000'000) throw Error("block word too long to materialize");
    std::vector<bool> next;
    next.reserve(hi.size() * q + lo.size());
    for (std::uint64_t i = 0; i < q; ++i) next.insert(next.end(), hi.begin(), hi.end());
    next.insert(next.end(), lo.begin(), lo.end());
    lo = std::move(hi);
    hi = std::move(next);
  }
  return hi;
}

}  // namespace rfib
