#include "rfib/oracle_verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "rfib/errors.hpp"

namespace rfib {

namespace {

constexpr double kTieMargin = 1e-6;

class Stopwatch {
 public:
  explicit Stopwatch(LemmaReport& r) : report_(r), start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    report_.elapsed_seconds +=
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  LemmaReport& report_;
  std::chrono::steady_clock::time_point start_;
};

std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

BigInt floor_mul(const BigInt& x, const BigInt& y, const BigInt& r) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), BigInt(x * r).get_mpz_t(), y.get_mpz_t());
  return q;
}

BigInt ceil_mul(const BigInt& x, const BigInt& y, const BigInt& r) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), BigInt(x * r).get_mpz_t(), y.get_mpz_t());
  return q;
}

// lo_n/lo_d <= x/y <= hi_n/hi_d with all values nonnegative and y > 0.
bool between(const BigInt& lo_n, const BigInt& lo_d, const BigInt& x, const BigInt& y,
             const BigInt& hi_n, const BigInt& hi_d) {
  return sgn(y) > 0 && lo_n * y <= x * lo_d && x * hi_d <= hi_n * y;
}

std::string rs(const BigInt& a, const BigInt& b, const BigInt& c, const BigInt& d) {
  return "r = (" + a.get_str() + ", " + b.get_str() + ", " + c.get_str() + ", " + d.get_str() + ")";
}

// Orders x1/y1 and x2/y2 (positive denominators) into min and max.
void min_max_fraction(const BigInt& x1, const BigInt& y1, const BigInt& x2, const BigInt& y2,
                      const BigInt*& min_n, const BigInt*& min_d, const BigInt*& max_n,
                      const BigInt*& max_d) {
  if (x1 * y2 <= x2 * y1) {
    min_n = &x1, min_d = &y1, max_n = &x2, max_d = &y2;
  } else {
    min_n = &x2, min_d = &y2, max_n = &x1, max_d = &y1;
  }
}

}  // namespace

double LemmaReport::filter_rate() const {
  const std::uint64_t total = instances + filtered;
  return total == 0 ? 0.0 : static_cast<double>(filtered) / static_cast<double>(total);
}

void LemmaReport::fail(LemmaFailure f) {
  ++failure_count;
  if (failures.size() < kMaxWitnesses) failures.push_back(std::move(f));
}

void LemmaReport::merge(const LemmaReport& other) {
  if (lemma.empty()) lemma = other.lemma;
  instances += other.instances;
  filtered += other.filtered;
  failure_count += other.failure_count;
  for (const LemmaFailure& f : other.failures) {
    if (failures.size() < kMaxWitnesses) failures.push_back(f);
  }
  elapsed_seconds += other.elapsed_seconds;
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

MatrixPopulation::MatrixPopulation(std::uint64_t seed, PopulationKind kind, std::size_t max_len)
    : rng_(seed), kind_(kind), max_len_(max_len) {
  if (max_len_ < 2) throw InvalidSpec("population words need length >= 2");
}

std::pair<std::vector<SeedMatrix>, Word> MatrixPopulation::next_word() {
  if (kind_ == PopulationKind::ABBlocks) {
    Word w;
    const std::uint64_t blocks = uniform(rng_, 1, 3);
    for (std::uint64_t i = 0; i < blocks; ++i) {
      const std::size_t room = max_len_ - w.size();
      if (room < 2) break;
      const std::size_t e = uniform(rng_, 2, std::min<std::size_t>(6, room));
      w.insert(w.end(), e, uniform(rng_, 0, 1));
    }
    return {{seed_a(), seed_b()}, w};
  }
  std::vector<SeedMatrix> seeds;
  const std::uint64_t v = uniform(rng_, 1, 3);
  for (std::uint64_t i = 0; i < v; ++i) {
    const int eps = uniform(rng_, 0, 1) ? 1 : -1;
    const auto shift = static_cast<std::int64_t>(uniform(rng_, 0, 10)) - 5;
    seeds.emplace_back(eps, shift);
  }
  Word w(uniform(rng_, 1, max_len_));
  for (auto& s : w) s = uniform(rng_, 0, v - 1);
  return {seeds, w};
}

IMatrix2 MatrixPopulation::next() {
  auto [seeds, w] = next_word();
  return word_product(seeds, w);
}

LemmaReport verify_lemma_positive(DetPopulation det, std::uint64_t trials, std::uint64_t seed) {
  LemmaReport rep;
  rep.lemma = det == DetPopulation::PlusOne ? "sandwich_closure (det = 1)" : "sandwich_closure (|det| = 1)";
  Stopwatch sw(rep);
  MatrixPopulation pops[] = {MatrixPopulation(seed, PopulationKind::ABBlocks),
                             MatrixPopulation(seed ^ 0x9e3779b97f4a7c15ULL,
                                              PopulationKind::GeneralSeeds)};
  std::mt19937_64 rng(seed + 1);
  const std::uint64_t budget = trials * 200;
  std::uint64_t attempts = 0;
  while (rep.instances < trials && attempts < budget) {
    ++attempts;
    MatrixPopulation& pop = pops[uniform(rng, 0, 1)];
    const IMatrix2 X = pop.next();
    const IMatrix2 Y = pop.next();
    const BigInt dx = X.det(), dy = Y.det();
    const bool det_ok = det == DetPopulation::PlusOne ? (dx == 1 && dy == 1)
                                                      : (abs(dx) == 1 && abs(dy) == 1);
    const BigInt a1 = abs(X.a), b1 = abs(X.b), c1 = abs(X.c), d1 = abs(X.d);
    const BigInt a2 = abs(Y.a), b2 = abs(Y.b), c2 = abs(Y.c), d2 = abs(Y.d);
    if (!det_ok || sgn(c1) == 0 || sgn(d1) == 0 || sgn(b2) == 0 || sgn(d2) == 0 ||
        !(d1 >= c1 && b1 >= a1 && d2 >= b2 && c2 >= a2)) {
      rep.filtered += 2;
      continue;
    }
    const IMatrix2 Z = X * Y;
    const BigInt a3 = abs(Z.a), b3 = abs(Z.b), c3 = abs(Z.c), d3 = abs(Z.d);

    // First half: column ratios of X sandwich the column ratios of XY.
    if (d1 >= 2) {
      const BigInt r2 = big(uniform(rng, 1, BigInt(d1 - 1).get_ui()));
      const BigInt r4 = big(uniform(rng, 1, BigInt(d1 - 1).get_ui()));
      const BigInt *mn, *md, *xn, *xd;
      min_max_fraction(a1, c1, b1, d1, mn, md, xn, xd);
      const BigInt r1 = floor_mul(*mn, *md, r2);
      const BigInt r3 = ceil_mul(*xn, *xd, r4);
      if (r3 > r4) {
        ++rep.filtered;
      } else {
        ++rep.instances;
        if (!between(r1, r2, a3, c3, r3, r4) || !between(r1, r2, b3, d3, r3, r4)) {
          rep.fail({"column ratios of the product leave [r1/r2, r3/r4], " + rs(r1, r2, r3, r4),
                    {{"P", X}, {"Q", Y}, {"PQ", Z}}});
        }
      }
    } else {
      ++rep.filtered;
    }

    // Second half: row ratios of Y sandwich the row ratios of XY.
    if (d2 >= 2) {
      const BigInt r6 = big(uniform(rng, 1, BigInt(d2 - 1).get_ui()));
      const BigInt r8 = big(uniform(rng, 1, BigInt(d2 - 1).get_ui()));
      const BigInt *mn, *md, *xn, *xd;
      min_max_fraction(a2, b2, c2, d2, mn, md, xn, xd);
      const BigInt r5 = floor_mul(*mn, *md, r6);
      const BigInt r7 = ceil_mul(*xn, *xd, r8);
      if (sgn(r5) == 0 || r7 > r8) {
        ++rep.filtered;
      } else {
        ++rep.instances;
        if (!between(r5, r6, a3, b3, r7, r8) || !between(r5, r6, c3, d3, r7, r8)) {
          rep.fail({"row ratios of the product leave [r5/r6, r7/r8], " + rs(r5, r6, r7, r8),
                    {{"P", X}, {"Q", Y}, {"PQ", Z}}});
        }
      }
    } else {
      ++rep.filtered;
    }
  }
  if (rep.instances < trials) {
    rep.notes.push_back("population produced only " + std::to_string(rep.instances) +
                        " admissible instances in " + std::to_string(attempts) + " attempts");
  }
  return rep;
}

LemmaReport verify_lemma_power(const IMatrix2& p, unsigned i_max) {
  LemmaReport rep;
  rep.lemma = "power_monotonicity";
  Stopwatch sw(rep);
  if (!validate_base_product(p).passed) {
    ++rep.filtered;
    return rep;
  }
  ++rep.instances;
  const BigInt ba = abs(p.b) - abs(p.a);
  IMatrix2 prev = p;
  for (unsigned i = 2; i <= i_max; ++i) {
    const IMatrix2 cur = prev * p;
    const BigInt A = abs(cur.a), B = abs(cur.b), C = abs(cur.c), D = abs(cur.d);
    const BigInt pA = abs(prev.a), pB = abs(prev.b), pC = abs(prev.c), pD = abs(prev.d);
    std::string what;
    if (!(D - B >= pD - pB)) what = "|d_i| - |b_i| decreased";
    else if (!(D - C >= pD - pC)) what = "|d_i| - |c_i| decreased";
    else if (!(B - A >= ba * (pB - pA))) what = "|b_i| - |a_i| < (|b| - |a|)(|b_{i-1}| - |a_{i-1}|)";
    else if (!(D > pD)) what = "|d_i| did not increase";
    if (!what.empty()) {
      rep.fail({what + " at i = " + std::to_string(i), {{"P", p}, {"P^(i-1)", prev}, {"P^i", cur}}});
      break;
    }
    prev = cur;
  }
  return rep;
}

LemmaReport verify_lemma_power(std::uint64_t trials, unsigned i_max, std::uint64_t seed) {
  LemmaReport rep;
  rep.lemma = "power_monotonicity";
  MatrixPopulation pops[] = {MatrixPopulation(seed, PopulationKind::ABBlocks),
                             MatrixPopulation(seed ^ 0x5851f42d4c957f2dULL,
                                              PopulationKind::GeneralSeeds)};
  std::mt19937_64 rng(seed + 7);
  const std::uint64_t budget = trials * 200;
  for (std::uint64_t attempts = 0; rep.instances < trials && attempts < budget; ++attempts) {
    rep.merge(verify_lemma_power(pops[uniform(rng, 0, 1)].next(), i_max));
  }
  return rep;
}

LemmaReport verify_samesigns(std::uint64_t trials, std::uint64_t seed) {
  LemmaReport rep;
  rep.lemma = "same_signs";
  Stopwatch sw(rep);
  MatrixPopulation pops[] = {MatrixPopulation(seed, PopulationKind::ABBlocks),
                             MatrixPopulation(seed ^ 0x2545f4914f6cdd1dULL,
                                              PopulationKind::GeneralSeeds)};
  std::mt19937_64 rng(seed + 3);
  const std::uint64_t budget = trials * 200;
  for (std::uint64_t attempts = 0; rep.instances < trials && attempts < budget; ++attempts) {
    const IMatrix2 p = pops[uniform(rng, 0, 1)].next();
    if (sgn(p.a) == 0 || sgn(p.b) == 0 || sgn(p.c) == 0 || sgn(p.d) == 0 || abs(p.det()) != 1) {
      ++rep.filtered;
      continue;
    }
    ++rep.instances;
    if (sgn(p.a) * sgn(p.c) != sgn(p.b) * sgn(p.d)) {
      rep.fail({"sign(a/c) differs from sign(b/d)", {{"P", p}}});
    }
  }
  return rep;
}

LemmaReport verify_entry_divergence(const ProductTower& tower) {
  LemmaReport rep;
  rep.lemma = "entry_divergence";
  Stopwatch sw(rep);
  const int f = tower.first_level();
  const int T = tower.top_exact_level();
  if (T - f + 1 < 6) rep.notes.push_back("fewer than 6 exact levels");
  auto entry = [&](int m) -> const IMatrix2& { return *tower.at(m).exact; };

  int m0 = T + 1;  // |b_m| >= 2 for every exact level from m0 on
  while (m0 - 1 >= f && abs(entry(m0 - 1).b) >= 2) --m0;

  for (int m = f; m + 2 <= T; ++m) {
    ++rep.instances;
    const IMatrix2& p0 = entry(m);
    const IMatrix2& p1 = entry(m + 1);
    const IMatrix2& p2 = entry(m + 2);
    auto witness = [&] {
      return std::vector<std::pair<std::string, IMatrix2>>{
          {"P_" + std::to_string(m), p0}, {"P_" + std::to_string(m + 1), p1},
          {"P_" + std::to_string(m + 2), p2}};
    };
    if (!(abs(p2.d) > abs(p0.d))) {
      rep.fail({"|d_{m+2}| <= |d_m| at m = " + std::to_string(m), witness()});
    }
    if (!(abs(p2.b) >= abs(p1.b))) {
      rep.fail({"|b_{m+2}| < |b_{m+1}| at m = " + std::to_string(m), witness()});
    }
    if (m >= m0) {
      const bool strict = abs(p0.c) > abs(p0.a);
      const bool ok = strict ? abs(p2.a) > abs(p0.a) : abs(p2.a) >= abs(p0.a);
      if (!ok) rep.fail({"|a_{m+2}| failed to grow at m = " + std::to_string(m), witness()});
    }
  }
  return rep;
}

LemmaReport verify_entry_divergence(std::uint64_t trials, std::uint64_t seed) {
  LemmaReport rep;
  rep.lemma = "entry_divergence";
  MatrixPopulation pops[] = {MatrixPopulation(seed, PopulationKind::ABBlocks),
                             MatrixPopulation(seed ^ 0xda942042e4dd58b5ULL,
                                              PopulationKind::GeneralSeeds)};
  std::mt19937_64 rng(seed + 11);
  const std::uint64_t budget = trials * 50;
  for (std::uint64_t attempts = 0; rep.instances < trials && attempts < budget; ++attempts) {
    MatrixPopulation& pop = pops[uniform(rng, 0, 1)];
    auto [seeds, w1] = pop.next_word();
    Word w2;
    if (uniform(rng, 0, 1) == 0) {
      w2 = pop.next_word().second;
    } else {
      // Reuse the seed set so general towers mix two words over one alphabet.
      w2.resize(uniform(rng, 1, 12));
      for (auto& s : w2) s = uniform(rng, 0, seeds.size() - 1);
    }
    std::vector<std::uint64_t> q(5);
    for (auto& x : q) x = uniform(rng, 1, 3);
    try {
      WordSpec spec(seeds, w1, w2, QuotientSource::explicit_terms(q));
      const ProductTower tower = build_tower(spec, 7);
      if (classify_case(tower).kind != GrowthCase::Exponential) {
        ++rep.filtered;
        continue;
      }
      LemmaReport one = verify_entry_divergence(tower);
      one.notes.clear();
      rep.merge(one);
    } catch (const InvalidSpec&) {
      ++rep.filtered;
    }
  }
  return rep;
}

LemmaReport verify_g_bounds(const WordSpec& spec, const ProductTower& tower, std::uint64_t limit) {
  LemmaReport rep;
  rep.lemma = "g_bounds";
  Stopwatch sw(rep);
  const CaseLabel label = classify_case(tower);
  if (label.kind != GrowthCase::Exponential) {
    throw WrongCase("g bounds need an Exponential tower");
  }
  const SandwichConstants& k = *label.constants;
  const int base = std::max(spec.decomposition_base(), k.base_level);
  const std::vector<std::uint64_t> cps = checkpoint_indices(spec, tower, limit, base);
  if (cps.empty()) return rep;

  SymbolStream stream(spec.normalized());
  IMatrix2 q;
  std::size_t next_cp = 0;
  for (std::uint64_t n = 1; n <= cps.back(); ++n) {
    right_multiply(q, spec.seeds()[stream.next()]);
    if (n != cps[next_cp]) continue;
    ++next_cp;
    ++rep.instances;
    const Decomposition d = decompose_prefix(spec, n, tower, base);
    std::uint64_t e = d.factors.size();
    double log_prod = 0;
    for (const auto& fct : d.factors) {
      e += fct.exponent;
      log_prod += static_cast<double>(fct.exponent) * tower.at(fct.level).log_abs_c();
    }
    const double ed = static_cast<double>(e);
    const double lg = log_abs(q.c);
    const double lower = ed * k.log_t1 + log_prod;
    const double upper = ed * k.log_t2 + log_prod;

    auto exact_product = [&] {
      BigInt prod(1), t;
      for (const auto& fct : d.factors) {
        mpz_pow_ui(t.get_mpz_t(), BigInt(abs(tower.at(fct.level).exact->c)).get_mpz_t(),
                   fct.exponent);
        prod *= t;
      }
      return prod;
    };
    auto power = [](const BigInt& b, std::uint64_t ex) {
      BigInt r;
      mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), ex);
      return r;
    };
    bool ok_low = lg - lower > kTieMargin;
    bool ok_high = upper - lg > kTieMargin;
    if (!ok_low || !ok_high) {
      const BigInt prod = exact_product();
      const BigInt g = abs(q.c);
      // (r4 - r3)^e prod <= (r3 r4)^e |g|
      ok_low = power(BigInt(k.r4 - k.r3), e) * prod <= power(BigInt(k.r3 * k.r4), e) * g;
      // (r1 r4)^e |g| <= (r2 r4 + r1 r3)^e prod
      ok_high = power(BigInt(k.r1 * k.r4), e) * g <= power(BigInt(k.r2 * k.r4 + k.r1 * k.r3), e) * prod;
    }
    if (!ok_low || !ok_high) {
      rep.fail({std::string(ok_low ? "upper" : "lower") + " bound fails at n = " +
                    std::to_string(n),
                {{"Q_n", q}}});
    }
  }
  return rep;
}

LemmaReport verify_linear_growth(const WordSpec& spec, const ProductTower& tower,
                                 std::uint64_t N) {
  LemmaReport rep;
  rep.lemma = "linear_growth";
  Stopwatch sw(rep);
  const LinearBound lb = linear_bound_constant(tower, spec);
  const std::vector<std::uint64_t> cps = checkpoint_indices(spec, tower, N);
  SymbolStream stream(spec.normalized());
  IMatrix2 q;
  std::size_t next_cp = 0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    right_multiply(q, spec.seeds()[stream.next()]);
    const BigInt bound = lb.D * big(n);
    ++rep.instances;
    if (!(q.max_abs_entry() < bound)) {
      rep.fail({"entry of Q_n reaches D n at n = " + std::to_string(n), {{"Q_n", q}}});
    }
    if (next_cp < cps.size() && cps[next_cp] == n) {
      ++next_cp;
      ++rep.instances;
      if (abs(q.c) > lb.C * big(n)) {
        rep.fail({"|g_n| > n max(|c_1|, |c_2|) at checkpoint n = " + std::to_string(n),
                  {{"Q_n", q}}});
      }
    }
  }
  return rep;
}

LemmaReport verify_decomposition(const WordSpec& spec, const ProductTower& tower,
                                 std::uint64_t trials, std::uint64_t seed, std::uint64_t n_max) {
  LemmaReport rep;
  rep.lemma = "decomposition";
  Stopwatch sw(rep);
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> ns(trials);
  for (auto& n : ns) n = uniform(rng, 1, n_max);
  std::sort(ns.begin(), ns.end());
  if (ns.empty()) return rep;

  const int base = spec.decomposition_base();
  const std::uint64_t kb = std::min(tower.at(base).length, ns.back() + 1);
  std::vector<IMatrix2> short_prefix{IMatrix2::identity()};
  SymbolStream stream(spec.normalized());
  IMatrix2 q;
  std::size_t idx = 0;
  for (std::uint64_t n = 1; n <= ns.back(); ++n) {
    right_multiply(q, spec.seeds()[stream.next()]);
    if (n < kb) short_prefix.push_back(q);
    for (; idx < ns.size() && ns[idx] == n; ++idx) {
      ++rep.instances;
      const Decomposition d = decompose_prefix(spec, n, tower);
      std::string what;
      std::uint64_t total = d.remainder_len;
      for (std::size_t i = 0; i < d.factors.size() && what.empty(); ++i) {
        const auto& f = d.factors[i];
        const std::uint64_t qm = tower.quotient(f.level - 1);
        total += f.exponent * tower.at(f.level).length;
        if (f.exponent == 0 || f.exponent > qm) what = "exponent outside [1, q_{m-1}]";
        if (i > 0 && f.level <= d.factors[i - 1].level) what = "levels not increasing";
        if (i > 0 && f.exponent == qm && d.factors[i - 1].level + 2 > f.level) {
          what = "full power without a level gap";
        }
      }
      if (what.empty() && total != n) what = "lengths do not sum to n";
      if (what.empty() && d.remainder_len >= kb) what = "remainder not shorter than k_base";
      if (what.empty() && !(recompose(d, tower) * short_prefix[d.remainder_len] == q)) {
        what = "recomposed product differs from Q_n";
      }
      if (!what.empty()) {
        rep.fail({what + " at n = " + std::to_string(n), {{"Q_n", q}}});
      }
    }
  }
  return rep;
}

}  // namespace rfib
