#include "rfib/sequence_engine.hpp"

#include <cmath>
#include <sstream>

#include "rfib/errors.hpp"

namespace rfib {

InitialPair InitialPair::exact(Rational g1, Rational g2) {
  g1.canonicalize();
  g2.canonicalize();
  return {std::move(g1), std::move(g2), false};
}

InitialPair InitialPair::floating(double g1, double g2) {
  if (!std::isfinite(g1) || !std::isfinite(g2)) throw InvalidSpec("initial values must be finite");
  return {Rational(g1), Rational(g2), true};
}

BigInt common_denominator(const InitialPair& init) {
  BigInt l;
  mpz_lcm(l.get_mpz_t(), init.g1.get_den_mpz_t(), init.g2.get_den_mpz_t());
  return l;
}

void for_each_term(const WordSpec& spec, const InitialPair& init, std::uint64_t N,
                   const std::function<bool(std::uint64_t, const BigInt&, const BigInt&)>& visit) {
  const BigInt den = common_denominator(init);
  BigInt x = init.g1.get_num() * (den / init.g1.get_den());
  BigInt y = init.g2.get_num() * (den / init.g2.get_den());
  SymbolStream stream(spec.normalized());
  const auto& seeds = spec.seeds();
  BigInt next;
  for (std::uint64_t n = 3; n <= N + 2; ++n) {
    const SeedMatrix& s = seeds[stream.next()];
    // (x, y) -> (y, eps x + shift y)
    next = y * static_cast<long>(s.shift);
    if (s.epsilon > 0) {
      next += x;
    } else {
      next -= x;
    }
    x.swap(y);
    y.swap(next);
    if (!visit(n, x, y)) return;
  }
}

Rational SequenceRun::term(std::uint64_t n) const {
  if (n < 1 || n > N + 2) throw std::out_of_range("term index out of range");
  const BigInt* num = nullptr;
  if (n >= N + 1) {
    num = &last[n - N - 1];
  } else if (has_terms()) {
    num = &numerators[n - 1];
  } else {
    throw std::out_of_range("term " + std::to_string(n) + " was not stored");
  }
  Rational r(*num, denominator);
  r.canonicalize();
  return r;
}

SequenceRun generate_sequence(const WordSpec& spec, const InitialPair& init, std::uint64_t N,
                              const SequenceOptions& opt) {
  if (N < 1) throw InvalidSpec("sequence length must be at least 1");
  SequenceRun run;
  run.N = N;
  run.approximate = init.approximate;
  run.all_zero = init.all_zero();
  run.denominator = common_denominator(init);
  const BigInt n1 = init.g1.get_num() * (run.denominator / init.g1.get_den());
  const BigInt n2 = init.g2.get_num() * (run.denominator / init.g2.get_den());
  run.log_abs.reserve(N + 2);
  const double log_den = log_abs(run.denominator);
  run.log_abs.push_back(log_abs(n1) - log_den);
  run.log_abs.push_back(log_abs(n2) - log_den);
  if (opt.store_terms) {
    run.numerators.reserve(N + 2);
    run.numerators.push_back(n1);
    run.numerators.push_back(n2);
  }
  run.last[0] = n1;
  run.last[1] = n2;
  for_each_term(spec, init, N, [&](std::uint64_t, const BigInt& prev, const BigInt& cur) {
    run.log_abs.push_back(log_abs(cur) - log_den);
    if (opt.store_terms) run.numerators.push_back(cur);
    if (run.log_abs.size() == N + 2) {
      run.last[0] = prev;
      run.last[1] = cur;
    }
    return true;
  });
  return run;
}

RootGrowth root_growth(const SequenceRun& run, std::uint64_t stride) {
  if (stride == 0) throw InvalidSpec("stride must be positive");
  RootGrowth g;
  for (std::uint64_t n = stride; n <= run.size(); n += stride) {
    const double l = run.log_abs_term(n);
    if (std::isinf(l) && l < 0) {
      ++g.skipped_zeros;
      continue;
    }
    g.samples.push_back({n, std::exp(l / static_cast<double>(n))});
  }
  return g;
}

DegenerateStatus degenerate_check(const InitialPair& init, long double M, double err_M,
                                  double tol) {
  DegenerateStatus st;
  if (!init.approximate) {
    st.note = "rational initial values; the ratio limit is irrational so G_1 != -G_2/M";
    return st;
  }
  const long double g1 = to_long_double(init.g1);
  const long double g2 = to_long_double(init.g2);
  const long double gap = std::fabs(g1 * M + g2);
  const long double bound = static_cast<long double>(tol) + std::fabs(g1) * err_M;
  if (gap <= bound) {
    st.warning = true;
    std::ostringstream os;
    os << "|G_1 M + G_2| = " << static_cast<double>(gap) << " is within "
       << static_cast<double>(bound) << " of the degenerate line G_1 = -G_2/M";
    st.note = os.str();
  } else {
    st.note = "approximate initial values clear the degenerate line";
  }
  return st;
}

std::vector<CheckpointRatio> checkpoint_ratios(const WordSpec& spec, const InitialPair& init,
                                               const ProductTower& tower, std::uint64_t limit) {
  const std::vector<std::uint64_t> cps = checkpoint_indices(spec, tower, limit);
  std::vector<CheckpointRatio> out;
  if (cps.empty()) return out;
  const BigInt den = common_denominator(init);
  const BigInt n1 = init.g1.get_num() * (den / init.g1.get_den());
  const BigInt n2 = init.g2.get_num() * (den / init.g2.get_den());
  SymbolStream stream(spec.normalized());
  IMatrix2 q;
  std::size_t next_cp = 0;
  for (std::uint64_t n = 1; n <= cps.back(); ++n) {
    right_multiply(q, spec.seeds()[stream.next()]);
    if (n != cps[next_cp]) continue;
    ++next_cp;
    const BigInt g_next = n1 * q.a + n2 * q.c;  // G_{n+1} numerator
    const BigInt g_after = n1 * q.b + n2 * q.d;  // G_{n+2} numerator
    if (sgn(g_after) == 0) {
      throw Error("G_" + std::to_string(n + 2) + " is zero at checkpoint " + std::to_string(n));
    }
    if (sgn(q.c) == 0) throw Error("g_n is zero at checkpoint " + std::to_string(n));
    out.push_back({n, ratio_ld(g_next, g_after), ratio_ld(q.a, q.c)});
  }
  return out;
}

}  // namespace rfib
