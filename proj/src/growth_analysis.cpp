#include "rfib/growth_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rfib/errors.hpp"

namespace rfib {

namespace {

constexpr double kPhi = std::numbers::phi;

struct Abs4 {
  BigInt a, b, c, d;
  explicit Abs4(const IMatrix2& p) : a(abs(p.a)), b(abs(p.b)), c(abs(p.c)), d(abs(p.d)) {}
};


}  // namespace

bool is_degenerate_pattern(const IMatrix2& p) {
  Abs4 m(p);
  return m.b == m.c && m.c == m.d - 1 && m.d - 1 == m.a + 1;
}

bool within_sandwich(const IMatrix2& p, const SandwichConstants& k) {
  Abs4 m(p);
  const std::pair<const BigInt*, const BigInt*> ratios[] = {
      {&m.a, &m.c}, {&m.b, &m.d}, {&m.a, &m.b}, {&m.c, &m.d}};
  for (auto [x, y] : ratios) {
    if (sgn(*y) == 0) return false;
    if (k.r2 * *x < k.r1 * *y) return false;
    if (k.r4 * *x > k.r3 * *y) return false;
  }
  return true;
}

std::optional<SandwichConstants> find_sandwich(const IMatrix2& p, int level) {
  Abs4 m(p);
  if (sgn(m.a) == 0 || sgn(m.b) == 0 || sgn(m.c) == 0 || sgn(m.d) == 0) return std::nullopt;
  if (!(m.a < m.c && m.c < m.d && m.a < m.b && m.b < m.d)) return std::nullopt;

  SandwichConstants k;
  k.base_level = level;
  k.r1 = 1;
  k.r2 = m.d - 1;
  const BigInt n1 = m.c - 1, d1 = m.c;
  const BigInt n2 = m.d - 2, d2 = m.d - 1;
  if (n1 * d2 >= n2 * d1) {
    k.r3 = n1;
    k.r4 = d1;
  } else {
    k.r3 = n2;
    k.r4 = d2;
  }
  if (sgn(k.r3) <= 0 || !(k.r1 < k.r2) || !(k.r3 < k.r4) || !(m.d > k.r2) || !(m.d > k.r4)) {
    return std::nullopt;
  }
  if (!within_sandwich(p, k)) return std::nullopt;

  k.log_t1 = log_abs(BigInt(k.r4 - k.r3)) - log_abs(k.r3) - log_abs(k.r4);
  k.log_t2 = log_abs(BigInt(k.r2 * k.r4 + k.r1 * k.r3)) - log_abs(k.r1) - log_abs(k.r4);
  k.log_t = std::max(k.log_t2, -k.log_t1);
  k.t1 = std::exp(k.log_t1);
  k.t2 = std::exp(k.log_t2);
  k.t = std::exp(k.log_t);
  return k;
}

std::optional<SandwichConstants> find_sandwich(const ProductTower& tower, int m) {
  const TowerLevel& l = tower.at(m);
  if (!l.exact) return std::nullopt;
  return find_sandwich(*l.exact, m);
}

std::string to_string(GrowthCase c) {
  switch (c) {
    case GrowthCase::Linear: return "Linear";
    case GrowthCase::Exponential: return "Exponential";
    case GrowthCase::Undetermined: return "Undetermined";
  }
  return "?";
}

CaseLabel classify_case(const ProductTower& tower, int horizon) {
  CaseLabel label;
  const int first = tower.first_level();
  const int top = std::min(horizon, tower.top_exact_level());
  bool all_degenerate = true;
  for (int m = first + 1; m <= top; ++m) {
    if (auto k = find_sandwich(tower, m)) {
      label.kind = GrowthCase::Exponential;
      label.constants = k;
      label.horizon = m;
      return label;
    }
    if (!is_degenerate_pattern(*tower.at(m).exact)) all_degenerate = false;
  }
  label.horizon = top;
  if (all_degenerate && top >= horizon && top >= first + 2) label.kind = GrowthCase::Linear;
  return label;
}

const TraceLevel& GrowthTrace::at(int m) const {
  if (levels.empty() || m < first_level() || m > top_level()) {
    throw InsufficientHorizon("trace has no level " + std::to_string(m));
  }
  return levels[static_cast<std::size_t>(m - first_level())];
}

GrowthTrace growth_trace(const ProductTower& tower) {
  GrowthTrace t;
  for (const TowerLevel& l : tower.levels()) {
    TraceLevel tl;
    tl.level = l.level;
    tl.length = l.length;
    tl.log_abs_c = l.log_abs_c();
    tl.s = tl.log_abs_c / static_cast<double>(l.length);
    tl.exact = l.is_exact();
    tl.ratio_ac = l.exact ? ratio_ld(l.exact->a, l.exact->c) : l.approx.ratio(0, 2);
    t.levels.push_back(tl);
  }
  return t;
}

double growth_error_envelope(double ds, double log_t, int m) {
  return std::fabs(ds) +
         (2.0 / (2.0 - kPhi)) * log_t / (std::pow(kPhi, m - 1) * (kPhi - 1.0));
}

double growth_error_envelope(const GrowthTrace& trace, double log_t, int m) {
  const double ds = trace.at(m).s - trace.at(m - 1).s;
  return growth_error_envelope(ds, log_t, m - trace.first_level() + 1);
}

GrowthEstimate growth_exponent(const ProductTower& tower, const SandwichConstants& k) {
  const int H = tower.top_level();
  if (H < k.base_level + 3) {
    throw InsufficientHorizon("growth exponent needs levels up to " +
                              std::to_string(k.base_level + 3) + ", tower stops at " +
                              std::to_string(H));
  }
  GrowthEstimate g;
  g.trace = growth_trace(tower);
  g.level = H;
  g.s = g.trace.at(H).s;
  g.err_s = growth_error_envelope(g.trace, k.log_t, H);
  g.L = std::exp(g.s);
  g.err_L = g.L * std::expm1(g.err_s);
  g.certified = g.s - g.err_s > 0;
  return g;
}

RatioEstimate ratio_limit(const ProductTower& tower, const SandwichConstants& k) {
  const int H = tower.top_exact_level();
  if (H < k.base_level + 2) {
    throw InsufficientHorizon("ratio limit needs exact levels up to " +
                              std::to_string(k.base_level + 2));
  }
  RatioEstimate r;
  r.level = H;
  const IMatrix2& p = *tower.at(H).exact;
  r.M = ratio_ld(p.a, p.c);

  GrowthTrace trace = growth_trace(tower);
  r.log_L_prime = std::numeric_limits<double>::infinity();
  for (const TraceLevel& l : trace.levels) {
    if (l.level >= k.base_level + 2) r.log_L_prime = std::min(r.log_L_prime, l.s);
  }
  r.certified = std::isfinite(r.log_L_prime) && r.log_L_prime > 0;
  if (!r.certified) {
    r.err_M = std::numeric_limits<double>::infinity();
    r.log10_err_M = std::numeric_limits<double>::infinity();
    return r;
  }
  const double kH = static_cast<double>(tower.at(H).length);
  r.log10_err_M = (std::log(2.0) - k.log_t1 - 2.0 * kH * r.log_L_prime) / std::numbers::ln10;
  r.err_M = std::pow(10.0, r.log10_err_M);
  return r;
}

std::vector<IdentityCheck> ratio_step_identities(const ProductTower& tower) {
  std::vector<IdentityCheck> out;
  const int first = tower.first_level();
  for (int m = first + 2; m <= tower.top_exact_level(); ++m) {
    const IMatrix2& pm = *tower.at(m).exact;
    const IMatrix2& p1 = *tower.at(m - 1).exact;
    const IMatrix2& p2 = *tower.at(m - 2).exact;
    const IMatrix2 x = mat_pow(p1, tower.quotient(m - 2) - 1) * p2;
    const BigInt lhs = abs(BigInt(pm.a * p1.c - p1.a * pm.c));
    IdentityCheck c;
    c.level = m;
    c.holds = lhs == abs(x.c);
    if (!c.holds) c.detail = "lhs " + render(lhs) + " vs |c'| " + render(BigInt(abs(x.c)));
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

constexpr double kTieMargin = 1e-6;

// Sign of rhs - lhs for lhs = (num_l)^q * A^q * B and rhs = (num_r)^q * C, all positive.
int compare_exact(const BigInt& num_l, const BigInt& a, const BigInt& b, const BigInt& num_r,
                  const BigInt& c, std::uint64_t q) {
  BigInt lhs, rhs, t;
  mpz_pow_ui(lhs.get_mpz_t(), BigInt(num_l * a).get_mpz_t(), q);
  lhs *= b;
  mpz_pow_ui(t.get_mpz_t(), num_r.get_mpz_t(), q);
  rhs = t * c;
  return cmp(rhs, lhs) > 0 ? 1 : (cmp(rhs, lhs) < 0 ? -1 : 0);
}

}  // namespace

BoundsReport c_bounds_check(const ProductTower& tower, const SandwichConstants& k) {
  BoundsReport rep;
  for (int m = k.base_level + 2; m <= tower.top_level(); ++m) {
    const TowerLevel& l0 = tower.at(m - 2);
    const TowerLevel& l1 = tower.at(m - 1);
    const TowerLevel& l2 = tower.at(m);
    const std::uint64_t q = tower.quotient(m - 2);
    const double u0 = l0.log_abs_c(), u1 = l1.log_abs_c(), u = l2.log_abs_c();
    const double qd = static_cast<double>(q);
    const double lower = qd * (k.log_t1 + u1) + u0;
    const double upper = qd * (k.log_t2 + u1) + u0;
    const double margin = kTieMargin * std::max(1.0, std::fabs(u));
    const bool exact = l0.exact && l1.exact && l2.exact;
    ++rep.levels_checked;

    auto decide = [&](double gap, bool lower_side) {
      if (gap > margin) return true;
      if (gap < -margin && !exact) return false;
      if (!exact) return true;
      ++rep.exact_fallbacks;
      const BigInt c0 = abs(l0.exact->c), c1 = abs(l1.exact->c), c2 = abs(l2.exact->c);
      if (lower_side) {
        // (r4 - r3)^q |c1|^q |c0| <= (r3 r4)^q |c2|
        return compare_exact(BigInt(k.r4 - k.r3), c1, c0, BigInt(k.r3 * k.r4), c2, q) >= 0;
      }
      // (r1 r4)^q |c2| <= (r2 r4 + r1 r3)^q |c1|^q |c0|
      return compare_exact(BigInt(k.r2 * k.r4 + k.r1 * k.r3), c1, c0, BigInt(k.r1 * k.r4), c2,
                           q) <= 0;
    };

    if (!decide(u - lower, true)) {
      rep.violations.push_back({m, "log|c_m| = " + std::to_string(u) + " below lower bound " +
                                       std::to_string(lower)});
    }
    if (!decide(upper - u, false)) {
      rep.violations.push_back({m, "log|c_m| = " + std::to_string(u) + " above upper bound " +
                                       std::to_string(upper)});
    }
  }
  return rep;
}

BoundsReport envelope_inequality(const GrowthTrace& trace, const SandwichConstants& k) {
  BoundsReport rep;
  for (int m = std::max(k.base_level + 2, trace.first_level() + 1); m + 1 <= trace.top_level();
       ++m) {
    const TraceLevel& prev = trace.at(m - 1);
    const TraceLevel& cur = trace.at(m);
    const TraceLevel& next = trace.at(m + 1);
    const double lhs = std::fabs(next.s - cur.s);
    const double rhs = std::fabs(cur.s - prev.s) / 2.0 + k.log_t / static_cast<double>(cur.length);
    ++rep.levels_checked;
    if (lhs > rhs + 1e-12) {
      rep.violations.push_back({m, "|s_{m+1} - s_m| = " + std::to_string(lhs) + " > " +
                                       std::to_string(rhs)});
    }
  }
  return rep;
}

LinearBound linear_bound_constant(const ProductTower& tower, const WordSpec& spec, int horizon) {
  if (tower.first_level() != spec.first_level()) {
    throw InvalidSpec("tower and spec use different level labels");
  }
  const CaseLabel label = classify_case(tower, horizon);
  if (label.kind != GrowthCase::Linear) {
    throw WrongCase("linear bound requested for a " + to_string(label.kind) + " spec");
  }
  const int f = tower.first_level();
  LinearBound lb;
  lb.C = std::max(BigInt(abs(tower.at(f).exact->c)), BigInt(abs(tower.at(f + 1).exact->c)));
  IMatrix2 m;
  lb.M_hat = 0;
  for (std::size_t i : spec.p2_word()) {
    right_multiply(m, spec.seeds()[i]);
    lb.M_hat = std::max(lb.M_hat, m.max_abs_entry());
  }
  const BigInt k2 = big(spec.p2_word().size());
  lb.D = 2 * lb.M_hat * lb.C + 2 * lb.M_hat * lb.C * k2 + 2 * lb.M_hat;
  return lb;
}

double m_prime(const WordSpec& spec, const ProductTower& tower, long double M) {
  const std::uint64_t kb = tower.at(spec.decomposition_base()).length;
  if (kb > 1'000'000) throw Error("base level too long for M' enumeration");
  SymbolStream s(spec.normalized());
  IMatrix2 p;
  long double best = std::numeric_limits<long double>::infinity();
  auto column = [&](const BigInt& c1, const BigInt& c2) {
    const long double v = std::fabs(M * c1.get_d() + c2.get_d());
    best = std::min(best, v);
  };
  for (std::uint64_t len = 0; len < kb; ++len) {
    if (len > 0) right_multiply(p, spec.seeds()[s.next()]);
    column(p.a, p.c);
    column(p.b, p.d);
  }
  return static_cast<double>(best);
}

int usable_horizon(const WordSpec& spec, int requested) {
  const int f = spec.first_level();
  std::uint64_t k0 = spec.p1_word().size(), k1 = spec.p2_word().size();
  int m = f + 1;
  while (m < requested) {
    auto q = spec.quotients().at(static_cast<std::size_t>(m - 1));
    if (!q) break;
    std::uint64_t prod = 0, sum = 0;
    if (__builtin_mul_overflow(*q, k1, &prod) || __builtin_add_overflow(prod, k0, &sum)) break;
    k0 = k1;
    k1 = sum;
    ++m;
  }
  return m;
}

GrowthCase GrowthReport::outcome() const {
  if (label.kind == GrowthCase::Exponential) {
    if (growth && growth->certified && ratio && ratio->certified) return GrowthCase::Exponential;
    return GrowthCase::Undetermined;
  }
  return label.kind;
}

GrowthReport analyze(const WordSpec& spec, const AnalyzeOptions& opt) {
  GrowthReport rep;
  const int H = usable_horizon(spec, opt.levels);
  if (H < opt.levels) {
    rep.notes.push_back("horizon limited to level " + std::to_string(H) +
                        " by quotient availability or 64-bit lengths");
  }
  const ProductTower tower = build_tower(spec, H, opt.digit_cap);
  rep.levels_used = tower.top_level();
  rep.top_exact_level = tower.top_exact_level();
  rep.log_domain = tower.top_level() > tower.top_exact_level();
  rep.exact_log_agreement = tower.exact_log_agreement();
  rep.label = classify_case(tower, opt.classify_horizon);

  if (rep.label.kind == GrowthCase::Exponential) {
    const SandwichConstants& k = *rep.label.constants;
    try {
      rep.growth = growth_exponent(tower, k);
      if (!rep.growth->certified) rep.notes.push_back("growth envelope does not exclude L <= 1");
    } catch (const InsufficientHorizon& e) {
      rep.notes.push_back(e.what());
    }
    try {
      rep.ratio = ratio_limit(tower, k);
      if (!rep.ratio->certified) rep.notes.push_back("L' <= 1; ratio tail bound unavailable");
    } catch (const InsufficientHorizon& e) {
      rep.notes.push_back(e.what());
    }
  } else if (rep.label.kind == GrowthCase::Linear) {
    rep.linear = linear_bound_constant(tower, spec, opt.classify_horizon);
  }
  return rep;
}

}  // namespace rfib
