// Acceptance suite: one PASS/FAIL line per criterion. `--criterion N` runs a
// single criterion; the exit status is nonzero when any selected one fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "../support/oracles.hpp"
#include "../support/specs.hpp"
#include "CLI11.hpp"
#include "rfib/cli.hpp"
#include "rfib/growth_analysis.hpp"
#include "rfib/oracle_verify.hpp"
#include "rfib/sequence_engine.hpp"

using namespace rfib;
using testspec::A;
using testspec::B;

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

struct NamedSpec {
  std::string name;
  WordSpec spec;
};

std::vector<NamedSpec> exponential_matrix() {
  const auto pi = [] { return QuotientSource::explicit_terms(testspec::one_over_pi_terms()); };
  return {
      {"one_over_pi", testspec::pi_spec()},
      {"golden_ab", testspec::golden_ab_spec()},
      {"fibonacci", testspec::fibonacci_spec()},
      {"fibonacci_pi", testspec::fibonacci_spec(pi())},
      {"fibonacci_q3", testspec::fibonacci_spec(QuotientSource::constant(3))},
      {"a3_b2_q2", ab_block_spec({A(3)}, {B(2)}, QuotientSource::constant(2))},
      {"a2_b3_pi", ab_block_spec({A(2)}, {B(3)}, pi())},
      {"a2b2_a4_q1", ab_block_spec({A(2), B(2)}, {A(4)}, QuotientSource::constant(1))},
  };
}

std::vector<Rational> expected_pi_terms() { return {0, 1, -1, 2, -3, 5, 2, 7, -5, 12}; }

// 1. The worked example's first terms.
void criterion1(Outcome& o) {
  const SequenceRun run = generate_sequence(testspec::pi_spec(), InitialPair::exact(1, 1), 10, {true});
  const auto expect = expected_pi_terms();
  o.detail << "G_3..G_12 =";
  bool all = true;
  for (std::size_t i = 0; i < expect.size(); ++i) {
    o.detail << ' ' << run.term(i + 3).get_str();
    all = all && run.term(i + 3) == expect[i];
  }
  o.require(all, "terms differ from 0 1 -1 2 -3 5 2 7 -5 12");
}

// 2. P_3, P_4 and the first ten stream symbols.
void criterion2(Outcome& o) {
  const ProductTower t = build_tower(testspec::pi_spec(), 4);
  const IMatrix2 a = seed_to_matrix(seed_a()), b = seed_to_matrix(seed_b());
  const IMatrix2 p3 = mat_pow(b, 6) * mat_pow(a, 2);
  const IMatrix2 p4 = mat_pow(p3, 7) * mat_pow(b, 2);
  o.require(*t.at(3).exact == p3 && t.at(3).length == 8, "P_3 != B^6 A^2");
  o.require(*t.at(4).exact == p4 && t.at(4).length == 58, "P_4 != (B^6 A^2)^7 B^2");
  const Word w = stream_prefix(testspec::pi_spec(), 10);
  std::string signs;
  for (std::size_t s : w) signs += s == 0 ? '+' : '-';
  o.require(signs == "------++--", "sign pattern " + signs);
  o.detail << "P_3 = " << p3.str() << ", k_4 = " << t.at(4).length << ", signs " << signs;
}

// 3. Linear case identities.
void criterion3(Outcome& o) {
  const WordSpec spec = testspec::a3b3_spec();
  int bad = 0;
  for (long k = 1; k <= 100; ++k) {
    IMatrix2 expect = IMatrix2::of(4 * k, 1, 4 * k + 1, 1);
    if (k % 2) expect = -expect;
    if (!(prefix_product(spec, static_cast<std::uint64_t>(6 * k + 1)) == expect)) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " of Q_{6k+1} differ");
  std::mt19937_64 rng(2024);
  int bad_terms = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto draw = [&] {
      const long num = static_cast<long>(rng() % 2001) - 1000;
      const long den = 1 + static_cast<long>(rng() % 97);
      Rational r(num, den);
      r.canonicalize();
      return r;
    };
    const InitialPair init = InitialPair::exact(draw(), draw());
    const SequenceRun run = generate_sequence(spec, init, 6 * 100 + 3, {true});
    const Rational target = abs(init.g1 + init.g2);
    for (std::uint64_t k = 1; k <= 100; ++k) {
      if (abs(run.term(6 * k + 3)) != target) ++bad_terms;
    }
  }
  o.require(bad_terms == 0, std::to_string(bad_terms) + " returns differ from |G_1 + G_2|");
  o.detail << "Q_{6k+1} for k <= 100, |G_{6k+3}| over 20 random rational pairs";
}

// 4. Closed forms of the seed powers.
void criterion4(Outcome& o) {
  int bad = 0;
  for (unsigned n = 1; n <= 200; ++n) {
    if (!(fibonacci_power_form(PowerKind::ALike, n) == mat_pow(seed_to_matrix(seed_a()), n))) ++bad;
    if (!(fibonacci_power_form(PowerKind::BLike, n) == mat_pow(seed_to_matrix(seed_b()), n))) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " mismatches");
  o.detail << "A^n and B^n for n = 1..200";
}

// 5. Lemma oracle suite.
void criterion5(Outcome& o) {
  const std::uint64_t trials = 10000;
  std::vector<LemmaReport> reports;
  reports.push_back(verify_lemma_positive(DetPopulation::PlusOne, trials, 11));
  reports.push_back(verify_lemma_positive(DetPopulation::AbsOne, trials, 12));
  reports.push_back(verify_lemma_power(trials, 12, 13));
  reports.push_back(verify_samesigns(trials, 14));

  LemmaReport div = verify_entry_divergence(trials, 15);
  LemmaReport gb;
  gb.lemma = "g_bounds";
  for (const NamedSpec& s : exponential_matrix()) {
    const ProductTower t = build_tower(s.spec, usable_horizon(s.spec, 30), 20000);
    div.merge(verify_entry_divergence(t));
    gb.merge(verify_g_bounds(s.spec, t, 10000));
  }
  reports.push_back(div);
  reports.push_back(gb);

  LemmaReport lin = verify_linear_growth(testspec::a3b3_spec(), build_tower(testspec::a3b3_spec(), 30), 10000);
  lin.merge(verify_linear_growth(testspec::alternate_linear_spec(),
                                 build_tower(testspec::alternate_linear_spec(), 30), 10000));
  reports.push_back(lin);

  LemmaReport dec = verify_decomposition(testspec::pi_spec(), build_tower(testspec::pi_spec(), 24, 20000),
                                         trials, 16);
  reports.push_back(dec);

  for (const LemmaReport& r : reports) {
    o.detail << "\n    " << r.lemma << ": " << r.instances << " instances, " << r.failure_count
             << " failures, filter " << std::fixed << std::setprecision(1) << 100 * r.filter_rate()
             << "%";
    o.require(r.passed(), r.lemma + " has failures");
    o.require(r.instances >= trials, r.lemma + " below 10^4 instances");
    o.require(r.filter_rate() < 0.9, r.lemma + " filter rate >= 90%");
  }
}

// 6. Identical A^2 bases give Fibonacci growth.
void criterion6(Outcome& o) {
  const std::vector<std::pair<std::string, QuotientSource>> schedules{
      {"ones", QuotientSource::constant(1)},
      {"one_over_pi", QuotientSource::explicit_terms(testspec::one_over_pi_terms())},
      {"threes", QuotientSource::constant(3)},
      {"mixed", QuotientSource::explicit_terms({5, 1, 2, 9, 1, 1, 4, 2, 7, 3, 1, 1, 2, 2, 8, 1})}};
  for (const auto& [name, q] : schedules) {
    const GrowthReport r = analyze(testspec::fibonacci_spec(q));
    const bool ok = r.growth && r.ratio && std::fabs(r.growth->L - kPhi) <= 1e-6 &&
                    std::fabs(static_cast<double>(r.ratio->M) - 1.0 / kPhi) <= 1e-6;
    o.require(ok, name);
    if (r.growth && r.ratio) {
      o.detail << name << ": |L - phi| = " << std::scientific << std::setprecision(2)
               << std::fabs(r.growth->L - kPhi) << ", |M - 1/phi| = "
               << std::fabs(static_cast<double>(r.ratio->M) - 1.0 / kPhi) << "; ";
    }
  }
}

// 7. Per-level envelope inequality on every Exponential run.
void criterion7(Outcome& o) {
  int levels = 0;
  for (const NamedSpec& s : exponential_matrix()) {
    const ProductTower t = build_tower(s.spec, usable_horizon(s.spec, 40));
    const CaseLabel c = classify_case(t);
    if (c.kind != GrowthCase::Exponential) {
      o.require(false, s.name + " not Exponential");
      continue;
    }
    const BoundsReport r = envelope_inequality(growth_trace(t), *c.constants);
    levels += r.levels_checked;
    o.require(r.passed(), s.name + (r.violations.empty() ? "" : ": " + r.violations.front().detail));
  }
  o.detail << levels << " levels over " << exponential_matrix().size() << " specs";
}

// 8. Sequence, analysis, and oracle agree on the 1/pi spec.
void criterion8(Outcome& o) {
  const WordSpec spec = testspec::pi_spec();
  const GrowthReport rep = analyze(spec);
  if (!rep.growth || !rep.ratio) {
    o.require(false, "analysis produced no L/M");
    return;
  }
  const double L = rep.growth->L, err_L = rep.growth->err_L;
  const SequenceRun run = generate_sequence(spec, InitialPair::exact(1, 1), 8000);
  o.detail << std::setprecision(10) << "L = " << L << " +- " << err_L << "; roots";
  for (std::uint64_t n : {2000u, 4000u, 8000u}) {
    const double root = std::exp(run.log_abs_term(n) / static_cast<double>(n));
    o.detail << ' ' << root;
    o.require(std::fabs(root - L) <= err_L + 0.01, "root at n = " + std::to_string(n));
  }

  const std::size_t n = 1000000;
  const std::string w = oracle::limit_prefix("aa", "bb", testspec::one_over_pi_terms(), n);
  const double L_oracle = std::exp(oracle::renormalized_log_c({{1, 1}, {1, -1}}, w, n) / n);
  const double half_unit = 0.5 * std::pow(10.0, std::floor(std::log10(L)) - 3);
  o.detail << "; oracle L = " << L_oracle;
  o.require(std::fabs(L - L_oracle) <= half_unit, "oracle disagrees at 4 significant digits");

  const ProductTower tower = build_tower(spec, 14);
  const auto ratios = checkpoint_ratios(spec, InitialPair::exact(1, 1), tower, 10000);
  const long double M = rep.ratio->M;
  if (ratios.size() < 3) {
    o.require(false, "fewer than 3 checkpoints");
    return;
  }
  const std::size_t s = ratios.size();
  const long double d0 = std::fabs(ratios[s - 3].ratio - M);
  const long double d1 = std::fabs(ratios[s - 2].ratio - M);
  const long double d2 = std::fabs(ratios[s - 1].ratio - M);
  o.detail << std::setprecision(6) << "; M = " << static_cast<double>(M)
           << "; |G_{n+1}/G_{n+2} - M| at n = " << ratios[s - 3].n << ", " << ratios[s - 2].n
           << ", " << ratios[s - 1].n << ": " << static_cast<double>(d0) << ", "
           << static_cast<double>(d1) << ", " << static_cast<double>(d2);
  o.require(d1 < d0 && d2 < d1, "checkpoint ratio distance to M is not decreasing");
}

// 9. Exact ratio-step identity on every Exponential spec.
void criterion9(Outcome& o) {
  int checked = 0;
  for (const NamedSpec& s : exponential_matrix()) {
    const ProductTower t = build_tower(s.spec, usable_horizon(s.spec, 40));
    for (const IdentityCheck& c : ratio_step_identities(t)) {
      ++checked;
      o.require(c.holds, s.name + " level " + std::to_string(c.level));
    }
  }
  o.detail << checked << " exact levels";
}

// 10. Periodic growth rates.
void criterion10(Outcome& o) {
  const std::vector<SeedMatrix> ab{seed_a(), seed_b()};
  const double a = periodic_growth(ab, parse_periodic_word("A", 2));
  const double abw = periodic_growth(ab, parse_periodic_word("AB", 2));
  const double a3b3 = periodic_growth(ab, parse_periodic_word("A3B3", 2));
  o.detail << std::setprecision(12) << "A -> " << a << ", AB -> " << abw << ", A3B3 -> " << a3b3;
  o.require(std::fabs(a - kPhi) < 0.5e-10, "A");
  o.require(abw == 1.0, "AB");
  o.require(a3b3 == 1.0, "A3B3");
}

struct Criterion {
  std::string title;
  std::function<void(Outcome&)> run;
  double limit_seconds;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, Criterion> criteria{
      {1, {"worked example terms", criterion1, 1}},
      {2, {"tower and stream reproduction", criterion2, 1}},
      {3, {"linear case identities", criterion3, 5}},
      {4, {"seed power closed forms", criterion4, 1}},
      {5, {"lemma oracle suite", criterion5, 300}},
      {6, {"Fibonacci growth sanity", criterion6, 10}},
      {7, {"error envelope inequality", criterion7, 1e9}},
      {8, {"cross-module consistency", criterion8, 120}},
      {9, {"exact ratio-step identity", criterion9, 30}},
      {10, {"periodic utility", criterion10, 1e9}},
  };
  if (only != 0 && !criteria.count(only)) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  bool all = true;
  for (const auto& [id, c] : criteria) {
    if (only != 0 && id != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_seconds < 1e9) {
      o.require(secs < c.limit_seconds, "runtime over " + std::to_string(c.limit_seconds) + " s");
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << ": " << c.title << " (" << std::fixed
              << std::setprecision(2) << secs << " s) " << o.detail.str() << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
