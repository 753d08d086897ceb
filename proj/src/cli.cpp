#include "rfib/cli.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rfib/errors.hpp"

namespace rfib {

using nlohmann::json;

namespace {

struct CliOptions {
  std::string config;
  std::string out;
  std::optional<int> levels;
  std::optional<std::uint64_t> terms;
  std::optional<std::size_t> digit_cap;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> seed;
  bool full_digits = false;
};

void add_common(CLI::App* cmd, CliOptions& o, bool config_required) {
  auto* c = cmd->add_option("--config", o.config, "JSON run configuration");
  if (config_required) c->required();
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--levels", o.levels, "tower levels");
  cmd->add_option("--terms", o.terms, "sequence length / symbol count");
  cmd->add_option("--digit-cap", o.digit_cap, "exact arithmetic digit budget");
  cmd->add_option("--trials", o.trials, "oracle instances per lemma");
  cmd->add_option("--seed", o.seed, "random seed for oracle populations");
  cmd->add_flag("--full-digits", o.full_digits, "print big integers in full");
}

RunConfig resolve(const CliOptions& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.levels) cfg.levels = *o.levels;
  if (o.terms) cfg.terms = *o.terms;
  if (o.digit_cap) cfg.digit_cap = *o.digit_cap;
  if (o.trials) {
    if (*o.trials == 0) throw InvalidSpec("--trials must be positive");
    cfg.trials = *o.trials;
  }
  if (o.seed) cfg.seed = *o.seed;
  cfg.full_digits = o.full_digits;
  cfg.validate();
  return cfg;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string big_str(const BigInt& x, bool full) { return render(x, full); }

json sandwich_json(const SandwichConstants& k) {
  return {{"base_level", k.base_level},
          {"r1", k.r1.get_str()},
          {"r2", k.r2.get_str()},
          {"r3", k.r3.get_str()},
          {"r4", k.r4.get_str()},
          {"t1", finite_or_null(k.t1)},
          {"t2", finite_or_null(k.t2)},
          {"t", finite_or_null(k.t)},
          {"log_t", k.log_t}};
}

json spec_json(const WordSpec& spec) {
  json seeds = json::array();
  for (const SeedMatrix& s : spec.seeds()) seeds.push_back({{"epsilon", s.epsilon}, {"shift", s.shift}});
  auto word = [](const Word& w) {
    json a = json::array();
    for (std::size_t i : w) a.push_back(i + 1);
    return a;
  };
  json q = {{"name", spec.quotients().name()}};
  if (auto c = spec.quotients().constant_value()) {
    q["constant"] = *c;
  } else {
    q["terms"] = spec.quotients().terms();
  }
  return {{"seeds", seeds},
          {"p1_word", word(spec.p1_word())},
          {"p2_word", word(spec.p2_word())},
          {"quotients", q},
          {"prefix_property", spec.has_prefix_property()}};
}

json report_json(const GrowthReport& r, bool full) {
  json j;
  j["case"] = to_string(r.label.kind);
  j["outcome"] = to_string(r.outcome());
  j["classification_level"] = r.label.horizon;
  j["levels_used"] = r.levels_used;
  j["top_exact_level"] = r.top_exact_level;
  j["mode"] = r.log_domain ? "log-domain" : "exact";
  j["exact_log_agreement"] = r.exact_log_agreement;
  if (r.label.constants) j["sandwich"] = sandwich_json(*r.label.constants);
  if (r.growth) {
    j["L"] = {{"value", r.growth->L},
              {"err", finite_or_null(r.growth->err_L)},
              {"log_L", r.growth->s},
              {"level", r.growth->level},
              {"certified", r.growth->certified}};
  }
  if (r.ratio) {
    j["M"] = {{"value", static_cast<double>(r.ratio->M)},
              {"err", finite_or_null(r.ratio->err_M)},
              {"log10_err", finite_or_null(r.ratio->log10_err_M)},
              {"level", r.ratio->level},
              {"certified", r.ratio->certified}};
  }
  if (r.linear) {
    j["linear"] = {{"C", big_str(r.linear->C, full)},
                   {"M_hat", big_str(r.linear->M_hat, full)},
                   {"D", big_str(r.linear->D, full)}};
  }
  j["notes"] = r.notes;
  return j;
}

json lemma_json(const LemmaReport& r, bool full) {
  json fails = json::array();
  for (const LemmaFailure& f : r.failures) {
    json ms = json::object();
    for (const auto& [label, m] : f.matrices) {
      ms[label] = {render(m.a, full), render(m.b, full), render(m.c, full), render(m.d, full)};
    }
    fails.push_back({{"detail", f.detail}, {"matrices", ms}});
  }
  return {{"lemma", r.lemma},
          {"passed", r.passed()},
          {"instances", r.instances},
          {"filtered", r.filtered},
          {"filter_rate", r.filter_rate()},
          {"failure_count", r.failure_count},
          {"failures", fails},
          {"notes", r.notes}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_atomically(path, j.dump(2) + "\n");
}

std::string seed_label(const std::vector<SeedMatrix>& seeds, std::size_t i) {
  if (seeds.size() <= 26) return std::string(1, static_cast<char>('A' + i));
  return std::to_string(i + 1);
}

GrowthReport run_analysis(const RunConfig& cfg) {
  AnalyzeOptions opt;
  opt.levels = cfg.levels;
  opt.classify_horizon = cfg.classify_horizon;
  opt.digit_cap = cfg.digit_cap;
  return analyze(*cfg.spec, opt);
}

int cmd_analyze(const RunConfig& cfg) {
  const GrowthReport r = run_analysis(cfg);
  json j = {{"command", "analyze"}, {"name", cfg.name}, {"spec", spec_json(*cfg.spec)}};
  j.update(report_json(r, cfg.full_digits));
  write_json(cfg.out_dir / "analyze.json", j);
  std::cout << "case: " << to_string(r.outcome()) << "\n";
  if (r.growth) {
    std::cout << std::setprecision(12) << "L = " << r.growth->L << " +- " << r.growth->err_L
              << (r.growth->certified ? "" : " (not certified)") << "\n";
  }
  if (r.ratio) {
    std::cout << std::setprecision(12) << "M = " << static_cast<double>(r.ratio->M)
              << " (log10 err " << r.ratio->log10_err_M << ")\n";
  }
  if (r.linear) std::cout << "D = " << render(r.linear->D, cfg.full_digits) << "\n";
  for (const std::string& n : r.notes) std::cout << "note: " << n << "\n";
  std::cout << "report: " << (cfg.out_dir / "analyze.json").string() << "\n";
  return r.outcome() == GrowthCase::Undetermined ? kExitUndetermined : kExitOk;
}

int cmd_generate(const RunConfig& cfg) {
  if (!cfg.init) throw InvalidSpec("generate needs \"init\" in the config");
  const WordSpec& spec = *cfg.spec;
  const InitialPair& init = *cfg.init;
  const std::uint64_t N = cfg.terms;
  const std::uint64_t stride = std::max<std::uint64_t>(1, (N + 2) / 100);
  const BigInt den = common_denominator(init);
  const double log_den = log_abs(den);

  auto fmt = [&](const BigInt& num) {
    if (den == 1) return render(num, cfg.full_digits);
    Rational r(num, den);
    r.canonicalize();
    return render(r, cfg.full_digits);
  };
  std::ostringstream terms;
  terms << "n,G_n,root,sampled\n";
  std::uint64_t zeros = 0;
  auto row = [&](std::uint64_t n, const BigInt& num) {
    terms << n << ',' << fmt(num) << ',';
    if (sgn(num) == 0) {
      ++zeros;
    } else {
      std::ostringstream v;
      v << std::setprecision(15) << std::exp((log_abs(num) - log_den) / static_cast<double>(n));
      terms << v.str();
    }
    terms << ',' << (n % stride == 0 ? 1 : 0) << '\n';
  };
  row(1, init.g1.get_num() * (den / init.g1.get_den()));
  row(2, init.g2.get_num() * (den / init.g2.get_den()));
  for_each_term(spec, init, N, [&](std::uint64_t n, const BigInt&, const BigInt& cur) {
    row(n, cur);
    return true;
  });
  write_atomically(cfg.out_dir / "terms.csv", terms.str());

  const GrowthReport r = run_analysis(cfg);
  json summary = {{"command", "generate"},
                  {"name", cfg.name},
                  {"terms", N + 2},
                  {"zero_terms", zeros},
                  {"all_zero", init.all_zero()},
                  {"approximate", init.approximate},
                  {"case", to_string(r.outcome())},
                  {"linear", r.label.kind == GrowthCase::Linear}};

  std::ostringstream cps;
  cps << "n,ratio,column_ratio\n";
  if (r.ratio) {
    const DegenerateStatus st = degenerate_check(init, r.ratio->M, r.ratio->err_M, 1e-9);
    summary["degenerate"] = {{"warning", st.warning}, {"note", st.note}};
    if (!st.warning && !init.all_zero()) {
      const ProductTower tower = build_tower(spec, usable_horizon(spec, cfg.levels), cfg.digit_cap);
      try {
        for (const CheckpointRatio& c : checkpoint_ratios(spec, init, tower, N)) {
          cps << c.n << ',' << std::setprecision(18) << static_cast<double>(c.ratio) << ','
              << static_cast<double>(c.column_ratio) << '\n';
        }
      } catch (const Error& e) {
        summary["checkpoint_error"] = e.what();
      }
    }
  }
  write_atomically(cfg.out_dir / "checkpoints.csv", cps.str());
  write_json(cfg.out_dir / "generate.json", summary);
  std::cout << "wrote " << (cfg.out_dir / "terms.csv").string() << " and checkpoints.csv\n";
  if (init.all_zero()) std::cout << "warning: all initial values are zero\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const std::vector<LemmaReport> reports = verification_suite(cfg);
  json arr = json::array();
  bool ok = true;
  for (const LemmaReport& r : reports) {
    arr.push_back(lemma_json(r, true));
    ok = ok && r.passed();
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.lemma << ": " << r.instances
              << " instances, filter rate " << std::setprecision(3) << r.filter_rate() * 100
              << "%\n";
  }
  const auto path = cfg.out_dir / "verify.json";
  write_json(path, {{"command", "verify"}, {"name", cfg.name}, {"reports", arr}});
  if (!ok) {
    std::cout << "witnesses: " << path.string() << "\n";
    return kExitLemmaFailed;
  }
  return kExitOk;
}

int cmd_word(const RunConfig& cfg) {
  const WordSpec& spec = *cfg.spec;
  const Word w = stream_prefix(spec, cfg.terms);
  std::ostringstream sym;
  sym << "n,symbol\n";
  for (std::size_t i = 0; i < w.size(); ++i) sym << i + 1 << ',' << seed_label(spec.seeds(), w[i]) << '\n';
  write_atomically(cfg.out_dir / "symbols.csv", sym.str());

  const int H = usable_horizon(spec, std::min(cfg.levels, 30));
  const ProductTower tower = build_tower(spec, H, 1000);
  const int f = tower.first_level();
  const std::size_t ncv = static_cast<std::size_t>(std::max(0, H - f - 1));
  const std::vector<Rational> cv =
      cf_convergents(spec.quotients(), std::min(ncv, spec.quotients().available()));
  std::ostringstream freq;
  freq << "level,k,n1,n2,frequency,n1_over_n2,convergent,match\n";
  for (const TowerLevel& l : tower.levels()) {
    const auto ratio = p1_p2_ratio(tower, l.level);
    const std::size_t idx = static_cast<std::size_t>(l.level - f - 1);
    std::string conv, match;
    if (l.level >= f + 2 && idx <= cv.size()) {
      conv = cv[idx - 1].get_str();
      match = ratio && *ratio == cv[idx - 1] ? "1" : "0";
    }
    freq << l.level << ',' << l.length << ',' << l.p1_count << ',' << l.p2_count << ','
         << letter_frequency(tower, l.level).get_str() << ',' << (ratio ? ratio->get_str() : "")
         << ',' << conv << ',' << match << '\n';
  }
  write_atomically(cfg.out_dir / "frequencies.csv", freq.str());

  const std::size_t shown = std::min<std::size_t>(w.size(), 40);
  for (std::size_t i = 0; i < shown; ++i) std::cout << seed_label(spec.seeds(), w[i]);
  std::cout << (w.size() > shown ? "...\n" : "\n");
  return kExitOk;
}

int cmd_periodic(const RunConfig& cfg, const std::string& word_text) {
  std::vector<SeedMatrix> seeds =
      cfg.spec ? cfg.spec->seeds() : std::vector<SeedMatrix>{seed_a(), seed_b()};
  const Word w = parse_periodic_word(word_text, seeds.size());
  std::cout << std::setprecision(15) << periodic_growth(seeds, w) << "\n";
  return kExitOk;
}

}  // namespace

void write_atomically(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Word parse_periodic_word(const std::string& text, std::size_t nseeds) {
  Word w;
  for (std::size_t i = 0; i < text.size();) {
    const char ch = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
    if (ch < 'A' || ch > 'Z' || static_cast<std::size_t>(ch - 'A') >= nseeds) {
      throw InvalidSpec(std::string("unknown seed letter '") + text[i] + "' in \"" + text + "\"");
    }
    std::size_t j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    const std::size_t count = j > i + 1 ? std::stoul(text.substr(i + 1, j - i - 1)) : 1;
    if (count == 0) throw InvalidSpec("zero repeat count in \"" + text + "\"");
    w.insert(w.end(), count, static_cast<std::size_t>(ch - 'A'));
    i = j;
  }
  if (w.empty()) throw InvalidSpec("periodic word is empty");
  return w;
}

double periodic_growth(const std::vector<SeedMatrix>& seeds, const Word& word) {
  const IMatrix2 p = word_product(seeds, word);
  const BigInt tr = p.a + p.d;
  const BigInt det = p.det();
  const BigInt disc = tr * tr - 4 * det;
  const double k = static_cast<double>(word.size());
  if (sgn(disc) < 0) return std::pow(std::fabs(det.get_d()), 0.5 / k);
  if (sgn(tr) == 0) return std::pow(std::sqrt(disc.get_d()) / 2.0, 1.0 / k);
  // |lambda| = |tr| (1 + sqrt(1 - 4 det / tr^2)) / 2
  const long double x = ratio_ld(BigInt(4 * det), BigInt(tr * tr));
  const double log_rho = log_abs(tr) - std::log(2.0) + std::log1p(std::sqrt(1.0 - static_cast<double>(x)));
  return std::exp(log_rho / k);
}

std::vector<LemmaReport> verification_suite(const RunConfig& cfg) {
  std::vector<LemmaReport> out;
  out.push_back(verify_lemma_positive(DetPopulation::PlusOne, cfg.trials, cfg.seed));
  out.push_back(verify_lemma_positive(DetPopulation::AbsOne, cfg.trials, cfg.seed + 1));
  out.push_back(verify_lemma_power(cfg.trials, 12, cfg.seed + 2));
  out.push_back(verify_samesigns(cfg.trials, cfg.seed + 3));
  if (!cfg.spec) return out;

  const WordSpec& spec = *cfg.spec;
  const ProductTower tower = build_tower(spec, usable_horizon(spec, cfg.levels), cfg.digit_cap);
  const CaseLabel label = classify_case(tower, cfg.classify_horizon);
  LemmaReport div = verify_entry_divergence(cfg.trials, cfg.seed + 4);
  if (label.kind == GrowthCase::Exponential) div.merge(verify_entry_divergence(tower));
  out.push_back(div);
  out.push_back(verify_decomposition(spec, tower, cfg.trials, cfg.seed + 5, cfg.terms));
  if (label.kind == GrowthCase::Exponential) {
    out.push_back(verify_g_bounds(spec, tower, cfg.terms));
  } else if (label.kind == GrowthCase::Linear) {
    out.push_back(verify_linear_growth(spec, tower, cfg.terms));
  }
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Growth of random Fibonacci recurrences scheduled by balanced words", "rfib"};
  app.require_subcommand(1);
  CliOptions opts;
  std::string periodic_word;
  auto* analyze_cmd = app.add_subcommand("analyze", "classify, growth exponent L, ratio limit M");
  auto* generate_cmd = app.add_subcommand("generate", "terms G_n and checkpoint ratios");
  auto* verify_cmd = app.add_subcommand("verify", "run the lemma oracles");
  auto* word_cmd = app.add_subcommand("word", "symbol stream and letter frequencies");
  auto* periodic_cmd = app.add_subcommand("periodic", "growth rate of a periodic word");
  add_common(analyze_cmd, opts, true);
  add_common(generate_cmd, opts, true);
  add_common(verify_cmd, opts, true);
  add_common(word_cmd, opts, true);
  add_common(periodic_cmd, opts, false);
  periodic_cmd->add_option("word", periodic_word, "e.g. A3B3")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    const RunConfig cfg = resolve(opts);
    if (*analyze_cmd) return cmd_analyze(cfg);
    if (*generate_cmd) return cmd_generate(cfg);
    if (*verify_cmd) return cmd_verify(cfg);
    if (*word_cmd) return cmd_word(cfg);
    if (*periodic_cmd) return cmd_periodic(cfg, periodic_word);
  } catch (const InvalidSpec& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const QuotientExhausted& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace rfib
