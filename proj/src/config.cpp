#include "rfib/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rfib/errors.hpp"

namespace rfib {

using nlohmann::json;

namespace {

Word parse_word(const json& j, const char* key, std::size_t nseeds) {
  if (!j.contains(key) || !j[key].is_array()) {
    throw InvalidSpec(std::string("config needs an array \"") + key + "\"");
  }
  Word w;
  for (const json& x : j[key]) {
    if (!x.is_number_integer() || x.get<long long>() < 1 ||
        static_cast<std::size_t>(x.get<long long>()) > nseeds) {
      throw InvalidSpec(std::string(key) + " entries must be seed indices 1.." +
                        std::to_string(nseeds));
    }
    w.push_back(static_cast<std::size_t>(x.get<long long>()) - 1);
  }
  return w;
}

std::vector<std::uint64_t> parse_terms(const json& j) {
  if (!j.is_array()) throw InvalidSpec("quotient terms must be an array");
  std::vector<std::uint64_t> out;
  for (const json& x : j) {
    if (!x.is_number_integer() || x.get<long long>() < 1) {
      throw InvalidSpec("partial quotients must be positive integers");
    }
    out.push_back(x.get<std::uint64_t>());
  }
  return out;
}

QuotientSource parse_quotients(const json& j) {
  if (!j.is_object()) throw InvalidSpec("\"quotients\" must be an object");
  if (j.contains("explicit")) return QuotientSource::explicit_terms(parse_terms(j["explicit"]));
  if (j.contains("named")) {
    if (!j.contains("terms")) throw InvalidSpec("named quotients need user-supplied \"terms\"");
    return QuotientSource::explicit_terms(parse_terms(j["terms"]), j["named"].get<std::string>());
  }
  if (j.contains("constant")) {
    const json& c = j["constant"];
    if (!c.is_number_integer() || c.get<long long>() < 1) {
      throw InvalidSpec("constant quotient must be a positive integer");
    }
    return QuotientSource::constant(c.get<std::uint64_t>());
  }
  throw InvalidSpec("quotients need one of \"explicit\", \"named\", \"constant\"");
}

Rational parse_value(const json& v, bool& approximate) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(BigInt(v.dump()));
  if (v.is_number_float()) {
    approximate = true;
    return Rational(v.get<double>());
  }
  throw InvalidSpec("initial values must be numbers or rational strings");
}

template <typename T>
void read_positive(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 1) {
    throw InvalidSpec(std::string("\"") + key + "\" must be a positive integer");
  }
  out = j[key].get<T>();
}

}  // namespace

Rational parse_rational(const std::string& s) {
  try {
    const auto dot = s.find('.');
    if (dot != std::string::npos && s.find('/') == std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      BigInt den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, s.size() - dot - 1);
      Rational r(BigInt(digits), den);
      r.canonicalize();
      return r;
    }
    Rational r(s);
    if (sgn(r.get_den()) == 0) throw InvalidSpec("zero denominator in \"" + s + "\"");
    r.canonicalize();
    return r;
  } catch (const std::invalid_argument&) {
    throw InvalidSpec("not a rational number: \"" + s + "\"");
  }
}

void RunConfig::validate() const {
  if (levels < 2) throw InvalidSpec("levels must be at least 2");
  if (classify_horizon < 3) throw InvalidSpec("classification horizon must be at least 3");
  if (terms < 1) throw InvalidSpec("terms must be positive");
  if (digit_cap < 1000) throw InvalidSpec("digit cap must be at least 1000");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidSpec(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidSpec("config must be a JSON object");
  RunConfig cfg;
  try {
    cfg.name = j.value("name", "");
    if (!j.contains("seeds") || !j["seeds"].is_array() || j["seeds"].empty()) {
      throw InvalidSpec("config needs a nonempty \"seeds\" array");
    }
    std::vector<SeedMatrix> seeds;
    for (const json& s : j["seeds"]) {
      seeds.emplace_back(s.at("epsilon").get<int>(), s.at("shift").get<std::int64_t>());
    }
    Word p1 = parse_word(j, "p1_word", seeds.size());
    Word p2 = parse_word(j, "p2_word", seeds.size());
    if (!j.contains("quotients")) throw InvalidSpec("config needs \"quotients\"");
    cfg.spec.emplace(std::move(seeds), std::move(p1), std::move(p2),
                     parse_quotients(j["quotients"]));
    if (j.contains("init")) {
      bool approx = false;
      const json& in = j["init"];
      Rational g1 = parse_value(in.at("g1"), approx);
      Rational g2 = parse_value(in.at("g2"), approx);
      InitialPair init = InitialPair::exact(std::move(g1), std::move(g2));
      init.approximate = approx;
      cfg.init = std::move(init);
    }
    read_positive(j, "levels", cfg.levels);
    read_positive(j, "classify_horizon", cfg.classify_horizon);
    read_positive(j, "terms", cfg.terms);
    read_positive(j, "digit_cap", cfg.digit_cap);
    read_positive(j, "trials", cfg.trials);
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InvalidSpec(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rfib
