#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rfib/growth_analysis.hpp"
#include "rfib/sequence_engine.hpp"

namespace rfib {

struct RunConfig {
  std::string name;
  std::optional<WordSpec> spec;
  std::optional<InitialPair> init;
  int levels = 40;
  int classify_horizon = kDefaultClassifyHorizon;
  std::uint64_t terms = 10000;
  std::size_t digit_cap = kDefaultDigitCap;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  bool full_digits = false;
  std::filesystem::path out_dir = ".";

  /// Throws InvalidSpec when a horizon is not positive or the digit cap is below 1000.
  void validate() const;
};

/// Parses the JSON config document; throws InvalidSpec with a readable message.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// "7/3", "-2", "0.5" (decimal strings are exact) into a rational.
Rational parse_rational(const std::string& s);

}  // namespace rfib
