#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rfib/config.hpp"
#include "rfib/oracle_verify.hpp"

namespace rfib {

enum ExitCode : int {
  kExitOk = 0,
  kExitLemmaFailed = 1,
  kExitInvalidInput = 2,
  kExitUndetermined = 3,
};

/// Entry point for the `rfib` executable; returns the process exit code.
int run_cli(int argc, char** argv);

/// "A3B3", "AB", "AAB": letters pick seeds in order (A is the first seed),
/// an optional count repeats the letter.
Word parse_periodic_word(const std::string& text, std::size_t nseeds);

/// max |eigenvalue|^(1/k) of the period product, from its trace and determinant.
double periodic_growth(const std::vector<SeedMatrix>& seeds, const Word& word);

/// Oracle suite used by `rfib verify`.
std::vector<LemmaReport> verification_suite(const RunConfig& cfg);

/// Writes through a temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace rfib
