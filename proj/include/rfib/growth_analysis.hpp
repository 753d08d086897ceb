#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfib/word_engine.hpp"

namespace rfib {

/// Integers with r1/r2 <= |a|/|c|, |b|/|d|, |a|/|b|, |c|/|d| <= r3/r4 at
/// base_level, plus the derived growth factors
///   t1 = (r4 - r3) / (r3 r4),  t2 = (r2 r4 + r1 r3) / (r1 r4),  t = max(t2, 1/t1).
/// Logs are kept alongside since t2 can leave double range for deep bases.
struct SandwichConstants {
  BigInt r1, r2, r3, r4;
  int base_level = 2;
  double t1 = 0, t2 = 0, t = 0;
  double log_t1 = 0, log_t2 = 0, log_t = 0;
};

/// |b| = |c| = |d| - 1 = |a| + 1.
bool is_degenerate_pattern(const IMatrix2& p);

/// r1/r2 <= each of the four ratios <= r3/r4, by exact cross-multiplication.
bool within_sandwich(const IMatrix2& p, const SandwichConstants& k);

/// Builds and verifies r1 = 1, r2 = |d| - 1, r3/r4 = max((|c|-1)/|c|, (|d|-2)/(|d|-1)).
std::optional<SandwichConstants> find_sandwich(const IMatrix2& p, int level);
std::optional<SandwichConstants> find_sandwich(const ProductTower& tower, int m);

enum class GrowthCase { Linear, Exponential, Undetermined };
std::string to_string(GrowthCase c);

struct CaseLabel {
  GrowthCase kind = GrowthCase::Undetermined;
  std::optional<SandwichConstants> constants;  // set for Exponential
  int horizon = 0;                             // highest level examined
};

inline constexpr int kDefaultClassifyHorizon = 12;

/// Exponential at the first level (above the first) with a sandwich witness;
/// Linear if every examined level shows the degenerate pattern; otherwise
/// Undetermined. Only exact levels up to `horizon` are examined.
CaseLabel classify_case(const ProductTower& tower, int horizon = kDefaultClassifyHorizon);

struct TraceLevel {
  int level = 0;
  std::uint64_t length = 0;
  double log_abs_c = 0;  // u_m
  double s = 0;          // u_m / k_m
  long double ratio_ac = 0;  // a_m / c_m
  bool exact = false;
};

struct GrowthTrace {
  std::vector<TraceLevel> levels;
  const TraceLevel& at(int m) const;
  int first_level() const { return levels.front().level; }
  int top_level() const { return levels.back().level; }
};

GrowthTrace growth_trace(const ProductTower& tower);

/// Tail bound |s_m - s_{m-1}| + (2/(2-phi)) log(t) / (phi^{m-1} (phi-1)), with
/// m counted so that the first tower level is 1.
double growth_error_envelope(double ds, double log_t, int m);
double growth_error_envelope(const GrowthTrace& trace, double log_t, int m);

struct GrowthEstimate {
  double L = 0;
  double err_L = 0;
  double s = 0;      // log L
  double err_s = 0;
  int level = 0;     // top level used
  bool certified = false;  // s - err_s > 0
  GrowthTrace trace;
};

/// L = exp(s_H) at the top tower level H. Throws InsufficientHorizon when
/// the tower stops before base_level + 3.
GrowthEstimate growth_exponent(const ProductTower& tower, const SandwichConstants& k);

struct RatioEstimate {
  long double M = 0;
  double err_M = 0;          // may underflow to 0; see log10_err_M
  double log10_err_M = 0;
  double log_L_prime = 0;    // min s_m over m >= base + 2
  int level = 0;             // top exact level
  bool certified = false;    // L' > 1
};

/// M = a_H / c_H at the top exact level with the tail bound 2 / (t1 L'^{2 k_H}).
RatioEstimate ratio_limit(const ProductTower& tower, const SandwichConstants& k);

struct IdentityCheck {
  int level = 0;
  bool holds = true;
  std::string detail;
};

/// |a_m c_{m-1} - a_{m-1} c_m| = |c'_m| with c'_m the lower-left entry of
/// P_{m-1}^{q_{m-2}-1} P_{m-2}, at every exact level m >= first + 2.
std::vector<IdentityCheck> ratio_step_identities(const ProductTower& tower);

struct BoundViolation {
  int level = 0;
  std::string detail;
};

struct BoundsReport {
  int levels_checked = 0;
  int exact_fallbacks = 0;
  std::vector<BoundViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// (t1 |c_{m-1}|)^q |c_{m-2}| <= |c_m| <= (t2 |c_{m-1}|)^q |c_{m-2}|, q = q_{m-2},
/// for m >= base + 2.
BoundsReport c_bounds_check(const ProductTower& tower, const SandwichConstants& k);

/// |s_{m+1} - s_m| <= |s_m - s_{m-1}| / 2 + log(t) / k_m for m >= base + 2.
BoundsReport envelope_inequality(const GrowthTrace& trace, const SandwichConstants& k);

struct LinearBound {
  BigInt C;      // max(|c_1|, |c_2|)
  BigInt M_hat;  // largest entry over prefixes of the second base word
  BigInt D;      // 2 M C + 2 M C k_2 + 2 M
};

/// Throws WrongCase unless the tower classifies as Linear.
LinearBound linear_bound_constant(const ProductTower& tower, const WordSpec& spec,
                                  int horizon = kDefaultClassifyHorizon);

/// min |M C1 + C2| over the columns (C1, C2) of prefix products of the limit
/// word shorter than k at the decomposition base.
double m_prime(const WordSpec& spec, const ProductTower& tower, long double M);

/// Highest level <= requested whose length fits 64 bits and whose quotients
/// are available.
int usable_horizon(const WordSpec& spec, int requested);

struct AnalyzeOptions {
  int levels = 40;
  int classify_horizon = kDefaultClassifyHorizon;
  std::size_t digit_cap = kDefaultDigitCap;
};

struct GrowthReport {
  CaseLabel label;
  std::optional<GrowthEstimate> growth;
  std::optional<RatioEstimate> ratio;
  std::optional<LinearBound> linear;
  int levels_used = 0;
  int top_exact_level = 0;
  bool log_domain = false;
  double exact_log_agreement = 0;
  std::vector<std::string> notes;

  /// Final outcome: Undetermined also when L or M could not be certified.
  GrowthCase outcome() const;
};

GrowthReport analyze(const WordSpec& spec, const AnalyzeOptions& opt = {});

}  // namespace rfib
