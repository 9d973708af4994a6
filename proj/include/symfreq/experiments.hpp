#pragma once

// Batch drivers behind the CLI. Each returns its rows already rendered as
// CSV so the same bytes can be written to disk or compared across runs.

#include "symfreq/ca_core.hpp"
#include "symfreq/exact.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace symfreq {

// Quotes a field when it contains a comma, quote or newline.
std::string csv_field(std::string_view text);
std::string format_float(double v);

enum class SweepCheck { one_domination, high_domination, prefix_sums, conservation, averages };
SweepCheck parse_sweep_check(std::string_view text);
const char* to_string(SweepCheck c);

struct SweepConfig {
  int q = 2;
  int r_min = 0;
  int r_max = 1;
  SweepCheck check = SweepCheck::one_domination;
  std::optional<std::string> a_text;  // default: every nonempty proper subset ({1} for prefix sums)
  std::optional<std::string> b_text;  // averages only; default: same as A
  int m_max = 32;
  std::optional<int> max_period;
  std::uint64_t limit = kDefaultEnumerationLimit;
  int jobs = 1;
  std::vector<LocalRule> rules;  // when nonempty, replaces enumeration
};

struct RadiusTally {
  int radius = 0;
  std::uint64_t rules = 0;
  std::uint64_t surjective = 0;
  std::uint64_t violations = 0;
};

struct SweepResult {
  std::string csv;
  std::vector<RadiusTally> tallies;
  std::uint64_t violations = 0;
  std::uint64_t surjective = 0;
  bool averaged = false;  // one row per radius over the whole rule space
  std::string summary() const;
};

inline constexpr const char* kSweepHeader =
    "rule_digits,A,B,A_size,B_size,r,C_raw,C_normalized,C_normalized_float,holds,detail";

SweepResult run_sweep(const SweepConfig& config);

struct FnExperimentConfig {
  int n = 2;
  Rational p{1, 50};
  std::uint64_t windows = 1000;
  std::uint64_t seed = 1;
  std::size_t window_length = 0;  // 0: three times the longest medium interval
  int jobs = 1;
};

struct FnWindowRow {
  std::uint64_t index = 0;
  std::size_t length = 0;
  std::size_t occurrences = 0;
  std::size_t medium = 0;
  std::size_t rewrites_into_b = 0;
  std::size_t rewrites_into_a = 0;
  bool involution = false;
  bool occurrences_kept = false;
  int longest_one_run = 0;  // over rewritten free parts in the output
};

struct FnExperimentResult {
  std::vector<FnWindowRow> rows;
  std::string csv;
  std::uint64_t involution_failures = 0;
  std::uint64_t occurrence_failures = 0;
  std::uint64_t windows_with_111 = 0;
  std::uint64_t windows_with_1111 = 0;
  std::uint64_t rewrites = 0;
};

inline constexpr const char* kFnHeader =
    "window,length,occurrences,medium,rewrites_into_b,rewrites_into_a,involution,occurrences_kept,longest_one_run";

FnExperimentResult run_fn_experiment(const FnExperimentConfig& config);

struct XorLimitConfig {
  Rational alpha = 1;
  int levels = 4;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 7;
  int n_min = 1;
  int n_max = 3;
  Word word{1};
  std::optional<Rational> constant_p;  // replaces the default p_n
  int jobs = 1;
};

struct XorLimitRow {
  int n = 0;
  std::uint64_t steps = 0;
  double estimate = 0;
  double standard_error = 0;
};

struct XorLimitResult {
  std::vector<XorLimitRow> rows;
  std::string csv;
};

inline constexpr const char* kXorHeader = "n,t,alpha,samples,estimate,stderr,seed";

// One row per n: the frequency of `word` under F^(2^t(n)), F the XOR rule.
XorLimitResult run_xor_limit(const XorLimitConfig& config);

}  // namespace symfreq
