#pragma once

// The reversible interval-swap map on binary windows.
//
// Occurrences of the marker (10)^n 0 cut a window into intervals. Each
// complete interval is the marker followed by a free part v of length l.
// Medium intervals trade light marker-free free parts (family A_l, weight in
// [ceil(lp/2), floor(3lp/2)]) for words of the block family B_l built from
// blocks "110a", and back. Rank/unrank in both families is lexicographic.

#include "symfreq/ca_core.hpp"
#include "symfreq/exact.hpp"

#include <gmp.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace symfreq {

// KMP automaton for a binary pattern. States 0..length-1 are the lengths of
// the longest pattern prefix matched so far; next() returns length() on a
// full match.
class PatternAutomaton {
 public:
  explicit PatternAutomaton(Word pattern);

  int length() const { return static_cast<int>(pattern_.size()); }
  const Word& pattern() const { return pattern_; }
  int next(int state, Symbol bit) const { return delta_[2 * state + bit]; }
  bool matched(int state) const { return state == length(); }
  // State after reading w from `state`; nullopt once the pattern occurs.
  std::optional<int> feed(int state, WordView w) const;
  bool occurs_in(WordView w) const { return !feed(0, w).has_value(); }

 private:
  Word pattern_;
  std::vector<int> delta_;
};

std::vector<std::size_t> find_occurrences(WordView window, WordView pattern);

// Counts of pattern-free binary words by length, start state and weight.
// Only the start states reachable by reading a 0 (plus state 0) are kept,
// which is all rank/unrank need. Values are packed into one limb arena as
// prefix sums over the weight.
class PatternFreeCounts {
 public:
  PatternFreeCounts(const PatternAutomaton& automaton, int max_length, int max_weight);

  const PatternAutomaton& automaton() const { return automaton_; }
  int max_length() const { return max_length_; }
  int max_weight() const { return max_weight_; }
  std::size_t limb_count() const { return limbs_.size(); }

  // Pattern-free words of length len read from `state` whose weight lies in [lo, hi].
  BigInt count(int len, int state, long lo, long hi) const;

 private:
  std::size_t cell(int len, int slot, int weight) const;
  mpz_srcptr prefix(int len, int slot, int weight, mpz_t scratch) const;

  PatternAutomaton automaton_;
  int max_length_;
  int max_weight_;
  std::vector<int> slot_of_state_;
  int slots_ = 0;
  std::vector<mp_limb_t> limbs_;
  std::vector<std::uint64_t> offsets_;
};

// Pattern-free words of a fixed length with weight in [lo, hi].
class WeightedFreeFamily {
 public:
  WeightedFreeFamily(std::shared_ptr<const PatternFreeCounts> counts, int length, long lo, long hi);

  int length() const { return length_; }
  long min_weight() const { return lo_; }
  long max_weight() const { return hi_; }
  BigInt size() const;
  bool contains(WordView v) const;
  BigInt rank(WordView v) const;
  Word unrank(const BigInt& index) const;

 private:
  std::shared_ptr<const PatternFreeCounts> counts_;
  int length_;
  long lo_;
  long hi_;
};

// Plain block family: floor(l/4) blocks "110a", then l mod 4 zeros.
BigInt b_family_size(int length);
bool is_b_word(int length, WordView v);
BigInt rank_b(int length, WordView v);
Word unrank_b(int length, const BigInt& index);

// The members of the block family in which a marker pattern does not occur,
// ranked lexicographically.
class MarkerFreeBFamily {
 public:
  MarkerFreeBFamily(const PatternAutomaton& automaton, int max_blocks);

  BigInt size(int length) const;
  bool contains(int length, WordView v) const;
  BigInt rank(int length, WordView v) const;
  Word unrank(int length, const BigInt& index) const;

 private:
  const BigInt& completions(int length, int blocks_left, int state) const;
  std::optional<int> feed_block(int state, Symbol a) const;

  PatternAutomaton automaton_;
  int max_blocks_;
  // completions_[tail][j][state]: ways to append j blocks then `tail` zeros.
  std::vector<std::vector<std::vector<BigInt>>> completions_;
};

struct IntervalParams {
  int n = 1;
  Rational p;
  Word marker;         // (10)^n 0
  Rational marker_mass;  // p^n (1-p)^(n+1)
  long alpha = 0;        // ceil(n / marker_mass) + |marker|
  long short_bound = 0;  // ceil(2n / p)

  int marker_length() const { return static_cast<int>(marker.size()); }
  // Medium intervals satisfy short_bound <= k <= alpha + |marker|.
  long max_medium_length() const { return alpha + marker_length(); }
};

IntervalParams make_interval_params(int n, const Rational& p);

enum class IntervalClass { short_interval, medium, long_interval };
const char* to_string(IntervalClass c);
IntervalClass classify_interval(const IntervalParams& params, long length);

struct Interval {
  std::size_t start = 0;
  std::size_t length = 0;  // marker plus free part
  IntervalClass cls = IntervalClass::short_interval;
  bool complete = false;
};

struct IntervalDecomposition {
  Word window;
  std::vector<std::size_t> occurrences;
  // Complete intervals between consecutive occurrences, plus the trailing
  // segment after the last occurrence marked incomplete.
  std::vector<Interval> intervals;
};

IntervalDecomposition decompose_intervals(WordView window, const IntervalParams& params);

struct ParamsReport {
  bool valid = true;
  bool has_medium = true;
  long min_free_length = 0;
  long max_free_length = -1;
  std::vector<std::string> reasons;
};

struct Rewrite {
  std::size_t free_start = 0;
  std::size_t free_length = 0;
  bool into_b = false;  // A -> B when true, B -> A otherwise
};

struct SwapResult {
  Word window;
  std::vector<Rewrite> rewrites;
};

// The map for one (n, p). Building it counts both families for every medium
// free-part length, which also decides validity.
class IntervalSwap {
 public:
  explicit IntervalSwap(IntervalParams params);

  const IntervalParams& params() const { return params_; }
  const ParamsReport& report() const { return report_; }
  // Ranges and sizes for one free-part length in the medium range.
  WeightedFreeFamily a_family(int free_length) const;
  const MarkerFreeBFamily& b_family() const { return *b_family_; }

  // Requires a valid report.
  SwapResult apply_detailed(WordView window) const;
  Word apply(WordView window) const { return apply_detailed(window).window; }

 private:
  IntervalParams params_;
  ParamsReport report_;
  std::shared_ptr<const PatternFreeCounts> counts_;
  std::shared_ptr<const MarkerFreeBFamily> b_family_;
};

ParamsReport check_interval_params(const IntervalParams& params);

// Weight bounds of A_l.
long a_min_weight(const Rational& p, long free_length);
long a_max_weight(const Rational& p, long free_length);

int longest_run(WordView w, Symbol s);

}  // namespace symfreq
