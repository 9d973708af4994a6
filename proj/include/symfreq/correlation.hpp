#pragma once

// Preimage histograms and their moments.
//
// For a rule F viewed at radius r, N_k counts the neighborhoods w of length
// r+1 with F(w) in B and exactly k symbols from A. The order-m correlation is
// sum_k k^m N_k (0^0 = 1). The normalized correlation is the radius-0 value
// obtained by running the radius recursion
//   C(r+1, m) = q C(r, m) + |A| sum_{i<m} binom(m, i) C(r, i)
// backwards from the rule's own radius.
//
// Everything here is exact: BigInt counts and Rational values.

#include "symfreq/ca_core.hpp"
#include "symfreq/exact.hpp"

#include <optional>
#include <vector>

namespace symfreq {

struct Histogram {
  int alphabet = 0;
  int radius = 0;
  SymbolSet a_set{2, 0};
  SymbolSet b_set{2, 0};
  std::vector<BigInt> counts;  // counts[k], k = 0..radius+1

  BigInt total() const;
  bool operator==(const Histogram& other) const { return counts == other.counts; }
};

Histogram histogram(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set, int r_eff);
inline Histogram histogram(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set) {
  return histogram(rule, a_set, b_set, rule.radius());
}
// H^A_A(id, r), from the identity's local rule.
Histogram identity_histogram(int q, const SymbolSet& a_set, int r);

BigInt moment(const Histogram& h, int m);
BigInt correlation(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set, int r_eff, int m);

// Correlations C(s, 0..m) for every radius s = 0..r_eff, the ones below the
// rule radius obtained by inverting the recursion. result[s][i] = C(s, i).
std::vector<std::vector<Rational>> correlation_ladder(const LocalRule& rule, const SymbolSet& a_set,
                                                      const SymbolSet& b_set, int r_eff, int m);

Rational normalized_correlation(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set, int m = 1);
// C(r,1)/q^r - r |A| |f^-1(B)| / q^(r+1).
Rational normalized_correlation_closed_form(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set);
// Balanced version: C(r,1)/q^r - r |A| |B| / q. Only equal to the above for balanced rules.
Rational normalized_correlation_balanced_form(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set);

// C^A_A(id, r, m); m = 1 uses (q + r|A|)|A| q^(r-1).
BigInt identity_correlation(int q, int a_size, int r, int m = 1);

// sum_k k^2 a^k binom(n, k) = n a (n a + 1) (a + 1)^(n - 2).
Rational weighted_square_sum(int n, const Rational& a);

inline constexpr std::uint64_t kDefaultFiniteWordLimit = std::uint64_t{1} << 24;
// sum over w in Sigma^(n+r) of |w|_A * |F(w)|_A.
BigInt finite_correlation(const LocalRule& rule, const SymbolSet& a_set, int n,
                          std::uint64_t max_words = kDefaultFiniteWordLimit);

struct DominationEntry {
  SymbolSet a_set;
  BigInt rule_value;
  BigInt identity_value;
};

struct OneDominationReport {
  bool holds = true;
  BigInt margin;  // min over tested A of C(id) - C(F)
  bool surjective = false;
  std::vector<DominationEntry> entries;
};

// Tests C^A_A(F, r, 1) <= C^A_A(id, r, 1) for every nonempty proper A, or for
// the given A. Non-surjective rules are evaluated and flagged.
OneDominationReport check_one_domination(const LocalRule& rule,
                                         std::optional<SymbolSet> a_set = std::nullopt);

struct HighDominationReport {
  std::optional<int> k0;      // largest k where the histograms differ
  bool strict_at_k0 = false;  // N_F(k0) < N_id(k0)
  std::optional<int> m_star;  // certified start of domination; 0 when histograms agree
  bool surjective = false;
};

HighDominationReport check_high_domination(const LocalRule& rule, const SymbolSet& a_set, int m_max = 32);

struct PrefixSumReport {
  bool holds = true;
  std::optional<int> witness_n;
  bool surjective = false;
  std::vector<BigInt> rule_prefix;
  std::vector<BigInt> identity_prefix;
};

// Binary rules only: sum_{k<=n} N^1_1(F,r,k) >= sum_{k<=n} N^1_1(id,r,k) for all n.
PrefixSumReport check_prefix_sum_conjecture(const LocalRule& rule);

// Exact mean of the order-1 normalized correlation over all radius-r rules.
Rational average_normalized_correlation(int q, int r, const SymbolSet& a_set, const SymbolSet& b_set,
                                        std::uint64_t limit = kDefaultEnumerationLimit);

enum class Conservation { conserves, violates, unknown };

struct PeriodicWitness {
  Word period;
  Word image;
};

struct ConservationReport {
  Conservation verdict = Conservation::unknown;
  std::optional<PeriodicWitness> witness;
  bool surjective = false;
  bool histograms_equal = false;
  int periods_searched = 0;
};

// First periodic configuration (by period, then lexicographically) whose
// A-count changes under one step, searching periods 1..max_period.
std::optional<PeriodicWitness> find_conservation_violation(const LocalRule& rule, const SymbolSet& a_set,
                                                           int max_period);

// Surjective rules are decided by histogram equality. For other rules a
// periodic search up to max_period (default 3(r+1)) only certifies violations.
ConservationReport conserves_symbols(const LocalRule& rule, const SymbolSet& a_set,
                                     std::optional<int> max_period = std::nullopt);

const char* to_string(Conservation c);

}  // namespace symfreq
