#pragma once

// Rules from the worked examples and brute-force oracles that share no code
// path with the library beyond LocalRule::operator().

#include "symfreq/ca_core.hpp"
#include "symfreq/exact.hpp"

#include <map>
#include <random>
#include <vector>

namespace testsupport {

using namespace symfreq;

// Ternary radius 2: 2 if b = c, else 1 if a = 0, else 0.
inline LocalRule example_ternary_rule() {
  return LocalRule::from_function(3, 2, [](WordView w) -> Symbol {
    if (w[1] == w[2]) return 2;
    return w[0] == 0 ? 1 : 0;
  });
}

// Binary radius 2: 1 iff at most two ones.
inline LocalRule at_most_two_ones() {
  return LocalRule::from_function(2, 2, [](WordView w) -> Symbol { return w[0] + w[1] + w[2] <= 2; });
}

// Binary radius 2: 1 iff exactly two ones.
inline LocalRule exactly_two_ones() {
  return LocalRule::from_function(2, 2, [](WordView w) -> Symbol { return w[0] + w[1] + w[2] == 2; });
}

// Ternary radius 1: 10 -> 0, 01 -> 1, otherwise the left cell.
inline LocalRule ternary_nonconserving() {
  return LocalRule::from_function(3, 1, [](WordView w) -> Symbol {
    if (w[0] == 1 && w[1] == 0) return 0;
    if (w[0] == 0 && w[1] == 1) return 1;
    return w[0];
  });
}

inline LocalRule xor_rule() { return parse_rule("2 1 0110"); }

inline LocalRule random_rule(std::mt19937_64& rng, int q, int r) {
  std::uint64_t size = 1;
  for (int i = 0; i <= r; ++i) size *= q;
  std::vector<Symbol> table(size);
  for (auto& s : table) s = static_cast<Symbol>(rng() % q);
  return LocalRule(q, r, table);
}

inline Word random_word(std::mt19937_64& rng, int q, std::size_t length) {
  Word w(length);
  for (auto& s : w) s = static_cast<Symbol>(rng() % q);
  return w;
}

// Calls f on every word of the given length, odometer order.
template <class F>
void for_each_word(int q, std::size_t length, F&& f) {
  Word w(length, 0);
  while (true) {
    f(static_cast<const Word&>(w));
    std::size_t j = length;
    while (j > 0) {
      --j;
      if (++w[j] < q) break;
      w[j] = 0;
      if (j == 0) return;
    }
    if (length == 0) return;
  }
}

inline int count_members(const Word& w, std::uint64_t mask) {
  int c = 0;
  for (Symbol s : w) c += (mask >> s) & 1u;
  return c;
}

// N_k over neighborhoods of length r_eff + 1, evaluating the rule on the
// first r + 1 cells.
inline std::vector<BigInt> brute_histogram(const LocalRule& rule, std::uint64_t a_mask, std::uint64_t b_mask,
                                           int r_eff) {
  std::vector<BigInt> counts(r_eff + 2, 0);
  for_each_word(rule.alphabet(), r_eff + 1, [&](const Word& w) {
    WordView nb(w.data(), rule.radius() + 1);
    if ((b_mask >> rule(nb)) & 1u) counts[count_members(w, a_mask)] += 1;
  });
  return counts;
}

inline Word brute_image(const LocalRule& rule, const Word& w) {
  Word out;
  for (std::size_t i = 0; i + rule.radius() < w.size(); ++i) out.push_back(rule(WordView(w.data() + i, rule.radius() + 1)));
  return out;
}

// Balance: every word of length 1..max_len has q^r preimages.
inline bool balanced_up_to(const LocalRule& rule, int max_len) {
  const int q = rule.alphabet();
  std::uint64_t expected = 1;
  for (int i = 0; i < rule.radius(); ++i) expected *= q;
  for (int len = 1; len <= max_len; ++len) {
    std::map<Word, std::uint64_t> counts;
    for_each_word(q, len + rule.radius(), [&](const Word& w) { ++counts[brute_image(rule, w)]; });
    std::uint64_t words = 1;
    for (int i = 0; i < len; ++i) words *= q;
    if (counts.size() != words) return false;
    for (const auto& [_, c] : counts)
      if (c != expected) return false;
  }
  return true;
}

// Sum over preimage words of the product of symbol probabilities.
inline Rational brute_product_pushforward(const LocalRule& rule, const std::vector<Rational>& probs, const Word& u) {
  Rational total = 0;
  for_each_word(rule.alphabet(), u.size() + rule.radius(), [&](const Word& w) {
    if (brute_image(rule, w) != u) return;
    Rational v = 1;
    for (Symbol s : w) v *= probs[s];
    total += v;
  });
  return total;
}

}  // namespace testsupport
