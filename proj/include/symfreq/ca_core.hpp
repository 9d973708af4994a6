#pragma once

// One-dimensional cellular automata with right-extending neighborhoods.
//
// A rule of radius r over alphabet {0,...,q-1} maps a neighborhood word
// w_0 w_1 ... w_r to a symbol. Tables are indexed by the neighborhood read as
// a base-q number with w_0 most significant, so "2 1 0110" is XOR:
// f(00)=0, f(01)=1, f(10)=1, f(11)=0.

#include "symfreq/exact.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symfreq {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

inline constexpr int kMaxAlphabet = 36;

// Raised when a desk-scale guard (enumeration count, table size, preimage
// count) would be exceeded. The message names the guard and the request.
class LimitExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Symbols are written as 0-9 then a-z.
Word parse_word(std::string_view text, int q);
std::string format_word(WordView w);
char symbol_char(Symbol s);

class SymbolSet {
 public:
  SymbolSet(int q, std::uint64_t mask);
  static SymbolSet of(int q, std::initializer_list<int> members);
  static SymbolSet all(int q);
  // "0,2", "{0,2}" or "02".
  static SymbolSet parse(int q, std::string_view text);
  static std::vector<SymbolSet> nonempty_proper_subsets(int q);

  int alphabet() const { return q_; }
  std::uint64_t mask() const { return mask_; }
  bool contains(Symbol s) const { return (mask_ >> s) & 1u; }
  int size() const;
  bool empty() const { return mask_ == 0; }
  SymbolSet complement() const;
  std::string to_string() const;

  bool operator==(const SymbolSet&) const = default;

 private:
  int q_;
  std::uint64_t mask_;
};

int count_in(WordView w, const SymbolSet& set);

class LocalRule {
 public:
  LocalRule(int q, int radius, std::vector<Symbol> table);

  static LocalRule identity(int q);
  static LocalRule shift(int q);
  static LocalRule from_function(int q, int radius, const std::function<Symbol(WordView)>& f);

  int alphabet() const { return q_; }
  int radius() const { return radius_; }
  std::size_t window() const { return static_cast<std::size_t>(radius_) + 1; }
  std::size_t neighborhood_count() const { return table_.size(); }
  std::span<const Symbol> table() const { return table_; }

  Symbol at(std::size_t neighborhood_index) const { return table_[neighborhood_index]; }
  Symbol operator()(WordView neighborhood) const;

  // The same global map described as a radius-r_eff rule (extra cells ignored).
  LocalRule with_radius(int r_eff) const;

  bool operator==(const LocalRule&) const = default;

 private:
  int q_;
  int radius_;
  std::vector<Symbol> table_;
};

// "q r digits" with exactly q^(r+1) base-q digits.
LocalRule parse_rule(std::string_view text);
std::string format_rule(const LocalRule& rule);
std::string format_table(const LocalRule& rule);
// One descriptor per line; blank lines and '#' comments are skipped.
std::vector<LocalRule> parse_rule_file(std::string_view contents);

// Index of a word read as a base-q number, leftmost symbol most significant.
std::uint64_t word_index(WordView w, int q);
Word index_word(std::uint64_t index, std::size_t length, int q);

Word apply_word(const LocalRule& rule, WordView w);
Word iterate_word(const LocalRule& rule, WordView w, int steps);

// Binary fast path on words packed LSB-first (bit i = cell i), length <= 64.
std::uint64_t apply_packed(const LocalRule& rule, std::uint64_t bits, int length);
// Image of the periodic configuration with the given period word, one period.
Word apply_periodic(const LocalRule& rule, WordView period);

// f after g: radius f.r + g.r, g applied first.
LocalRule compose(const LocalRule& f, const LocalRule& g);
// Local rule of F^t (radius t*r); t = 0 gives the identity.
LocalRule power(const LocalRule& rule, int steps, std::uint64_t max_table = std::uint64_t{1} << 26);

bool is_balanced(const LocalRule& rule);

inline constexpr std::size_t kMaxDeBruijnStates = 16;
// Subset construction on the de Bruijn automaton; requires q^r <= 16.
bool is_surjective(const LocalRule& rule);

// All words w of length |u| + r with F(w) = u, in lexicographic order.
std::vector<Word> preimages(const LocalRule& rule, WordView u);

inline constexpr std::uint64_t kDefaultEnumerationLimit = std::uint64_t{1} << 26;

// The q^(q^(r+1)) rule tables of one (q, r), in lexicographic table order.
// Index i is the table read as a base-q number, first entry most significant.
class RuleSpace {
 public:
  RuleSpace(int q, int radius, std::uint64_t limit = kDefaultEnumerationLimit);

  int alphabet() const { return q_; }
  int radius() const { return radius_; }
  std::uint64_t size() const { return size_; }
  LocalRule at(std::uint64_t index) const;

 private:
  int q_;
  int radius_;
  std::uint64_t size_;
};

// Lazy stream over a RuleSpace, optionally filtered to surjective rules.
class RuleEnumerator {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = LocalRule;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    const LocalRule& operator*() const { return *current_; }
    const LocalRule* operator->() const { return &*current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(std::default_sentinel_t) const { return !current_.has_value(); }

   private:
    friend class RuleEnumerator;
    iterator(const RuleEnumerator* owner, std::uint64_t index);
    void settle();

    const RuleEnumerator* owner_ = nullptr;
    std::uint64_t index_ = 0;
    std::optional<LocalRule> current_;
  };

  RuleEnumerator(int q, int radius, bool surjective_only,
                 std::uint64_t limit = kDefaultEnumerationLimit);

  iterator begin() const { return iterator(this, 0); }
  std::default_sentinel_t end() const { return {}; }
  const RuleSpace& space() const { return space_; }

 private:
  RuleSpace space_;
  bool surjective_only_;
};

inline RuleEnumerator enumerate_rules(int q, int radius, bool surjective_only,
                                      std::uint64_t limit = kDefaultEnumerationLimit) {
  return RuleEnumerator(q, radius, surjective_only, limit);
}

}  // namespace symfreq
