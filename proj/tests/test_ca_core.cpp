#include "support.hpp"
#include "symfreq/ca_core.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace symfreq;
using namespace testsupport;

TEST_CASE("rule descriptors round trip and index neighborhoods leftmost-first") {
  const LocalRule x = parse_rule("2 1 0110");
  CHECK(x.alphabet() == 2);
  CHECK(x.radius() == 1);
  const Word w01{0, 1}, w11{1, 1};
  CHECK(x(w01) == 1);
  CHECK(x(w11) == 0);
  CHECK(format_rule(x) == "2 1 0110");
  CHECK(format_rule(parse_rule(" 3 0  120 ")) == "3 0 120");

  CHECK_THROWS_AS(parse_rule("2 1 011"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("2 1 0120"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("1 1 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("nonsense"), std::invalid_argument);
}

TEST_CASE("rule files skip comments and blank lines") {
  const auto rules = parse_rule_file("# header\n2 1 0110\n\n  3 0 012 # identity\n");
  REQUIRE(rules.size() == 2);
  CHECK(rules[1] == LocalRule::identity(3));
}

TEST_CASE("symbol sets") {
  CHECK(SymbolSet::parse(3, "0,2") == SymbolSet::of(3, {0, 2}));
  CHECK(SymbolSet::parse(3, "{0,2}") == SymbolSet::of(3, {0, 2}));
  CHECK(SymbolSet::parse(3, "02") == SymbolSet::of(3, {0, 2}));
  CHECK(SymbolSet::of(3, {1}).complement() == SymbolSet::of(3, {0, 2}));
  CHECK(SymbolSet::of(3, {0, 2}).to_string() == "{0,2}");
  CHECK(SymbolSet::nonempty_proper_subsets(3).size() == 6);
  CHECK_THROWS(SymbolSet::parse(2, "3"));
  const Word w{0, 1, 2, 2};
  CHECK(count_in(w, SymbolSet::of(3, {2})) == 2);
}

TEST_CASE("words and indices") {
  CHECK(format_word(parse_word("0a9", 11)) == "0a9");
  CHECK_THROWS(parse_word("012", 2));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const int q = 2 + static_cast<int>(rng() % 5);
    const Word w = random_word(rng, q, rng() % 8);
    CHECK(index_word(word_index(w, q), w.size(), q) == w);
  }
  CHECK(word_index(Word{1, 0}, 2) == 2);
}

TEST_CASE("applying a rule matches direct evaluation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int q = 2 + static_cast<int>(rng() % 3);
    const int r = static_cast<int>(rng() % 3);
    const LocalRule rule = random_rule(rng, q, r);
    const Word w = random_word(rng, q, r + 1 + rng() % 20);
    CHECK(apply_word(rule, w) == brute_image(rule, w));
    if (q == 2) {
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < w.size(); ++i) bits |= std::uint64_t{w[i]} << i;
      const std::uint64_t packed = apply_packed(rule, bits, static_cast<int>(w.size()));
      const Word img = apply_word(rule, w);
      for (std::size_t i = 0; i < img.size(); ++i) CHECK(((packed >> i) & 1u) == img[i]);
    }
  }
  CHECK(format_word(apply_word(xor_rule(), parse_word("0110", 2))) == "101");
  CHECK(format_word(apply_periodic(xor_rule(), parse_word("01", 2))) == "11");
  CHECK(iterate_word(xor_rule(), parse_word("0110", 2), 2) == parse_word("11", 2));
}

TEST_CASE("composition, powers and radius extension describe the same global maps") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int q = 2 + static_cast<int>(rng() % 2);
    const LocalRule f = random_rule(rng, q, static_cast<int>(rng() % 2) + 1);
    const LocalRule g = random_rule(rng, q, static_cast<int>(rng() % 3));
    const LocalRule fg = compose(f, g);
    CHECK(fg.radius() == f.radius() + g.radius());
    const Word w = random_word(rng, q, fg.radius() + 1 + rng() % 10);
    CHECK(apply_word(fg, w) == apply_word(f, apply_word(g, w)));
    const int t = static_cast<int>(rng() % 4);
    const Word v = random_word(rng, q, t * f.radius() + 1 + rng() % 6);
    CHECK(apply_word(power(f, t), v) == iterate_word(f, v, t));
    const LocalRule wide = f.with_radius(f.radius() + 2);
    const Word u = random_word(rng, q, wide.radius() + 5);
    const Word narrow = apply_word(f, u);
    CHECK(apply_word(wide, u) == Word(narrow.begin(), narrow.begin() + 5));
  }
  // The square of XOR reads cells 0 and 2.
  CHECK(format_table(power(xor_rule(), 2)) == "01011010");
  CHECK(power(xor_rule(), 0) == LocalRule::identity(2));
  CHECK_THROWS_AS(power(xor_rule(), 30, 1 << 10), LimitExceeded);
}

TEST_CASE("surjectivity agrees with the balance property on small rule spaces") {
  // Balance up to length 6 is the oracle; non-surjective rules here have short orphans.
  for (int r = 0; r <= 2; ++r) {
    RuleSpace space(2, r);
    for (std::uint64_t i = 0; i < space.size(); ++i) {
      const LocalRule rule = space.at(i);
      CHECK_MESSAGE(is_surjective(rule) == balanced_up_to(rule, 6), format_rule(rule));
    }
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const LocalRule rule = random_rule(rng, 3, 1);
    CHECK_MESSAGE(is_surjective(rule) == balanced_up_to(rule, 5), format_rule(rule));
  }
  CHECK(is_surjective(xor_rule()));
  CHECK(is_surjective(LocalRule::shift(3)));
  CHECK_FALSE(is_surjective(parse_rule("2 1 1111")));
  CHECK_THROWS_AS(is_surjective(LocalRule(2, 5, std::vector<Symbol>(64, 0))), LimitExceeded);
}

TEST_CASE("balanced rules and preimages") {
  CHECK(is_balanced(xor_rule()));
  CHECK_FALSE(is_balanced(parse_rule("2 1 0001")));
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const LocalRule rule = random_rule(rng, 2 + static_cast<int>(rng() % 2), static_cast<int>(rng() % 3));
    const Word u = random_word(rng, rule.alphabet(), 1 + rng() % 3);
    const auto pre = preimages(rule, u);
    CHECK(std::is_sorted(pre.begin(), pre.end()));
    std::size_t brute = 0;
    for_each_word(rule.alphabet(), u.size() + rule.radius(), [&](const Word& w) { brute += brute_image(rule, w) == u; });
    CHECK(pre.size() == brute);
    for (const auto& w : pre) CHECK(apply_word(rule, w) == u);
    if (is_surjective(rule)) {
      std::size_t expected = 1;
      for (int i = 0; i < rule.radius(); ++i) expected *= rule.alphabet();
      CHECK(pre.size() == expected);
    }
  }
}

TEST_CASE("rule spaces enumerate tables in lexicographic order") {
  RuleSpace space(2, 1);
  CHECK(space.size() == 16);
  CHECK(format_table(space.at(6)) == "0110");
  CHECK(format_table(space.at(0)) == "0000");
  CHECK(format_table(space.at(15)) == "1111");
  CHECK(RuleSpace(3, 0).size() == 27);
  CHECK_THROWS_AS(RuleSpace(2, 3, 1000), LimitExceeded);
  CHECK_THROWS_AS(space.at(16), std::out_of_range);

  std::size_t all = 0, surjective = 0;
  for (const auto& rule : enumerate_rules(2, 2, false)) {
    ++all;
    surjective += is_surjective(rule);
  }
  std::size_t filtered = 0;
  std::set<std::string> seen;
  for (const auto& rule : enumerate_rules(2, 2, true)) {
    ++filtered;
    CHECK(is_surjective(rule));
    seen.insert(format_table(rule));
  }
  CHECK(all == 256);
  CHECK(filtered == surjective);
  CHECK(seen.size() == filtered);
}
