#include "symfreq/ca_core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace symfreq {

namespace {

int symbol_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return 10 + (c - 'a');
  if (c >= 'A' && c <= 'Z') return 10 + (c - 'A');
  return -1;
}

void check_alphabet(int q) {
  if (q < 2 || q > kMaxAlphabet)
    throw std::invalid_argument("alphabet size must be in [2, " + std::to_string(kMaxAlphabet) +
                                "], got " + std::to_string(q));
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exponent, std::uint64_t limit,
                          const char* what) {
  std::uint64_t v = saturating_pow(base, exponent);
  if (v > limit)
    throw LimitExceeded(std::string(what) + ": " + std::to_string(base) + "^" +
                        std::to_string(exponent) + " exceeds limit " + std::to_string(limit));
  return v;
}

}  // namespace

char symbol_char(Symbol s) {
  return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10));
}

Word parse_word(std::string_view text, int q) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    int v = symbol_value(c);
    if (v < 0 || v >= q)
      throw std::invalid_argument("symbol '" + std::string(1, c) + "' not in alphabet of size " +
                                  std::to_string(q));
    w.push_back(static_cast<Symbol>(v));
  }
  return w;
}

std::string format_word(WordView w) {
  std::string s;
  s.reserve(w.size());
  for (Symbol c : w) s.push_back(symbol_char(c));
  return s;
}

// --- SymbolSet -------------------------------------------------------------

SymbolSet::SymbolSet(int q, std::uint64_t mask) : q_(q), mask_(mask) {
  check_alphabet(q);
  std::uint64_t full = q == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << q) - 1;
  if (mask & ~full) throw std::invalid_argument("symbol set has members outside the alphabet");
}

SymbolSet SymbolSet::of(int q, std::initializer_list<int> members) {
  std::uint64_t mask = 0;
  for (int m : members) {
    if (m < 0 || m >= q) throw std::invalid_argument("symbol " + std::to_string(m) + " out of range");
    mask |= std::uint64_t{1} << m;
  }
  return SymbolSet(q, mask);
}

SymbolSet SymbolSet::all(int q) { return SymbolSet(q, (std::uint64_t{1} << q) - 1); }

SymbolSet SymbolSet::parse(int q, std::string_view text) {
  std::uint64_t mask = 0;
  bool separated = text.find(',') != std::string_view::npos;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    int v = -1;
    if (token.size() == 1) {
      v = symbol_value(token[0]);
    } else if (std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      v = std::stoi(token);
    }
    if (v < 0 || v >= q) throw std::invalid_argument("bad symbol '" + token + "' in set");
    mask |= std::uint64_t{1} << v;
    token.clear();
  };
  for (char c : text) {
    if (c == '{' || c == '}' || std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == ',') {
      flush();
      continue;
    }
    token.push_back(c);
    if (!separated) flush();
  }
  flush();
  return SymbolSet(q, mask);
}

std::vector<SymbolSet> SymbolSet::nonempty_proper_subsets(int q) {
  check_alphabet(q);
  if (q > 20) throw LimitExceeded("too many subsets for alphabet size " + std::to_string(q));
  std::vector<SymbolSet> out;
  std::uint64_t full = (std::uint64_t{1} << q) - 1;
  for (std::uint64_t m = 1; m < full; ++m) out.emplace_back(q, m);
  return out;
}

int SymbolSet::size() const { return std::popcount(mask_); }

SymbolSet SymbolSet::complement() const {
  return SymbolSet(q_, ~mask_ & ((std::uint64_t{1} << q_) - 1));
}

std::string SymbolSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int a = 0; a < q_; ++a) {
    if (!contains(static_cast<Symbol>(a))) continue;
    if (!first) s += ",";
    s += std::to_string(a);
    first = false;
  }
  return s + "}";
}

int count_in(WordView w, const SymbolSet& set) {
  int k = 0;
  for (Symbol s : w) k += set.contains(s);
  return k;
}

// --- LocalRule -------------------------------------------------------------

LocalRule::LocalRule(int q, int radius, std::vector<Symbol> table)
    : q_(q), radius_(radius), table_(std::move(table)) {
  check_alphabet(q);
  if (radius < 0) throw std::invalid_argument("radius must be non-negative");
  std::uint64_t expected = checked_pow(q, static_cast<std::uint64_t>(radius) + 1,
                                       kDefaultEnumerationLimit, "rule table size");
  if (table_.size() != expected)
    throw std::invalid_argument("rule table has " + std::to_string(table_.size()) +
                                " entries, expected " + std::to_string(expected));
  for (Symbol s : table_)
    if (s >= q) throw std::invalid_argument("rule table entry out of alphabet");
}

LocalRule LocalRule::identity(int q) {
  std::vector<Symbol> t(q);
  for (int a = 0; a < q; ++a) t[a] = static_cast<Symbol>(a);
  return LocalRule(q, 0, std::move(t));
}

LocalRule LocalRule::shift(int q) {
  std::vector<Symbol> t(static_cast<std::size_t>(q) * q);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<Symbol>(i % q);
  return LocalRule(q, 1, std::move(t));
}

LocalRule LocalRule::from_function(int q, int radius, const std::function<Symbol(WordView)>& f) {
  check_alphabet(q);
  std::uint64_t n = checked_pow(q, static_cast<std::uint64_t>(radius) + 1, kDefaultEnumerationLimit,
                                "rule table size");
  std::vector<Symbol> t(n);
  for (std::uint64_t i = 0; i < n; ++i) t[i] = f(index_word(i, radius + 1, q));
  return LocalRule(q, radius, std::move(t));
}

Symbol LocalRule::operator()(WordView neighborhood) const {
  if (neighborhood.size() != window())
    throw std::invalid_argument("neighborhood length mismatch");
  return table_[word_index(neighborhood, q_)];
}

LocalRule LocalRule::with_radius(int r_eff) const {
  if (r_eff < radius_) throw std::invalid_argument("cannot shrink a rule's radius");
  std::uint64_t extra = saturating_pow(q_, r_eff - radius_);
  std::vector<Symbol> t;
  t.reserve(table_.size() * extra);
  for (Symbol s : table_) t.insert(t.end(), extra, s);
  return LocalRule(q_, r_eff, std::move(t));
}

LocalRule parse_rule(std::string_view text) {
  std::istringstream in{std::string(text)};
  int q = 0, r = -1;
  std::string digits;
  if (!(in >> q >> r >> digits))
    throw std::invalid_argument("rule descriptor must be \"q r digits\", got '" + std::string(text) + "'");
  std::string rest;
  if (in >> rest) throw std::invalid_argument("trailing text in rule descriptor '" + std::string(text) + "'");
  check_alphabet(q);
  if (r < 0) throw std::invalid_argument("negative radius in rule descriptor");
  return LocalRule(q, r, parse_word(digits, q));
}

std::string format_table(const LocalRule& rule) { return format_word(rule.table()); }

std::string format_rule(const LocalRule& rule) {
  return std::to_string(rule.alphabet()) + " " + std::to_string(rule.radius()) + " " + format_table(rule);
}

std::vector<LocalRule> parse_rule_file(std::string_view contents) {
  std::vector<LocalRule> rules;
  std::istringstream in{std::string(contents)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rules.push_back(parse_rule(line));
  }
  return rules;
}

std::uint64_t word_index(WordView w, int q) {
  std::uint64_t idx = 0;
  for (Symbol s : w) idx = idx * q + s;
  return idx;
}

Word index_word(std::uint64_t index, std::size_t length, int q) {
  Word w(length);
  for (std::size_t i = length; i-- > 0;) {
    w[i] = static_cast<Symbol>(index % q);
    index /= q;
  }
  return w;
}

Word apply_word(const LocalRule& rule, WordView w) {
  const std::size_t win = rule.window();
  if (w.size() < win)
    throw std::invalid_argument("word of length " + std::to_string(w.size()) +
                                " too short for radius " + std::to_string(rule.radius()));
  const int q = rule.alphabet();
  for (Symbol s : w)
    if (s >= q) throw std::invalid_argument("word symbol out of alphabet");

  const std::uint64_t high = rule.neighborhood_count() / q;
  Word out(w.size() - rule.radius());
  std::uint64_t idx = word_index(w.first(win), q);
  out[0] = rule.at(idx);
  for (std::size_t i = 1; i < out.size(); ++i) {
    idx = (idx % high) * q + w[i + rule.radius()];
    out[i] = rule.at(idx);
  }
  return out;
}

Word iterate_word(const LocalRule& rule, WordView w, int steps) {
  if (steps < 0) throw std::invalid_argument("negative step count");
  if (w.size() < static_cast<std::size_t>(steps) * rule.radius() + 1)
    throw std::invalid_argument("word too short for " + std::to_string(steps) + " steps");
  Word cur(w.begin(), w.end());
  for (int t = 0; t < steps; ++t) cur = apply_word(rule, cur);
  return cur;
}

std::uint64_t apply_packed(const LocalRule& rule, std::uint64_t bits, int length) {
  if (rule.alphabet() != 2) throw std::invalid_argument("packed path is binary only");
  const int r = rule.radius();
  if (length > 64 || length < r + 1) throw std::invalid_argument("packed word length out of range");
  const std::uint64_t mask = rule.neighborhood_count() - 1;
  std::uint64_t out = 0;
  // idx holds cells i..i+r with cell i most significant.
  std::uint64_t idx = 0;
  for (int j = 0; j <= r; ++j) idx = (idx << 1) | ((bits >> j) & 1u);
  for (int i = 0; i + r < length; ++i) {
    if (i > 0) idx = ((idx << 1) | ((bits >> (i + r)) & 1u)) & mask;
    out |= static_cast<std::uint64_t>(rule.at(idx)) << i;
  }
  return out;
}

Word apply_periodic(const LocalRule& rule, WordView period) {
  if (period.empty()) throw std::invalid_argument("empty period");
  const std::size_t p = period.size();
  Word extended(p + rule.radius());
  for (std::size_t i = 0; i < extended.size(); ++i) extended[i] = period[i % p];
  return apply_word(rule, extended);
}

LocalRule compose(const LocalRule& f, const LocalRule& g) {
  if (f.alphabet() != g.alphabet()) throw std::invalid_argument("compose: alphabet mismatch");
  const int q = f.alphabet();
  const int radius = f.radius() + g.radius();
  std::uint64_t n = checked_pow(q, static_cast<std::uint64_t>(radius) + 1, kDefaultEnumerationLimit,
                                "composed table size");
  std::vector<Symbol> t(n);
  Word w(radius + 1, 0);
  for (std::uint64_t i = 0; i < n; ++i) {
    t[i] = apply_word(f, apply_word(g, w))[0];
    for (std::size_t j = w.size(); j-- > 0;) {
      if (++w[j] < q) break;
      w[j] = 0;
    }
  }
  return LocalRule(q, radius, std::move(t));
}

LocalRule power(const LocalRule& rule, int steps, std::uint64_t max_table) {
  if (steps < 0) throw std::invalid_argument("negative power");
  const std::uint64_t radius = static_cast<std::uint64_t>(steps) * rule.radius();
  checked_pow(rule.alphabet(), radius + 1, max_table, "power table size");
  LocalRule out = LocalRule::identity(rule.alphabet());
  for (int t = 0; t < steps; ++t) out = compose(rule, out);
  return out;
}

bool is_balanced(const LocalRule& rule) {
  std::vector<std::uint64_t> counts(rule.alphabet(), 0);
  for (Symbol s : rule.table()) ++counts[s];
  const std::uint64_t expected = rule.neighborhood_count() / rule.alphabet();
  return std::all_of(counts.begin(), counts.end(), [&](std::uint64_t c) { return c == expected; });
}

bool is_surjective(const LocalRule& rule) {
  const int q = rule.alphabet();
  const std::uint64_t states = saturating_pow(q, rule.radius());
  if (states > kMaxDeBruijnStates)
    throw LimitExceeded("surjectivity test needs q^r <= " + std::to_string(kMaxDeBruijnStates) +
                        ", got q^r = " + std::to_string(states));

  // succ[u*q + a]: de Bruijn vertices v reachable from u by an a-labelled edge.
  std::vector<std::uint32_t> succ(states * q, 0);
  for (std::uint64_t idx = 0; idx < rule.neighborhood_count(); ++idx) {
    const std::uint64_t u = idx / q;
    const std::uint64_t v = idx % states;
    succ[u * q + rule.at(idx)] |= std::uint32_t{1} << v;
  }

  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << states) - 1);
  std::vector<bool> seen(std::size_t{1} << states, false);
  std::vector<std::uint32_t> stack{full};
  seen[full] = true;
  while (!stack.empty()) {
    const std::uint32_t cur = stack.back();
    stack.pop_back();
    for (int a = 0; a < q; ++a) {
      std::uint32_t next = 0;
      for (std::uint32_t m = cur; m; m &= m - 1) next |= succ[std::countr_zero(m) * q + a];
      if (next == 0) return false;
      if (!seen[next]) {
        seen[next] = true;
        stack.push_back(next);
      }
    }
  }
  return true;
}

std::vector<Word> preimages(const LocalRule& rule, WordView u) {
  if (u.empty()) throw std::invalid_argument("preimages of the empty word");
  const int q = rule.alphabet();
  const int r = rule.radius();
  for (Symbol s : u)
    if (s >= q) throw std::invalid_argument("word symbol out of alphabet");

  std::vector<Word> out;
  Word w(u.size() + r);
  const std::uint64_t high = saturating_pow(q, r);
  // Fill the first r cells freely, then extend one cell per output symbol.
  std::function<void(std::size_t, std::uint64_t)> extend = [&](std::size_t i, std::uint64_t ctx) {
    if (i == u.size()) {
      out.push_back(w);
      return;
    }
    for (int s = 0; s < q; ++s) {
      const std::uint64_t idx = ctx * q + s;
      if (rule.at(idx) != u[i]) continue;
      w[i + r] = static_cast<Symbol>(s);
      extend(i + 1, idx % high);
    }
  };
  const std::uint64_t prefixes = high;
  for (std::uint64_t p = 0; p < prefixes; ++p) {
    Word prefix = index_word(p, r, q);
    std::copy(prefix.begin(), prefix.end(), w.begin());
    extend(0, p);
  }
  return out;
}

// --- enumeration -----------------------------------------------------------

RuleSpace::RuleSpace(int q, int radius, std::uint64_t limit) : q_(q), radius_(radius) {
  check_alphabet(q);
  if (radius < 0) throw std::invalid_argument("negative radius");
  const std::uint64_t entries = saturating_pow(q, static_cast<std::uint64_t>(radius) + 1);
  size_ = saturating_pow(q, entries);
  if (size_ > limit)
    throw LimitExceeded("rule space q=" + std::to_string(q) + " r=" + std::to_string(radius) +
                        " has " + (size_ == UINT64_MAX ? std::string("more than 2^64") : std::to_string(size_)) +
                        " tables, above the enumeration limit " + std::to_string(limit));
}

LocalRule RuleSpace::at(std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("rule index out of range");
  const std::uint64_t entries = saturating_pow(q_, static_cast<std::uint64_t>(radius_) + 1);
  return LocalRule(q_, radius_, index_word(index, entries, q_));
}

RuleEnumerator::RuleEnumerator(int q, int radius, bool surjective_only, std::uint64_t limit)
    : space_(q, radius, limit), surjective_only_(surjective_only) {}

RuleEnumerator::iterator::iterator(const RuleEnumerator* owner, std::uint64_t index)
    : owner_(owner), index_(index) {
  settle();
}

void RuleEnumerator::iterator::settle() {
  current_.reset();
  const RuleSpace& space = owner_->space_;
  for (; index_ < space.size(); ++index_) {
    LocalRule rule = space.at(index_);
    if (!owner_->surjective_only_ || is_surjective(rule)) {
      current_.emplace(std::move(rule));
      return;
    }
  }
}

RuleEnumerator::iterator& RuleEnumerator::iterator::operator++() {
  ++index_;
  settle();
  return *this;
}

}  // namespace symfreq
