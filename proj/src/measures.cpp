#include "symfreq/measures.hpp"

#include <sstream>

namespace symfreq {

namespace {

void check_probability(const Rational& p, const char* what) {
  if (p < 0 || p > 1) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void check_preimage_bound(int q, std::size_t length, std::uint64_t limit) {
  const std::uint64_t n = saturating_pow(q, length);
  if (n > limit)
    throw LimitExceeded("preimage enumeration: q^" + std::to_string(length) + " = " + std::to_string(n) +
                        " exceeds " + std::to_string(limit));
}

// Product measures: run over u keeping, for each content of the last r
// cells, the total mass of prefixes mapping onto u so far.
Rational product_pushforward(const LocalRule& rule, const std::vector<Rational>& probs, WordView u) {
  const int q = rule.alphabet();
  const int r = rule.radius();
  const std::uint64_t states = saturating_pow(q, r);
  std::vector<Rational> mass(states), next(states);
  for (std::uint64_t s = 0; s < states; ++s) {
    Rational v = 1;
    Word w = index_word(s, r, q);
    for (Symbol a : w) v *= probs[a];
    mass[s] = v;
  }
  for (Symbol target : u) {
    for (auto& v : next) v = 0;
    for (std::uint64_t s = 0; s < states; ++s) {
      if (mass[s] == 0) continue;
      for (int a = 0; a < q; ++a) {
        const std::uint64_t idx = s * q + a;
        if (rule.at(idx) != target || probs[a] == 0) continue;
        next[idx % states] += mass[s] * probs[a];
      }
    }
    std::swap(mass, next);
  }
  Rational total = 0;
  for (const auto& v : mass) total += v;
  return total;
}

}  // namespace

CylinderMeasure CylinderMeasure::uniform(int q) {
  if (q < 2 || q > kMaxAlphabet) throw std::invalid_argument("alphabet size out of range");
  CylinderMeasure m(q, MeasureKind::uniform);
  m.probs_.assign(q, Rational(1, q));
  return m;
}

CylinderMeasure CylinderMeasure::product(std::vector<Rational> probs) {
  const int q = static_cast<int>(probs.size());
  if (q < 2 || q > kMaxAlphabet) throw std::invalid_argument("alphabet size out of range");
  Rational sum = 0;
  for (auto& p : probs) {
    p.canonicalize();
    check_probability(p, "symbol probability");
    sum += p;
  }
  if (sum != 1) throw std::invalid_argument("symbol probabilities sum to " + to_string(sum) + ", not 1");
  CylinderMeasure m(q, MeasureKind::product);
  m.probs_ = std::move(probs);
  return m;
}

CylinderMeasure CylinderMeasure::bernoulli(const Rational& p) {
  check_probability(p, "Bernoulli parameter");
  return product({1 - p, p});
}

CylinderMeasure CylinderMeasure::dirac(int q, Symbol symbol) {
  if (q < 2 || q > kMaxAlphabet || symbol >= q) throw std::invalid_argument("bad Dirac measure");
  CylinderMeasure m(q, MeasureKind::dirac);
  m.probs_.assign(q, Rational(0));
  m.probs_[symbol] = 1;
  return m;
}

CylinderMeasure CylinderMeasure::split(const SymbolSet& a_set, const Rational& p) {
  const int q = a_set.alphabet();
  const int a = a_set.size();
  if (a == 0 || a == q) throw std::invalid_argument("split measure needs a nonempty proper subset");
  check_probability(p, "split parameter");
  std::vector<Rational> probs(q);
  for (int s = 0; s < q; ++s) probs[s] = a_set.contains(s) ? Rational(p / a) : Rational((1 - p) / (q - a));
  return product(std::move(probs));
}

CylinderMeasure CylinderMeasure::explicit_table(int q, std::vector<std::vector<Rational>> values) {
  if (q < 2 || q > kMaxAlphabet) throw std::invalid_argument("alphabet size out of range");
  if (values.empty() || values[0].size() != 1 || values[0][0] != 1)
    throw std::invalid_argument("explicit measure must give the empty cylinder mass 1");
  for (std::size_t len = 0; len < values.size(); ++len) {
    if (values[len].size() != saturating_pow(q, len))
      throw std::invalid_argument("explicit measure: level " + std::to_string(len) + " has wrong size");
    for (auto& v : values[len]) {
      v.canonicalize();
      check_probability(v, "cylinder value");
    }
  }
  for (std::size_t len = 0; len + 1 < values.size(); ++len) {
    for (std::uint64_t i = 0; i < values[len].size(); ++i) {
      Rational right = 0, left = 0;
      for (int a = 0; a < q; ++a) {
        right += values[len + 1][i * q + a];
        left += values[len + 1][a * values[len].size() + i];
      }
      if (right != values[len][i] || left != values[len][i])
        throw std::invalid_argument("explicit measure is not consistent at word " +
                                    format_word(index_word(i, len, q)));
    }
  }
  CylinderMeasure m(q, MeasureKind::explicit_table);
  m.table_ = std::move(values);
  return m;
}

std::optional<int> CylinderMeasure::depth() const {
  if (kind_ == MeasureKind::explicit_table) return static_cast<int>(table_.size()) - 1;
  return std::nullopt;
}

const std::vector<Rational>& CylinderMeasure::symbol_probabilities() const {
  if (!is_product()) throw std::logic_error("explicit measures have no product marginals");
  return probs_;
}

Rational CylinderMeasure::query(WordView u) const {
  for (Symbol s : u)
    if (s >= q_) throw std::invalid_argument("symbol outside the measure's alphabet");
  if (kind_ == MeasureKind::explicit_table) {
    if (u.size() >= table_.size())
      throw std::out_of_range("word of length " + std::to_string(u.size()) + " beyond explicit depth " +
                              std::to_string(table_.size() - 1));
    return table_[u.size()][word_index(u, q_)];
  }
  Rational v = 1;
  for (Symbol s : u) {
    v *= probs_[s];
    if (v == 0) break;
  }
  return v;
}

std::string CylinderMeasure::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case MeasureKind::uniform: out << "uniform(q=" << q_ << ")"; break;
    case MeasureKind::dirac:
      for (int s = 0; s < q_; ++s)
        if (probs_[s] == 1) out << "dirac(" << symbol_char(s) << ")";
      break;
    case MeasureKind::product:
      out << "product(";
      for (int s = 0; s < q_; ++s) out << (s ? "," : "") << to_string(probs_[s]);
      out << ")";
      break;
    case MeasureKind::explicit_table: out << "explicit(q=" << q_ << ",depth=" << table_.size() - 1 << ")"; break;
  }
  return out.str();
}

CylinderMeasure parse_measure(int q, std::string_view text) {
  auto parts = split_on(text, ':');
  const std::string& kind = parts[0];
  if (kind == "uniform" && parts.size() == 1) return CylinderMeasure::uniform(q);
  if (kind == "bernoulli" && parts.size() == 2) {
    if (q != 2) throw std::invalid_argument("bernoulli measures are binary; use product:... for q > 2");
    return CylinderMeasure::bernoulli(parse_rational(parts[1]));
  }
  if (kind == "product" && parts.size() == 2) {
    std::vector<Rational> probs;
    for (const auto& p : split_on(parts[1], ',')) probs.push_back(parse_rational(p));
    if (static_cast<int>(probs.size()) != q)
      throw std::invalid_argument("product measure needs " + std::to_string(q) + " probabilities");
    return CylinderMeasure::product(std::move(probs));
  }
  if (kind == "dirac" && parts.size() == 2) {
    Word s = parse_word(parts[1], q);
    if (s.size() != 1) throw std::invalid_argument("dirac needs one symbol");
    return CylinderMeasure::dirac(q, s[0]);
  }
  if (kind == "split" && parts.size() == 3)
    return CylinderMeasure::split(SymbolSet::parse(q, parts[1]), parse_rational(parts[2]));
  throw std::invalid_argument("unknown measure '" + std::string(text) +
                              "' (expected uniform, bernoulli:P, product:P0,..., dirac:S or split:A:P)");
}

Rational pushforward(const LocalRule& rule, const CylinderMeasure& mu, WordView u, std::uint64_t limit) {
  if (u.empty()) throw std::invalid_argument("pushforward needs a nonempty word");
  if (mu.alphabet() != rule.alphabet()) throw std::invalid_argument("measure and rule alphabets differ");
  check_preimage_bound(rule.alphabet(), u.size() + rule.radius(), limit);
  if (mu.is_product()) return product_pushforward(rule, mu.symbol_probabilities(), u);
  Rational total = 0;
  for (const Word& w : preimages(rule, u)) total += mu.query(w);
  return total;
}

Rational iterate_pushforward(const LocalRule& rule, const CylinderMeasure& mu, int steps, WordView u,
                             std::uint64_t limit) {
  if (steps < 0) throw std::invalid_argument("negative step count");
  if (steps == 0) return mu.query(u);
  check_preimage_bound(rule.alphabet(), u.size() + static_cast<std::size_t>(steps) * rule.radius(), limit);
  return pushforward(power(rule, steps, limit), mu, u, limit);
}

PushforwardMeasure::PushforwardMeasure(CylinderMeasure base, const LocalRule& rule, int steps, std::uint64_t limit)
    : base_(std::move(base)), composed_(power(rule, steps, limit)), steps_(steps), limit_(limit) {
  if (steps < 1) throw std::invalid_argument("pushforward measure needs at least one step");
  if (base_.alphabet() != rule.alphabet()) throw std::invalid_argument("measure and rule alphabets differ");
}

Rational PushforwardMeasure::query(WordView u) const {
  if (u.empty()) return 1;
  return pushforward(composed_, base_, u, limit_);
}

Rational preim_measure_formula(const LocalRule& rule, const SymbolSet& a_set, const Rational& p) {
  const int q = rule.alphabet();
  const int r = rule.radius();
  const int a = a_set.size();
  if (a == 0 || a == q) throw std::invalid_argument("formula needs a nonempty proper subset");
  if (p <= 0 || p >= 1) throw std::invalid_argument("formula needs 0 < p < 1");
  const Histogram h = histogram(rule, a_set, a_set);
  Rational total = 0;
  for (int l = 0; l <= r + 1; ++l) {
    Rational coeff = 0;
    for (int k = 0; k <= l; ++k) {
      Rational term(binomial(r + 1 - k, r + 1 - l) * h.counts[k],
                    ipow(BigInt(a), k) * ipow(BigInt(q - a), r + 1 - k));
      term.canonicalize();
      if ((l - k) % 2) coeff -= term;
      else coeff += term;
    }
    total += rpow(p, l) * coeff;
  }
  return total;
}

ContractionReport check_uniform_contraction(const LocalRule& rule, const CylinderMeasure& mu, int n,
                                            std::uint64_t limit) {
  if (n < 1) throw std::invalid_argument("contraction check needs n >= 1");
  const int q = rule.alphabet();
  check_preimage_bound(q, n + rule.radius(), limit);
  const Rational lambda = rpow(Rational(1, q), n);
  ContractionReport report{Rational(-1), Rational(-1), false, {}, {}};
  const std::uint64_t words = saturating_pow(q, n);
  for (std::uint64_t i = 0; i < words; ++i) {
    Word w = index_word(i, n, q);
    Rational image = abs(Rational(pushforward(rule, mu, w, limit) - lambda));
    Rational base = abs(Rational(mu.query(w) - lambda));
    if (image > report.lhs) {
      report.lhs = image;
      report.witness_u = w;
    }
    if (base > report.rhs) {
      report.rhs = base;
      report.witness_w = w;
    }
  }
  report.holds = report.lhs <= report.rhs;
  return report;
}

bool check_measure_invariance(const LocalRule& rule, const CylinderMeasure& mu, int depth, std::uint64_t limit) {
  const int q = rule.alphabet();
  for (int len = 1; len <= depth; ++len) {
    check_preimage_bound(q, len + rule.radius(), limit);
    const std::uint64_t words = saturating_pow(q, len);
    for (std::uint64_t i = 0; i < words; ++i) {
      Word u = index_word(i, len, q);
      if (pushforward(rule, mu, u, limit) != mu.query(u)) return false;
    }
  }
  return true;
}

namespace detail {
void check_entropy_bound(int q, int n, std::uint64_t limit) {
  const std::uint64_t words = saturating_pow(q, n);
  if (words > limit)
    throw LimitExceeded("block entropy: q^n = " + std::to_string(words) + " exceeds " + std::to_string(limit));
}
}  // namespace detail

}  // namespace symfreq
