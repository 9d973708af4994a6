#include "symfreq/correlation.hpp"

#include <algorithm>
#include <bit>

namespace symfreq {

namespace {

void check_sets(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set) {
  if (a_set.alphabet() != rule.alphabet() || b_set.alphabet() != rule.alphabet())
    throw std::invalid_argument("symbol sets and rule use different alphabets");
}

BigInt power_with_zero(int base, int m) {
  // 0^0 = 1
  return ipow(BigInt(base), static_cast<unsigned long>(m));
}

}  // namespace

BigInt Histogram::total() const {
  BigInt t = 0;
  for (const auto& c : counts) t += c;
  return t;
}

Histogram histogram(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set, int r_eff) {
  check_sets(rule, a_set, b_set);
  if (r_eff < rule.radius())
    throw std::invalid_argument("histogram radius " + std::to_string(r_eff) + " below rule radius " +
                                std::to_string(rule.radius()));
  const int q = rule.alphabet();
  const int r = rule.radius();
  const int a = a_set.size();

  // Counts over the rule's own neighborhoods.
  std::vector<BigInt> base(r + 2, 0);
  std::uint64_t idx = 0;
  Word w(r + 1, 0);
  for (; idx < rule.neighborhood_count(); ++idx) {
    if (b_set.contains(rule.at(idx))) base[count_in(w, a_set)] += 1;
    for (std::size_t j = w.size(); j-- > 0;) {
      if (++w[j] < q) break;
      w[j] = 0;
    }
  }

  // The e = r_eff - r ignored cells contribute j A-symbols in
  // binom(e, j) |A|^j (q-|A|)^(e-j) ways.
  const int e = r_eff - r;
  Histogram h{q, r_eff, a_set, b_set, std::vector<BigInt>(r_eff + 2, 0)};
  for (int j = 0; j <= e; ++j) {
    BigInt ways = binomial(e, j) * ipow(BigInt(a), j) * ipow(BigInt(q - a), e - j);
    if (ways == 0) continue;
    for (int k = 0; k <= r + 1; ++k)
      if (base[k] != 0) h.counts[k + j] += base[k] * ways;
  }
  return h;
}

Histogram identity_histogram(int q, const SymbolSet& a_set, int r) {
  return histogram(LocalRule::identity(q), a_set, a_set, r);
}

BigInt moment(const Histogram& h, int m) {
  if (m < 0) throw std::invalid_argument("negative correlation order");
  BigInt c = 0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) c += power_with_zero(static_cast<int>(k), m) * h.counts[k];
  return c;
}

BigInt correlation(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set, int r_eff, int m) {
  return moment(histogram(rule, a_set, b_set, r_eff), m);
}

std::vector<std::vector<Rational>> correlation_ladder(const LocalRule& rule, const SymbolSet& a_set,
                                                      const SymbolSet& b_set, int r_eff, int m) {
  if (m < 0) throw std::invalid_argument("negative correlation order");
  const int r = rule.radius();
  if (r_eff < r) throw std::invalid_argument("ladder top below rule radius");
  const int q = rule.alphabet();
  const int a = a_set.size();

  std::vector<std::vector<Rational>> ladder(r_eff + 1, std::vector<Rational>(m + 1));
  for (int s = r; s <= r_eff; ++s) {
    Histogram h = histogram(rule, a_set, b_set, s);
    for (int i = 0; i <= m; ++i) ladder[s][i] = Rational(moment(h, i));
  }
  // C(s, i) = (C(s+1, i) - |A| sum_{j<i} binom(i, j) C(s, j)) / q
  for (int s = r - 1; s >= 0; --s) {
    for (int i = 0; i <= m; ++i) {
      Rational acc = 0;
      for (int j = 0; j < i; ++j) acc += Rational(binomial(i, j)) * ladder[s][j];
      ladder[s][i] = (ladder[s + 1][i] - a * acc) / q;
    }
  }
  return ladder;
}

Rational normalized_correlation(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set, int m) {
  return correlation_ladder(rule, a_set, b_set, rule.radius(), m)[0][m];
}

Rational normalized_correlation_closed_form(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set) {
  const int q = rule.alphabet();
  const int r = rule.radius();
  Histogram h = histogram(rule, a_set, b_set);
  Rational c1(moment(h, 1), ipow(BigInt(q), r));
  c1.canonicalize();
  Rational tail(BigInt(r) * a_set.size() * h.total(), ipow(BigInt(q), r + 1));
  tail.canonicalize();
  return c1 - tail;
}

Rational normalized_correlation_balanced_form(const LocalRule& rule, const SymbolSet& a_set, const SymbolSet& b_set) {
  const int q = rule.alphabet();
  const int r = rule.radius();
  Rational c1(correlation(rule, a_set, b_set, r, 1), ipow(BigInt(q), r));
  c1.canonicalize();
  Rational tail(BigInt(r) * a_set.size() * b_set.size(), q);
  tail.canonicalize();
  return c1 - tail;
}

BigInt identity_correlation(int q, int a_size, int r, int m) {
  if (a_size < 0 || a_size > q || r < 0) throw std::invalid_argument("identity_correlation: bad arguments");
  if (m == 1) {
    if (r == 0) return a_size;
    return BigInt(q + r * a_size) * a_size * ipow(BigInt(q), r - 1);
  }
  std::uint64_t mask = (std::uint64_t{1} << a_size) - 1;
  return moment(identity_histogram(q, SymbolSet(q, mask), r), m);
}

Rational weighted_square_sum(int n, const Rational& a) {
  if (n < 0) throw std::invalid_argument("weighted_square_sum: negative n");
  if (n == 0) return 0;
  if (n == 1) return a;
  return Rational(n) * a * (n * a + 1) * rpow(a + 1, n - 2);
}

BigInt finite_correlation(const LocalRule& rule, const SymbolSet& a_set, int n, std::uint64_t max_words) {
  if (n < 1) throw std::invalid_argument("finite_correlation needs n >= 1");
  if (a_set.alphabet() != rule.alphabet()) throw std::invalid_argument("alphabet mismatch");
  const int q = rule.alphabet();
  const int length = n + rule.radius();
  const std::uint64_t words = saturating_pow(q, length);
  if (words > max_words)
    throw LimitExceeded("finite_correlation: q^(n+r) = " + std::to_string(words) + " exceeds " +
                        std::to_string(max_words));

  BigInt total = 0;
  if (q == 2 && length <= 64) {
    const std::uint64_t ones_mask = a_set.contains(1) ? ~std::uint64_t{0} : 0;
    const std::uint64_t zero_in_a = a_set.contains(0);
    const std::uint64_t window = length == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1;
    const std::uint64_t image_window = (std::uint64_t{1} << n) - 1;
    std::uint64_t acc = 0;
    for (std::uint64_t bits = 0; bits < words; ++bits) {
      const std::uint64_t img = apply_packed(rule, bits, length);
      const int wa = std::popcount(bits & ones_mask) + static_cast<int>(zero_in_a) * std::popcount(~bits & window);
      const int fa = std::popcount(img & ones_mask) +
                     static_cast<int>(zero_in_a) * std::popcount(~img & image_window);
      acc += static_cast<std::uint64_t>(wa) * fa;
    }
    total = BigInt(std::to_string(acc));
    return total;
  }

  Word w(length, 0);
  std::uint64_t acc = 0;
  for (std::uint64_t i = 0; i < words; ++i) {
    acc += static_cast<std::uint64_t>(count_in(w, a_set)) * count_in(apply_word(rule, w), a_set);
    for (std::size_t j = w.size(); j-- > 0;) {
      if (++w[j] < q) break;
      w[j] = 0;
    }
  }
  return BigInt(std::to_string(acc));
}

OneDominationReport check_one_domination(const LocalRule& rule, std::optional<SymbolSet> a_set) {
  OneDominationReport report;
  report.surjective = is_surjective(rule);
  std::vector<SymbolSet> sets = a_set ? std::vector<SymbolSet>{*a_set}
                                      : SymbolSet::nonempty_proper_subsets(rule.alphabet());
  bool first = true;
  for (const SymbolSet& a : sets) {
    BigInt value = correlation(rule, a, a, rule.radius(), 1);
    BigInt id = identity_correlation(rule.alphabet(), a.size(), rule.radius());
    BigInt diff = id - value;
    if (first || diff < report.margin) report.margin = diff;
    first = false;
    if (value > id) report.holds = false;
    report.entries.push_back({a, value, id});
  }
  return report;
}

HighDominationReport check_high_domination(const LocalRule& rule, const SymbolSet& a_set, int m_max) {
  HighDominationReport report;
  report.surjective = is_surjective(rule);
  const Histogram hf = histogram(rule, a_set, a_set);
  const Histogram hid = identity_histogram(rule.alphabet(), a_set, rule.radius());

  for (int k = static_cast<int>(hf.counts.size()) - 1; k >= 0; --k) {
    if (hf.counts[k] != hid.counts[k]) {
      report.k0 = k;
      break;
    }
  }
  if (!report.k0) {
    report.m_star = 0;
    return report;
  }
  const int k0 = *report.k0;
  report.strict_at_k0 = hf.counts[k0] < hid.counts[k0];
  if (!report.strict_at_k0) return report;

  const BigInt lead = hid.counts[k0] - hf.counts[k0];
  std::vector<BigInt> rule_moments(m_max + 1), id_moments(m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    rule_moments[m] = moment(hf, m);
    id_moments[m] = moment(hid, m);
  }
  // dominated_from[m]: C_F(m') <= C_id(m') for all m' in [m, m_max].
  std::vector<bool> dominated_from(m_max + 2, true);
  for (int m = m_max; m >= 0; --m) dominated_from[m] = dominated_from[m + 1] && rule_moments[m] <= id_moments[m];

  for (int m = 0; m <= m_max; ++m) {
    BigInt rest = 0;
    for (int i = 0; i < k0; ++i) rest += abs(BigInt(hid.counts[i] - hf.counts[i])) * power_with_zero(i, m);
    if (lead * power_with_zero(k0, m) > rest && dominated_from[m]) {
      report.m_star = m;
      break;
    }
  }
  return report;
}

PrefixSumReport check_prefix_sum_conjecture(const LocalRule& rule) {
  if (rule.alphabet() != 2) throw std::invalid_argument("prefix-sum conjecture is stated for binary rules");
  PrefixSumReport report;
  report.surjective = is_surjective(rule);
  const SymbolSet one = SymbolSet::of(2, {1});
  const Histogram hf = histogram(rule, one, one);
  const Histogram hid = identity_histogram(2, one, rule.radius());
  BigInt sf = 0, sid = 0;
  for (std::size_t n = 0; n < hf.counts.size(); ++n) {
    sf += hf.counts[n];
    sid += hid.counts[n];
    report.rule_prefix.push_back(sf);
    report.identity_prefix.push_back(sid);
    if (sf < sid && report.holds) {
      report.holds = false;
      report.witness_n = static_cast<int>(n);
    }
  }
  return report;
}

Rational average_normalized_correlation(int q, int r, const SymbolSet& a_set, const SymbolSet& b_set,
                                        std::uint64_t limit) {
  RuleSpace space(q, r, limit);
  Rational sum = 0;
  for (std::uint64_t i = 0; i < space.size(); ++i) sum += normalized_correlation(space.at(i), a_set, b_set, 1);
  return sum / Rational(BigInt(std::to_string(space.size())));
}

std::optional<PeriodicWitness> find_conservation_violation(const LocalRule& rule, const SymbolSet& a_set,
                                                           int max_period) {
  const int q = rule.alphabet();
  const int r = rule.radius();
  for (int p = 1; p <= max_period; ++p) {
    const std::uint64_t configs = saturating_pow(q, p);
    if (configs > kDefaultEnumerationLimit)
      throw LimitExceeded("periodic search: q^p = " + std::to_string(configs) + " configurations at period " +
                          std::to_string(p));
    if (q == 2 && p + r <= 64) {
      // Packed path: bit i of `bits` is cell i of the period word.
      const bool zero_in_a = a_set.contains(0), one_in_a = a_set.contains(1);
      const std::uint64_t pmask = p == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << p) - 1;
      for (std::uint64_t idx = 0; idx < configs; ++idx) {
        // Lexicographic order: the first cell is the most significant digit.
        std::uint64_t bits = 0;
        for (int i = 0; i < p; ++i) bits |= ((idx >> (p - 1 - i)) & 1u) << i;
        std::uint64_t ext = bits;
        for (int i = p; i < p + r; ++i) ext |= ((bits >> (i % p)) & 1u) << i;
        const std::uint64_t img = apply_packed(rule, ext, p + r) & pmask;
        auto count = [&](std::uint64_t v) {
          return (one_in_a ? std::popcount(v) : 0) + (zero_in_a ? p - std::popcount(v) : 0);
        };
        if (count(bits) != count(img)) {
          Word period = index_word(idx, p, 2);
          return PeriodicWitness{period, apply_periodic(rule, period)};
        }
      }
      continue;
    }
    for (std::uint64_t idx = 0; idx < configs; ++idx) {
      Word period = index_word(idx, p, q);
      Word image = apply_periodic(rule, period);
      if (count_in(period, a_set) != count_in(image, a_set)) return PeriodicWitness{period, image};
    }
  }
  return std::nullopt;
}

ConservationReport conserves_symbols(const LocalRule& rule, const SymbolSet& a_set, std::optional<int> max_period) {
  ConservationReport report;
  report.surjective = is_surjective(rule);
  report.histograms_equal =
      histogram(rule, a_set, a_set) == identity_histogram(rule.alphabet(), a_set, rule.radius());
  report.periods_searched = max_period.value_or(3 * (rule.radius() + 1));
  report.witness = find_conservation_violation(rule, a_set, report.periods_searched);

  if (report.surjective) {
    report.verdict = report.histograms_equal ? Conservation::conserves : Conservation::violates;
  } else if (report.witness || !report.histograms_equal) {
    // Histogram equality is necessary for conservation whatever the rule.
    report.verdict = Conservation::violates;
  } else {
    report.verdict = Conservation::unknown;
  }
  return report;
}

const char* to_string(Conservation c) {
  switch (c) {
    case Conservation::conserves: return "conserves";
    case Conservation::violates: return "violates";
    case Conservation::unknown: return "unknown";
  }
  return "unknown";
}

}  // namespace symfreq
