// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run everything
//   acceptance 3 9b 14    run selected criteria
//
// Exit status is 0 only if every selected criterion passes.

#include "support.hpp"
#include "symfreq/correlation.hpp"
#include "symfreq/experiments.hpp"
#include "symfreq/intervals.hpp"
#include "symfreq/measures.hpp"
#include "symfreq/sampler.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

using namespace symfreq;
using namespace testsupport;

namespace {

// Pinned seeds, sizes and tolerances.
constexpr std::uint64_t kRandomRuleSeed = 20240601;
constexpr int kRandomRules = 100;
constexpr int kMaxOrder = 3;
constexpr int kConservationPeriods = 12;
constexpr std::uint64_t kFnSeed = 31;
constexpr std::uint64_t kFnWindows = 1000;
constexpr std::uint64_t kXorSeed = 7;
constexpr std::uint64_t kXorSamples = 10000;
constexpr int kXorLevels = 5;
constexpr double kGapInStandardErrors = 3.0;
constexpr int kXorMaxWindow = 20;
constexpr int kXorMaxSteps = 8;
constexpr int kInvarianceDepth = 5;

Rational ratio(long num, long den) {
  Rational x(num, den);
  x.canonicalize();
  return x;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

struct Criterion {
  std::string id;
  std::string title;
  double seconds_limit;  // 0: no time bound
  std::function<Outcome()> run;
};

std::string join_counts(const std::vector<BigInt>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s + ")";
}

Outcome ternary_example() {
  const LocalRule f = example_ternary_rule();
  const SymbolSet a = SymbolSet::of(3, {0}), b = SymbolSet::of(3, {0, 2});
  const Histogram h = histogram(f, a, b);
  const BigInt c = moment(h, 1);
  const Rational cn = normalized_correlation(f, a, b);
  const std::vector<BigInt> expected{8, 10, 2, 1};
  const bool ok = h.counts == expected && c == 17 && cn == Rational(1, 3) &&
                  normalized_correlation_closed_form(f, a, b) == Rational(1, 3);
  return {ok, "histogram " + join_counts(h.counts) + ", C=" + to_string(c) + ", normalized " + to_string(cn)};
}

Outcome flipped_pair() {
  const SymbolSet one = SymbolSet::of(2, {1});
  const LocalRule f = at_most_two_ones(), g = exactly_two_ones();
  const BigInt cf = correlation(f, one, one, 2, 1), cg = correlation(g, one, one, 2, 1);
  const Rational nf = normalized_correlation(f, one, one), ng = normalized_correlation(g, one, one);
  const bool ok = cf == 9 && cg == 6 && nf == Rational(1, 2) && ng == Rational(3, 4);
  return {ok, "C(F)=" + to_string(cf) + ", C(G)=" + to_string(cg) + ", normalized " + to_string(nf) + " and " +
                  to_string(ng)};
}

std::string tally_text(const SweepResult& res) {
  std::string s;
  for (const auto& t : res.tallies)
    s += " r=" + std::to_string(t.radius) + ":" + std::to_string(t.surjective) + "/" + std::to_string(t.rules);
  return s;
}

Outcome one_domination_sweep() {
  SweepConfig c;
  c.q = 2;
  c.r_min = 0;
  c.r_max = 3;
  c.a_text = "1";
  const SweepResult res = run_sweep(c);
  const bool ids = identity_correlation(2, 1, 1) == 3 && identity_correlation(2, 1, 2) == 8 &&
                   identity_correlation(2, 1, 3) == 20;
  return {res.violations == 0 && ids && res.surjective > 0,
          std::to_string(res.violations) + " violations; surjective/all" + tally_text(res) +
              "; identity values 3,8,20 " + (ids ? "confirmed" : "WRONG")};
}

Outcome prefix_sum_sweep() {
  SweepConfig c;
  c.q = 2;
  c.r_min = 0;
  c.r_max = 3;
  c.check = SweepCheck::prefix_sums;
  const SweepResult res = run_sweep(c);
  return {res.violations == 0 && res.surjective > 0,
          std::to_string(res.violations) + " counterexamples; surjective/all" + tally_text(res)};
}

Outcome averages() {
  struct Case {
    int q, r;
    SymbolSet a, b;
  };
  const std::vector<Case> cases{{2, 1, SymbolSet::of(2, {1}), SymbolSet::of(2, {1})},
                                {2, 2, SymbolSet::of(2, {1}), SymbolSet::of(2, {1})},
                                {3, 0, SymbolSet::of(3, {0}), SymbolSet::of(3, {0, 2})},
                                {3, 1, SymbolSet::of(3, {1}), SymbolSet::of(3, {0})}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const Rational avg = average_normalized_correlation(c.q, c.r, c.a, c.b);
    const Rational expected = ratio(c.a.size() * c.b.size(), c.q);
    ok = ok && avg == expected;
    detail += (detail.empty() ? "" : "; ") + std::string("q=") + std::to_string(c.q) + ",r=" + std::to_string(c.r) +
              ": " + to_string(avg) + (avg == expected ? "" : " expected " + to_string(expected));
  }
  return {ok, detail};
}

SymbolSet random_subset(std::mt19937_64& rng, int q) { return SymbolSet(q, 1 + rng() % ((1u << q) - 2)); }

Outcome recursion_and_closed_forms() {
  std::mt19937_64 rng(kRandomRuleSeed);
  int recursion_checks = 0, closed_checks = 0, balanced_checks = 0, failures = 0;
  for (int trial = 0; trial < kRandomRules; ++trial) {
    const int q = 2 + static_cast<int>(rng() % 2);
    const int r = static_cast<int>(rng() % 3);
    const LocalRule rule = random_rule(rng, q, r);
    const SymbolSet a = random_subset(rng, q), b = random_subset(rng, q);
    // Moments from brute-force histograms at radii r..r+2.
    std::vector<std::vector<BigInt>> mom(3, std::vector<BigInt>(kMaxOrder + 1));
    for (int s = 0; s < 3; ++s) {
      const auto h = brute_histogram(rule, a.mask(), b.mask(), r + s);
      for (int m = 0; m <= kMaxOrder; ++m) {
        BigInt c = 0;
        for (std::size_t k = 0; k < h.size(); ++k) c += ipow(BigInt(static_cast<long>(k)), m) * h[k];
        mom[s][m] = c;
      }
    }
    for (int s = 0; s < 2; ++s)
      for (int m = 0; m <= kMaxOrder; ++m) {
        BigInt rhs = q * mom[s][m];
        for (int i = 0; i < m; ++i) rhs += a.size() * binomial(m, i) * mom[s][i];
        failures += mom[s + 1][m] != rhs;
        ++recursion_checks;
      }
    for (int m = 0; m <= kMaxOrder; ++m) {
      failures += normalized_correlation(rule.with_radius(r + 2), a, b, m) != normalized_correlation(rule, a, b, m);
      ++recursion_checks;
    }
    const Rational value = normalized_correlation(rule, a, b, 1);
    // Neighborhoods mapping into B, counted directly.
    BigInt preimage_size = 0;
    for (const auto& c : brute_histogram(rule, a.mask(), b.mask(), r)) preimage_size += c;
    const Rational closed_direct =
        Rational(mom[0][1]) / Rational(ipow(BigInt(q), r)) -
        Rational(BigInt(r) * a.size() * preimage_size) / Rational(ipow(BigInt(q), r + 1));
    failures += value != closed_direct;
    failures += normalized_correlation_closed_form(rule, a, b) != closed_direct;
    ++closed_checks;
    if (is_balanced(rule)) {
      const Rational balanced = Rational(mom[0][1]) / Rational(ipow(BigInt(q), r)) -
                                ratio(r * a.size() * b.size(), q);
      failures += value != balanced;
      ++balanced_checks;
    }
  }
  return {failures == 0, std::to_string(recursion_checks) + " recursion checks, " + std::to_string(closed_checks) +
                             " closed-form checks, " + std::to_string(balanced_checks) + " balanced-form checks, " +
                             std::to_string(failures) + " mismatches"};
}

Outcome split_measure_formula() {
  std::mt19937_64 rng(kRandomRuleSeed + 1);
  int failures = 0, checks = 0;
  for (int trial = 0; trial < kRandomRules; ++trial) {
    const int q = 2 + static_cast<int>(rng() % 2);
    const LocalRule rule = random_rule(rng, q, static_cast<int>(rng() % 3));
    const SymbolSet a = random_subset(rng, q);
    for (const Rational p : {Rational(1, 3), Rational(1, 7), Rational(9, 10)}) {
      const auto mu = CylinderMeasure::split(a, p);
      // Direct value from the preimage enumeration oracle.
      Rational direct = 0;
      for (int s = 0; s < q; ++s)
        if (a.contains(s)) direct += brute_product_pushforward(rule, mu.symbol_probabilities(), Word{static_cast<Symbol>(s)});
      failures += preim_measure_formula(rule, a, p) != direct;
      ++checks;
    }
  }
  return {failures == 0, std::to_string(checks) + " (rule, p) pairs, " + std::to_string(failures) + " mismatches"};
}

Outcome conservation_cross_check() {
  int checked = 0, disagreements = 0;
  for (int r = 0; r <= 2; ++r)
    for (const auto& rule : enumerate_rules(2, r, true))
      for (const SymbolSet& a : SymbolSet::nonempty_proper_subsets(2)) {
        const auto rep = conserves_symbols(rule, a, kConservationPeriods);
        const bool periodic_conserves = !rep.witness.has_value();
        disagreements += rep.histograms_equal != periodic_conserves;
        disagreements += (rep.verdict == Conservation::conserves) != periodic_conserves;
        ++checked;
      }
  const auto t = conserves_symbols(ternary_nonconserving(), SymbolSet::of(3, {0}), kConservationPeriods);
  const bool witness_ok = t.histograms_equal && t.witness && format_word(t.witness->period) == "012" &&
                          format_word(t.witness->image) == "112";
  return {disagreements == 0 && witness_ok,
          std::to_string(checked) + " (rule, A) pairs, " + std::to_string(disagreements) +
              " disagreements; ternary witness " +
              (t.witness ? format_word(t.witness->period) + " -> " + format_word(t.witness->image) : "none")};
}

const FnExperimentResult& fn_batch() {
  static const FnExperimentResult result = [] {
    FnExperimentConfig c;
    c.n = 2;
    c.p = Rational(1, 50);
    c.windows = kFnWindows;
    c.seed = kFnSeed;
    return run_fn_experiment(c);
  }();
  return result;
}

std::string fn_context(const FnExperimentResult& r) {
  std::size_t medium = 0;
  for (const auto& row : r.rows) medium += row.medium;
  return std::to_string(r.rows.size()) + " windows, " + std::to_string(medium) + " medium intervals, " +
         std::to_string(r.rewrites) + " rewrites";
}

Outcome fn_involution() {
  const auto& r = fn_batch();
  return {r.involution_failures == 0 && r.rewrites > 0,
          std::to_string(r.involution_failures) + " involution failures; " + fn_context(r)};
}

Outcome fn_occurrences() {
  const auto& r = fn_batch();
  return {r.occurrence_failures == 0 && r.rewrites > 0,
          std::to_string(r.occurrence_failures) + " windows with changed marker positions; " + fn_context(r)};
}

Outcome fn_runs() {
  const auto& r = fn_batch();
  return {r.windows_with_111 == 0,
          std::to_string(r.windows_with_111) + " windows with 111 inside a rewritten free part (" +
              std::to_string(r.windows_with_1111) + " with 1111); block words 110a keep runs at most 3 but "
              "a=1 followed by 11 always gives 111"};
}

XorLimitConfig xor_config(const Rational& alpha, int n_min, int n_max, const char* word) {
  XorLimitConfig c;
  c.alpha = alpha;
  c.levels = kXorLevels;
  c.samples = kXorSamples;
  c.seed = kXorSeed;
  c.n_min = n_min;
  c.n_max = n_max;
  c.word = parse_word(word, 2);
  return c;
}

bool separated(double hi, double se_hi, double lo, double se_lo) {
  return hi - lo > kGapInStandardErrors * std::sqrt(se_hi * se_hi + se_lo * se_lo);
}

Outcome xor_decay() {
  HierarchicalParams p;
  p.levels = kXorLevels;
  p.alpha = 1;
  p.seed = kXorSeed;
  const HierarchicalSampler sampler(p);
  std::set<Word> seen;
  for (std::uint64_t i = 0; i < kXorSamples; ++i) seen.insert(sampler.sample(4, i).window);

  const XorLimitResult res = run_xor_limit(xor_config(1, 1, 3, "1"));
  bool decreasing = true;
  std::ostringstream d;
  d << seen.size() << "/16 length-4 words seen; estimates";
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    d << " n=" << res.rows[i].n << ":" << format_float(res.rows[i].estimate) << "+-"
      << format_float(res.rows[i].standard_error);
    if (i > 0)
      decreasing = decreasing && separated(res.rows[i - 1].estimate, res.rows[i - 1].standard_error,
                                           res.rows[i].estimate, res.rows[i].standard_error);
  }
  return {seen.size() == 16 && decreasing, d.str()};
}

Outcome alpha_ordering() {
  const std::vector<Rational> alphas{Rational(0), Rational(1, 2), Rational(1)};
  std::ostringstream d;
  bool ok = true;
  for (const char* word : {"00000000", "11111111"}) {
    std::vector<XorLimitRow> rows;
    for (const auto& a : alphas) rows.push_back(run_xor_limit(xor_config(a, 3, 3, word)).rows[0]);
    const bool ascending = word[0] == '0';
    d << (ascending ? "" : "; ") << word << ":";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      d << " " << format_float(rows[i].estimate);
      if (i == 0) continue;
      const auto& lo = ascending ? rows[i - 1] : rows[i];
      const auto& hi = ascending ? rows[i] : rows[i - 1];
      ok = ok && separated(hi.estimate, hi.standard_error, lo.estimate, lo.standard_error);
    }
  }
  return {ok, d.str() + " (alpha 0, 1/2, 1)"};
}

Outcome uniform_invariance() {
  int rules = 0, failures = 0;
  const auto lambda = CylinderMeasure::uniform(2);
  for (int r = 0; r <= 2; ++r)
    for (const auto& rule : enumerate_rules(2, r, true)) {
      ++rules;
      failures += !check_measure_invariance(rule, lambda, kInvarianceDepth);
    }
  return {failures == 0 && rules > 0,
          std::to_string(rules) + " surjective rules, " + std::to_string(failures) + " non-invariant"};
}

Outcome xor_equivalence() {
  std::uint64_t checks = 0, failures = 0;
  for (int len = 1; len <= kXorMaxWindow; ++len) {
    const std::uint64_t words = std::uint64_t{1} << len;
    Word w(len);
    for (std::uint64_t x = 0; x < words; ++x) {
      for (int i = 0; i < len; ++i) w[i] = (x >> i) & 1u;
      // Naive iteration on packed bits: one XOR step at a time.
      std::uint64_t cur = x;
      for (int t = 0; t <= kXorMaxSteps && t < len; ++t) {
        const Word fast = xor_iterate(w, t);
        std::uint64_t packed = 0;
        for (std::size_t i = 0; i < fast.size(); ++i) packed |= std::uint64_t{fast[i]} << i;
        failures += packed != cur || static_cast<int>(fast.size()) != len - t;
        ++checks;
        const std::uint64_t mask = (std::uint64_t{1} << (len - t - 1)) - 1;
        cur = (cur ^ (cur >> 1)) & mask;
      }
    }
  }
  return {failures == 0, std::to_string(checks) + " (window, t) pairs, " + std::to_string(failures) + " mismatches"};
}

Outcome determinism() {
  auto fn_csv = [](int jobs) {
    FnExperimentConfig c;
    c.n = 2;
    c.p = Rational(1, 50);
    c.windows = kFnWindows;
    c.seed = kFnSeed;
    c.jobs = jobs;
    return run_fn_experiment(c).csv;
  };
  auto xor_csvs = [](int jobs) {
    std::string all;
    auto c = xor_config(1, 1, 3, "1");
    c.jobs = jobs;
    all += run_xor_limit(c).csv;
    for (const auto& a : {Rational(0), Rational(1, 2), Rational(1)})
      for (const char* word : {"00000000", "11111111"}) {
        auto d = xor_config(a, 3, 3, word);
        d.jobs = jobs;
        all += run_xor_limit(d).csv;
      }
    return all;
  };
  const std::string fn1 = fn_csv(1), fn3 = fn_csv(3);
  const std::string x1 = xor_csvs(1), x3 = xor_csvs(3), x1b = xor_csvs(1);
  const bool ok = fn1 == fn3 && fn1 == fn_batch().csv && x1 == x3 && x1 == x1b;
  return {ok, "interval swap CSV " + std::to_string(fn1.size()) + " bytes " + (fn1 == fn3 ? "identical" : "DIFFERENT") +
                  " for jobs 1 and 3; sampler CSV " + std::to_string(x1.size()) + " bytes " +
                  (x1 == x3 && x1 == x1b ? "identical" : "DIFFERENT") + " over runs with jobs 1, 3, 1"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"1", "ternary worked example golden values", 1, ternary_example},
      {"2", "non-surjective pair golden values", 1, flipped_pair},
      {"3", "order-1 domination over surjective binary rules, r <= 3", 60, one_domination_sweep},
      {"4", "prefix-sum domination over surjective binary rules, r <= 3", 60, prefix_sum_sweep},
      {"5", "average normalized correlation equals |A||B|/q", 0, averages},
      {"6", "radius recursion and closed forms on random rules", 0, recursion_and_closed_forms},
      {"7", "histogram formula equals direct split-measure pushforward", 0, split_measure_formula},
      {"8", "histogram equality versus periodic conservation", 0, conservation_cross_check},
      {"9a", "interval swap is an involution", 300, fn_involution},
      {"9b", "interval swap keeps marker occurrences", 300, fn_occurrences},
      {"9c", "no 111 inside rewritten free parts", 300, fn_runs},
      {"10", "XOR iterates of the block measure: full support and decay", 300, xor_decay},
      {"11", "alternation share orders the 0^8 and 1^8 frequencies", 600, alpha_ordering},
      {"12", "uniform measure invariance, surjective binary r <= 2, |u| <= 5", 0, uniform_invariance},
      {"13", "fast XOR powers match naive iteration", 0, xor_equivalence},
      {"14", "seeded CSV output independent of jobs", 0, determinism},
  };

  std::set<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  std::size_t ran = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    ++ran;
    const auto start = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = c.seconds_limit == 0 || secs < c.seconds_limit;
    const bool pass = out.pass && in_time;
    all_pass = all_pass && pass;
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << ": " << out.detail << " ("
         << std::fixed << std::setprecision(2) << secs << "s";
    if (c.seconds_limit > 0) line << ", limit " << c.seconds_limit << "s";
    line << ")";
    std::cout << line.str() << std::endl;
  }
  if (ran == 0) {
    std::cerr << "no criterion matches the given ids\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
