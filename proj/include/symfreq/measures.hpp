#pragma once

// Shift-invariant measures described by their values on cylinders [u], and
// their images under cellular automata. All values are exact rationals; the
// block entropy is the one floating-point diagnostic.

#include "symfreq/ca_core.hpp"
#include "symfreq/correlation.hpp"
#include "symfreq/exact.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace symfreq {

enum class MeasureKind { uniform, product, dirac, explicit_table };

class CylinderMeasure {
 public:
  static CylinderMeasure uniform(int q);
  // probs[a] = mu([a]); must sum to exactly 1.
  static CylinderMeasure product(std::vector<Rational> probs);
  // Binary product measure with mu([1]) = p.
  static CylinderMeasure bernoulli(const Rational& p);
  static CylinderMeasure dirac(int q, Symbol symbol);
  // p/|A| on each symbol of A, (1-p)/(q-|A|) on the others.
  static CylinderMeasure split(const SymbolSet& a_set, const Rational& p);
  // values[len][word_index(w)] for every word of length len <= depth;
  // values[0][0] must be 1 and the table consistent and shift invariant.
  static CylinderMeasure explicit_table(int q, std::vector<std::vector<Rational>> values);

  int alphabet() const { return q_; }
  MeasureKind kind() const { return kind_; }
  bool is_product() const { return kind_ != MeasureKind::explicit_table; }
  // Longest queryable word; nullopt for product-type measures.
  std::optional<int> depth() const;
  // Single-symbol marginals; only for product-type measures.
  const std::vector<Rational>& symbol_probabilities() const;

  Rational query(WordView u) const;
  std::string describe() const;

 private:
  CylinderMeasure(int q, MeasureKind kind) : q_(q), kind_(kind) {}

  int q_;
  MeasureKind kind_;
  std::vector<Rational> probs_;
  std::vector<std::vector<Rational>> table_;
};

// "uniform", "bernoulli:P", "product:P0,P1,...", "dirac:S", "split:A:P".
CylinderMeasure parse_measure(int q, std::string_view text);

inline constexpr std::uint64_t kDefaultPreimageLimit = std::uint64_t{1} << 26;

// F mu([u]) = sum of mu([w]) over the preimages w of u.
Rational pushforward(const LocalRule& rule, const CylinderMeasure& mu, WordView u,
                     std::uint64_t limit = kDefaultPreimageLimit);
// F^t mu([u]) through the t-fold composed rule; t = 0 gives mu([u]).
Rational iterate_pushforward(const LocalRule& rule, const CylinderMeasure& mu, int steps, WordView u,
                             std::uint64_t limit = kDefaultPreimageLimit);

class PushforwardMeasure {
 public:
  PushforwardMeasure(CylinderMeasure base, const LocalRule& rule, int steps,
                     std::uint64_t limit = kDefaultPreimageLimit);

  int alphabet() const { return base_.alphabet(); }
  int steps() const { return steps_; }
  const CylinderMeasure& base() const { return base_; }
  Rational query(WordView u) const;

 private:
  CylinderMeasure base_;
  LocalRule composed_;
  int steps_;
  std::uint64_t limit_;
};

// sum_{a in A} F mu_{A,p}([a]) expanded as a polynomial in p whose
// coefficients come from the (A,A)-histogram alone.
Rational preim_measure_formula(const LocalRule& rule, const SymbolSet& a_set, const Rational& p);

struct ContractionReport {
  Rational lhs;  // max_u |F mu([u]) - lambda([u])|
  Rational rhs;  // max_w |mu([w]) - lambda([w])|
  bool holds = false;
  Word witness_u;
  Word witness_w;
};

ContractionReport check_uniform_contraction(const LocalRule& rule, const CylinderMeasure& mu, int n,
                                            std::uint64_t limit = kDefaultPreimageLimit);

// True iff F mu([u]) = mu([u]) for every u of length 1..depth.
bool check_measure_invariance(const LocalRule& rule, const CylinderMeasure& mu, int depth,
                              std::uint64_t limit = kDefaultPreimageLimit);

struct BlockEntropy {
  double h_n = 0;        // -sum mu log mu over words of length n, in nats
  double rate = 0;       // h_n / n
  double increment = 0;  // h_n - h_{n-1}
};

namespace detail {
void check_entropy_bound(int q, int n, std::uint64_t limit);
}

// Works for any measure exposing alphabet() and query(WordView).
template <class Measure>
BlockEntropy block_entropy(const Measure& mu, int n, std::uint64_t limit = kDefaultPreimageLimit) {
  if (n < 1) throw std::invalid_argument("block_entropy needs n >= 1");
  const int q = mu.alphabet();
  detail::check_entropy_bound(q, n, limit);
  auto level = [&](int len) {
    double h = 0;
    const std::uint64_t words = saturating_pow(q, len);
    for (std::uint64_t i = 0; i < words; ++i) {
      const double v = to_double(mu.query(index_word(i, len, q)));
      if (v > 0) h -= v * std::log(v);
    }
    return h;
  };
  BlockEntropy e;
  e.h_n = level(n);
  e.rate = e.h_n / n;
  e.increment = e.h_n - (n > 1 ? level(n - 1) : 0.0);
  return e;
}

}  // namespace symfreq
