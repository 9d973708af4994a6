#include "symfreq/intervals.hpp"

#include <algorithm>
#include <cmath>

namespace symfreq {

namespace {

constexpr std::uint64_t kMaxCountCells = 200'000'000;
constexpr double kMaxCountLimbs = static_cast<double>(std::uint64_t{1} << 28);

void require_binary(WordView w, const char* what) {
  for (Symbol s : w)
    if (s > 1) throw std::invalid_argument(std::string(what) + " must be binary");
}

long to_long(const BigInt& v, const char* what) {
  if (!v.fits_slong_p()) throw LimitExceeded(std::string(what) + " does not fit a machine integer");
  return v.get_si();
}

// log2 of the number of binary words of length len and weight at most w, roughly.
double log2_weight_bounded(int len, int w) {
  const int k = std::min(w, len / 2);
  const double lc = std::lgamma(len + 1.0) - std::lgamma(k + 1.0) - std::lgamma(len - k + 1.0);
  return lc / std::log(2.0) + std::log2(w + 1.0);
}

}  // namespace

PatternAutomaton::PatternAutomaton(Word pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw std::invalid_argument("empty pattern");
  require_binary(pattern_, "pattern");
  const int m = length();
  delta_.assign(2 * m, 0);
  for (int s = 0; s < m; ++s) {
    for (Symbol b = 0; b < 2; ++b) {
      Word seen(pattern_.begin(), pattern_.begin() + s);
      seen.push_back(b);
      int best = 0;
      for (int len = std::min<int>(m, seen.size()); len > 0; --len) {
        if (std::equal(seen.end() - len, seen.end(), pattern_.begin())) {
          best = len;
          break;
        }
      }
      delta_[2 * s + b] = best;
    }
  }
}

std::optional<int> PatternAutomaton::feed(int state, WordView w) const {
  for (Symbol b : w) {
    state = next(state, b);
    if (matched(state)) return std::nullopt;
  }
  return state;
}

std::vector<std::size_t> find_occurrences(WordView window, WordView pattern) {
  std::vector<std::size_t> out;
  if (pattern.empty() || pattern.size() > window.size()) return out;
  for (std::size_t i = 0; i + pattern.size() <= window.size(); ++i)
    if (std::equal(pattern.begin(), pattern.end(), window.begin() + i)) out.push_back(i);
  return out;
}

PatternFreeCounts::PatternFreeCounts(const PatternAutomaton& automaton, int max_length, int max_weight)
    : automaton_(automaton), max_length_(max_length), max_weight_(max_weight) {
  if (max_length < 0 || max_weight < 0) throw std::invalid_argument("negative table bounds");
  const int m = automaton_.length();
  slot_of_state_.assign(m, -1);
  slot_of_state_[0] = slots_++;
  for (int s = 0; s < m; ++s) {
    const int t = automaton_.next(s, 0);
    if (!automaton_.matched(t) && slot_of_state_[t] < 0) slot_of_state_[t] = slots_++;
  }

  const std::uint64_t cells = static_cast<std::uint64_t>(max_length + 1) * slots_ * (max_weight + 1);
  double limb_estimate = 0;
  for (int len = 0; len <= max_length; ++len)
    limb_estimate += static_cast<double>(slots_) * (max_weight + 1) *
                     (std::min<double>(len, log2_weight_bounded(len, max_weight)) / 64.0 + 1.0);
  if (cells > kMaxCountCells || limb_estimate > kMaxCountLimbs)
    throw LimitExceeded("pattern-free count table for length " + std::to_string(max_length) + " and weight " +
                        std::to_string(max_weight) + " needs about " +
                        std::to_string(static_cast<std::uint64_t>(limb_estimate) * 8 / (1 << 20)) +
                        " MiB; choose a larger p or smaller n");

  offsets_.reserve(cells + 1);
  limbs_.reserve(static_cast<std::size_t>(limb_estimate * 0.6) + 1);
  offsets_.push_back(0);

  const int width = max_weight + 1;
  std::vector<BigInt> cur(static_cast<std::size_t>(m) * width, 0), nxt(cur.size(), 0);
  for (int s = 0; s < m; ++s) cur[s * width] = 1;

  std::vector<int> stored_states(slots_);
  for (int s = 0; s < m; ++s)
    if (slot_of_state_[s] >= 0) stored_states[slot_of_state_[s]] = s;

  BigInt acc;
  for (int len = 0; len <= max_length; ++len) {
    for (int slot = 0; slot < slots_; ++slot) {
      acc = 0;
      const BigInt* row = &cur[stored_states[slot] * width];
      for (int w = 0; w < width; ++w) {
        acc += row[w];
        const std::size_t n = mpz_size(acc.get_mpz_t());
        const mp_limb_t* src = mpz_limbs_read(acc.get_mpz_t());
        limbs_.insert(limbs_.end(), src, src + n);
        offsets_.push_back(limbs_.size());
      }
    }
    if (len == max_length) break;
    for (int s = 0; s < m; ++s) {
      const int z = automaton_.next(s, 0);
      const int o = automaton_.next(s, 1);
      for (int w = 0; w < width; ++w) {
        BigInt& dst = nxt[s * width + w];
        dst = 0;
        if (!automaton_.matched(z)) dst += cur[z * width + w];
        if (w > 0 && !automaton_.matched(o)) dst += cur[o * width + w - 1];
      }
    }
    std::swap(cur, nxt);
  }
  limbs_.shrink_to_fit();
  if (limbs_.empty()) limbs_.push_back(0);
}

std::size_t PatternFreeCounts::cell(int len, int slot, int weight) const {
  return (static_cast<std::size_t>(len) * slots_ + slot) * (max_weight_ + 1) + weight;
}

mpz_srcptr PatternFreeCounts::prefix(int len, int slot, int weight, mpz_t scratch) const {
  const std::size_t c = cell(len, slot, weight);
  const std::uint64_t begin = offsets_[c];
  const std::uint64_t size = offsets_[c + 1] - begin;
  return mpz_roinit_n(scratch, limbs_.data() + begin, static_cast<mp_size_t>(size));
}

BigInt PatternFreeCounts::count(int len, int state, long lo, long hi) const {
  if (len < 0 || len > max_length_) throw std::out_of_range("length outside the count table");
  if (automaton_.matched(state)) return 0;
  const int slot = slot_of_state_.at(state);
  if (slot < 0) throw std::logic_error("count table does not keep this start state");
  lo = std::max(lo, 0L);
  hi = std::min<long>(hi, len);
  if (lo > hi) return 0;
  if (hi > max_weight_) throw std::out_of_range("weight outside the count table");
  mpz_t a, b;
  BigInt result(prefix(len, slot, static_cast<int>(hi), a));
  if (lo > 0) mpz_sub(result.get_mpz_t(), result.get_mpz_t(), prefix(len, slot, static_cast<int>(lo - 1), b));
  return result;
}

WeightedFreeFamily::WeightedFreeFamily(std::shared_ptr<const PatternFreeCounts> counts, int length, long lo, long hi)
    : counts_(std::move(counts)), length_(length), lo_(lo), hi_(hi) {
  if (!counts_) throw std::invalid_argument("missing count table");
  if (length < 0 || length > counts_->max_length()) throw std::out_of_range("family length outside the count table");
  if (std::min<long>(hi, length) > counts_->max_weight()) throw std::out_of_range("family weight outside the table");
}

BigInt WeightedFreeFamily::size() const { return counts_->count(length_, 0, lo_, hi_); }

bool WeightedFreeFamily::contains(WordView v) const {
  if (static_cast<int>(v.size()) != length_) return false;
  long weight = 0;
  for (Symbol s : v) {
    if (s > 1) return false;
    weight += s;
  }
  if (weight < lo_ || weight > hi_) return false;
  return !counts_->automaton().occurs_in(v);
}

BigInt WeightedFreeFamily::rank(WordView v) const {
  if (!contains(v)) throw std::invalid_argument("word " + format_word(v) + " is not in the family");
  const PatternAutomaton& aut = counts_->automaton();
  BigInt rank = 0;
  int state = 0;
  long weight = 0;
  for (int i = 0; i < length_; ++i) {
    if (v[i] == 1) rank += counts_->count(length_ - i - 1, aut.next(state, 0), lo_ - weight, hi_ - weight);
    state = aut.next(state, v[i]);
    weight += v[i];
  }
  return rank;
}

Word WeightedFreeFamily::unrank(const BigInt& index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("family index " + to_string(index) + " out of range");
  const PatternAutomaton& aut = counts_->automaton();
  BigInt rest = index;
  Word v(length_);
  int state = 0;
  long weight = 0;
  for (int i = 0; i < length_; ++i) {
    BigInt zeros = counts_->count(length_ - i - 1, aut.next(state, 0), lo_ - weight, hi_ - weight);
    if (rest < zeros) {
      v[i] = 0;
    } else {
      rest -= zeros;
      v[i] = 1;
      ++weight;
    }
    state = aut.next(state, v[i]);
  }
  return v;
}

BigInt b_family_size(int length) {
  if (length < 0) throw std::invalid_argument("negative length");
  return ipow(BigInt(2), length / 4);
}

bool is_b_word(int length, WordView v) {
  if (length < 0 || static_cast<int>(v.size()) != length) return false;
  const int blocks = length / 4;
  for (int j = 0; j < blocks; ++j) {
    if (v[4 * j] != 1 || v[4 * j + 1] != 1 || v[4 * j + 2] != 0 || v[4 * j + 3] > 1) return false;
  }
  for (int i = 4 * blocks; i < length; ++i)
    if (v[i] != 0) return false;
  return true;
}

BigInt rank_b(int length, WordView v) {
  if (!is_b_word(length, v)) throw std::invalid_argument("word " + format_word(v) + " is not a block word");
  BigInt r = 0;
  for (int j = 0; j < length / 4; ++j) r = 2 * r + v[4 * j + 3];
  return r;
}

Word unrank_b(int length, const BigInt& index) {
  const BigInt size = b_family_size(length);
  if (index < 0 || index >= size) throw std::out_of_range("block index " + to_string(index) + " out of range");
  const int blocks = length / 4;
  Word v(length, 0);
  for (int j = 0; j < blocks; ++j) {
    v[4 * j] = 1;
    v[4 * j + 1] = 1;
    v[4 * j + 3] = mpz_tstbit(index.get_mpz_t(), blocks - 1 - j);
  }
  return v;
}

MarkerFreeBFamily::MarkerFreeBFamily(const PatternAutomaton& automaton, int max_blocks)
    : automaton_(automaton), max_blocks_(max_blocks) {
  if (max_blocks < 0) throw std::invalid_argument("negative block count");
  const int m = automaton_.length();
  completions_.assign(4, std::vector<std::vector<BigInt>>(max_blocks + 1, std::vector<BigInt>(m, 0)));
  for (int tail = 0; tail < 4; ++tail) {
    const Word zeros(tail, 0);
    for (int s = 0; s < m; ++s) completions_[tail][0][s] = automaton_.feed(s, zeros) ? 1 : 0;
    for (int j = 1; j <= max_blocks; ++j) {
      for (int s = 0; s < m; ++s) {
        BigInt& dst = completions_[tail][j][s];
        for (Symbol a = 0; a < 2; ++a)
          if (auto t = feed_block(s, a)) dst += completions_[tail][j - 1][*t];
      }
    }
  }
}

std::optional<int> MarkerFreeBFamily::feed_block(int state, Symbol a) const {
  const Symbol block[4] = {1, 1, 0, a};
  return automaton_.feed(state, block);
}

const BigInt& MarkerFreeBFamily::completions(int length, int blocks_left, int state) const {
  if (length / 4 > max_blocks_) throw std::out_of_range("block family length beyond its table");
  return completions_[length % 4][blocks_left][state];
}

BigInt MarkerFreeBFamily::size(int length) const { return completions(length, length / 4, 0); }

bool MarkerFreeBFamily::contains(int length, WordView v) const {
  return is_b_word(length, v) && !automaton_.occurs_in(v);
}

BigInt MarkerFreeBFamily::rank(int length, WordView v) const {
  if (!contains(length, v)) throw std::invalid_argument("word " + format_word(v) + " is not a marker-free block word");
  const int blocks = length / 4;
  BigInt rank = 0;
  int state = 0;
  for (int j = 0; j < blocks; ++j) {
    const Symbol a = v[4 * j + 3];
    if (a == 1)
      if (auto t = feed_block(state, 0)) rank += completions(length, blocks - j - 1, *t);
    state = *feed_block(state, a);
  }
  return rank;
}

Word MarkerFreeBFamily::unrank(int length, const BigInt& index) const {
  if (index < 0 || index >= size(length))
    throw std::out_of_range("marker-free block index " + to_string(index) + " out of range");
  const int blocks = length / 4;
  Word v(length, 0);
  BigInt rest = index;
  int state = 0;
  for (int j = 0; j < blocks; ++j) {
    v[4 * j] = 1;
    v[4 * j + 1] = 1;
    auto zero = feed_block(state, 0);
    BigInt zeros = zero ? completions(length, blocks - j - 1, *zero) : BigInt(0);
    if (rest < zeros) {
      state = *zero;
    } else {
      rest -= zeros;
      v[4 * j + 3] = 1;
      state = *feed_block(state, 1);
    }
  }
  return v;
}

IntervalParams make_interval_params(int n, const Rational& p) {
  if (n < 1) throw std::invalid_argument("marker order n must be at least 1");
  if (p <= 0 || p >= 1) throw std::invalid_argument("p must lie strictly between 0 and 1");
  IntervalParams params;
  params.n = n;
  params.p = p;
  for (int i = 0; i < n; ++i) {
    params.marker.push_back(1);
    params.marker.push_back(0);
  }
  params.marker.push_back(0);
  params.marker_mass = rpow(p, n) * rpow(1 - p, n + 1);
  params.alpha = to_long(ceil(Rational(n) / params.marker_mass), "alpha") + params.marker_length();
  params.short_bound = to_long(ceil(Rational(2 * n) / p), "short bound");
  return params;
}

const char* to_string(IntervalClass c) {
  switch (c) {
    case IntervalClass::short_interval: return "short";
    case IntervalClass::medium: return "medium";
    case IntervalClass::long_interval: return "long";
  }
  return "short";
}

IntervalClass classify_interval(const IntervalParams& params, long length) {
  if (length < params.short_bound) return IntervalClass::short_interval;
  if (length <= params.max_medium_length()) return IntervalClass::medium;
  return IntervalClass::long_interval;
}

IntervalDecomposition decompose_intervals(WordView window, const IntervalParams& params) {
  require_binary(window, "window");
  IntervalDecomposition d;
  d.window.assign(window.begin(), window.end());
  d.occurrences = find_occurrences(window, params.marker);
  for (std::size_t i = 0; i < d.occurrences.size(); ++i) {
    Interval iv;
    iv.start = d.occurrences[i];
    iv.complete = i + 1 < d.occurrences.size();
    iv.length = (iv.complete ? d.occurrences[i + 1] : window.size()) - iv.start;
    iv.cls = classify_interval(params, static_cast<long>(iv.length));
    d.intervals.push_back(iv);
  }
  return d;
}

long a_min_weight(const Rational& p, long free_length) {
  return ceil(Rational(free_length) * p / 2).get_si();
}

long a_max_weight(const Rational& p, long free_length) {
  return floor(Rational(3 * free_length) * p / 2).get_si();
}

IntervalSwap::IntervalSwap(IntervalParams params) : params_(std::move(params)) {
  const PatternAutomaton automaton(params_.marker);
  report_.min_free_length = params_.short_bound - params_.marker_length();
  report_.max_free_length = params_.alpha;
  if (report_.min_free_length > report_.max_free_length) {
    report_.has_medium = false;
    report_.reasons.push_back("no medium intervals: short bound " + std::to_string(params_.short_bound) +
                              " exceeds " + std::to_string(params_.max_medium_length()));
    return;
  }
  const int max_len = static_cast<int>(report_.max_free_length);
  counts_ = std::make_shared<const PatternFreeCounts>(automaton, max_len, a_max_weight(params_.p, max_len));
  b_family_ = std::make_shared<const MarkerFreeBFamily>(automaton, max_len / 4);

  long bad_count = 0, first_bad = -1, overlap_count = 0, first_overlap = -1;
  for (long l = report_.min_free_length; l <= report_.max_free_length; ++l) {
    const int len = static_cast<int>(l);
    if (counts_->count(len, 0, a_min_weight(params_.p, l), a_max_weight(params_.p, l)) > b_family_->size(len)) {
      if (bad_count++ == 0) first_bad = l;
    }
    if (Rational(3 * l) * params_.p / 2 >= 2 * (l / 4)) {
      if (overlap_count++ == 0) first_overlap = l;
    }
  }
  if (bad_count) {
    report_.valid = false;
    report_.reasons.push_back("A_l larger than the marker-free block family for " + std::to_string(bad_count) +
                              " free lengths, first l=" + std::to_string(first_bad));
  }
  if (overlap_count) {
    report_.valid = false;
    report_.reasons.push_back("weight bound 3lp/2 reaches 2 floor(l/4) for " + std::to_string(overlap_count) +
                              " free lengths, first l=" + std::to_string(first_overlap));
  }
}

WeightedFreeFamily IntervalSwap::a_family(int free_length) const {
  if (!counts_) throw std::logic_error("these parameters have no medium intervals");
  return WeightedFreeFamily(counts_, free_length, a_min_weight(params_.p, free_length),
                            a_max_weight(params_.p, free_length));
}

SwapResult IntervalSwap::apply_detailed(WordView window) const {
  if (!report_.valid) {
    std::string why;
    for (const auto& r : report_.reasons) why += "; " + r;
    throw std::invalid_argument("interval parameters are invalid" + why);
  }
  SwapResult result;
  result.window.assign(window.begin(), window.end());
  const IntervalDecomposition d = decompose_intervals(window, params_);
  const std::size_t marker = params_.marker.size();
  for (const Interval& iv : d.intervals) {
    if (!iv.complete || iv.cls != IntervalClass::medium) continue;
    const std::size_t start = iv.start + marker;
    const int len = static_cast<int>(iv.length - marker);
    WordView v = window.subspan(start, len);
    const WeightedFreeFamily a = a_family(len);
    Word replacement;
    bool into_b = false;
    if (a.contains(v)) {
      replacement = b_family_->unrank(len, a.rank(v));
      into_b = true;
    } else if (b_family_->contains(len, v)) {
      BigInt idx = b_family_->rank(len, v);
      if (idx >= a.size()) continue;
      replacement = a.unrank(idx);
    } else {
      continue;
    }
    std::copy(replacement.begin(), replacement.end(), result.window.begin() + start);
    result.rewrites.push_back({start, static_cast<std::size_t>(len), into_b});
  }
  return result;
}

ParamsReport check_interval_params(const IntervalParams& params) { return IntervalSwap(params).report(); }

int longest_run(WordView w, Symbol s) {
  int best = 0, cur = 0;
  for (Symbol c : w) {
    cur = c == s ? cur + 1 : 0;
    best = std::max(best, cur);
  }
  return best;
}

}  // namespace symfreq
