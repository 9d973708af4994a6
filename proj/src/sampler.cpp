#include "symfreq/sampler.hpp"

#include "symfreq/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace symfreq {

std::uint64_t triangular(int n) {
  if (n < 0) throw std::invalid_argument("negative level");
  return static_cast<std::uint64_t>(n) * (n + 1) / 2;
}

std::uint64_t block_length(int level) {
  const std::uint64_t t = triangular(level);
  if (t >= 63) throw LimitExceeded("block of level " + std::to_string(level) + " is too long");
  return std::uint64_t{1} << t;
}

std::vector<Rational> default_copy_probabilities(int levels) {
  std::vector<Rational> p;
  for (int n = 0; n < levels; ++n) p.push_back(1 - Rational(1, n + 1));
  return p;
}

HierarchicalSampler::HierarchicalSampler(HierarchicalParams params) : params_(std::move(params)) {
  if (params_.levels < 0 || params_.levels > kMaxSamplerLevels)
    throw LimitExceeded("sampler levels must be in [0, " + std::to_string(kMaxSamplerLevels) + "]");
  if (params_.alpha < 0 || params_.alpha > 1) throw std::invalid_argument("alpha must lie in [0,1]");
  if (params_.copy_probs.empty()) params_.copy_probs = default_copy_probabilities(params_.levels);
  if (static_cast<int>(params_.copy_probs.size()) < params_.levels)
    throw std::invalid_argument("need one copy probability per level below the outer block");
  for (int n = 0; n < params_.levels; ++n) {
    const Rational& p = params_.copy_probs[n];
    if (p < 0 || p > 1) throw std::invalid_argument("copy probabilities must lie in [0,1]");
    independent_below_.push_back(to_double(1 - p));
    copy_below_.push_back(to_double(1 - p + params_.alpha * p));
  }
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
  return std::mt19937_64(seq);
}

double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void HierarchicalSampler::fill(int level, Symbol* out, std::mt19937_64& rng) const {
  if (level == 0) {
    out[0] = static_cast<Symbol>(rng() >> 63);
    return;
  }
  const std::uint64_t child = block_length(level - 1);
  const std::uint64_t children = std::uint64_t{1} << level;
  fill(level - 1, out, rng);
  const double u = unit_interval(rng);
  if (u < independent_below_[level - 1]) {
    for (std::uint64_t j = 1; j < children; ++j) fill(level - 1, out + j * child, rng);
  } else if (u < copy_below_[level - 1]) {
    for (std::uint64_t j = 1; j < children; ++j) std::copy(out, out + child, out + j * child);
  } else {
    for (std::uint64_t j = 1; j < children; ++j) {
      Symbol* dst = out + j * child;
      if (j % 2 == 0)
        std::copy(out, out + child, dst);
      else
        std::transform(out, out + child, dst, [](Symbol s) { return static_cast<Symbol>(1 - s); });
    }
  }
}

Word HierarchicalSampler::block(std::mt19937_64& rng) const {
  Word w(outer_length());
  fill(params_.levels, w.data(), rng);
  return w;
}

HierarchicalSample HierarchicalSampler::sample(std::size_t window_length, std::uint64_t index,
                                               std::uint64_t stream) const {
  const std::uint64_t outer = outer_length();
  if (window_length == 0 || window_length > outer)
    throw std::invalid_argument("window of length " + std::to_string(window_length) +
                                " does not fit a level-" + std::to_string(params_.levels) + " block of length " +
                                std::to_string(outer));
  std::mt19937_64 rng = make_stream(params_.seed, stream, index);
  const std::uint64_t bits = triangular(params_.levels);
  HierarchicalSample s;
  do {
    ++s.attempts;
    s.offset = bits == 0 ? 0 : rng() >> (64 - bits);
  } while (s.offset + window_length > outer);
  for (int n = 0; n <= params_.levels; ++n) s.offsets.push_back(s.offset % block_length(n));
  Word b = block(rng);
  s.window.assign(b.begin() + s.offset, b.begin() + s.offset + window_length);
  return s;
}

Word xor_power(WordView w, int k) {
  if (k < 0 || k >= 63) throw std::invalid_argument("xor power exponent out of range");
  const std::size_t shift = std::size_t{1} << k;
  if (w.size() <= shift)
    throw std::invalid_argument("window of length " + std::to_string(w.size()) + " too short for shift " +
                                std::to_string(shift));
  Word out(w.size() - shift);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[i] ^ w[i + shift];
  return out;
}

Word xor_iterate(WordView w, std::uint64_t steps) {
  if (steps >= w.size() && steps > 0)
    throw std::invalid_argument("window of length " + std::to_string(w.size()) + " too short for " +
                                std::to_string(steps) + " steps");
  Word cur(w.begin(), w.end());
  for (int k = 0; k < 63 && (steps >> k) != 0; ++k)
    if ((steps >> k) & 1u) cur = xor_power(cur, k);
  return cur;
}

CylinderEstimate estimate_cylinder(const HierarchicalSampler& sampler, WordView u, std::uint64_t samples,
                                   std::uint64_t xor_steps, std::uint64_t stream, int jobs) {
  if (u.empty() || samples == 0) throw std::invalid_argument("need a nonempty word and at least one sample");
  const std::size_t length = u.size() + xor_steps;
  if (length > sampler.outer_length())
    throw std::invalid_argument("word plus " + std::to_string(xor_steps) + " XOR steps needs a window of " +
                                std::to_string(length) + " cells, more than the outer block holds");
  std::vector<std::uint8_t> hit(samples);
  std::vector<std::uint64_t> attempts(samples);
  parallel_for(samples, jobs, [&](std::size_t i) {
    HierarchicalSample s = sampler.sample(length, i, stream);
    Word image = xor_iterate(s.window, xor_steps);
    hit[i] = std::equal(u.begin(), u.end(), image.begin());
    attempts[i] = s.attempts;
  });
  CylinderEstimate e;
  e.samples = samples;
  std::uint64_t draws = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    e.hits += hit[i];
    draws += attempts[i];
  }
  e.estimate = static_cast<double>(e.hits) / samples;
  e.standard_error = std::sqrt(e.estimate * (1 - e.estimate) / samples);
  e.containment_rate = static_cast<double>(samples) / draws;
  return e;
}

}  // namespace symfreq
