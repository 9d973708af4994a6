#pragma once

// Hierarchical block measures and fast iteration of the two-cell XOR rule.
//
// A level-n block has length 2^t(n), t(n) = n(n+1)/2, and consists of 2^n
// level-(n-1) blocks. Generation starts from the leftmost 0-block (a fair
// bit). A level-n block is built from its first child: with probability
// 1 - p the other children are generated independently, otherwise they
// copy the first child (probability alpha) or alternate between it and its
// negation, even-indexed children holding the original.

#include "symfreq/ca_core.hpp"
#include "symfreq/exact.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace symfreq {

inline constexpr int kMaxSamplerLevels = 6;
inline constexpr const char* kSamplerRng = "mt19937_64/seed_seq";

std::uint64_t triangular(int n);
std::uint64_t block_length(int level);

// p_n = 1 - 1/(n+1) for n = 0..levels-1.
std::vector<Rational> default_copy_probabilities(int levels);

struct HierarchicalParams {
  int levels = 4;                     // size of the outer block
  Rational alpha = 1;                 // share of copies among correlated levels
  std::vector<Rational> copy_probs;   // p_n used to build level n+1 from level n
  std::uint64_t seed = 0;
};

struct HierarchicalSample {
  Word window;
  std::uint64_t offset = 0;              // window start inside the outer block
  std::vector<std::uint64_t> offsets;    // offset mod 2^t(n), n = 0..levels
  std::uint64_t attempts = 0;            // offset draws until the window fit
};

class HierarchicalSampler {
 public:
  explicit HierarchicalSampler(HierarchicalParams params);

  const HierarchicalParams& params() const { return params_; }
  std::uint64_t outer_length() const { return block_length(params_.levels); }

  // Sample `index` of stream `stream`; depends only on (seed, stream, index).
  HierarchicalSample sample(std::size_t window_length, std::uint64_t index, std::uint64_t stream = 0) const;
  // Whole outer block, anchored at its leftmost cell.
  Word block(std::mt19937_64& rng) const;

 private:
  void fill(int level, Symbol* out, std::mt19937_64& rng) const;

  HierarchicalParams params_;
  std::vector<double> independent_below_;  // u < this: independent children
  std::vector<double> copy_below_;         // u < this: copies, else alternation
};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double unit_interval(std::mt19937_64& rng);

// out_i = w_i xor w_{i + 2^k}.
Word xor_power(WordView w, int k);
// The XOR rule iterated t times, composed from powers of two.
Word xor_iterate(WordView w, std::uint64_t steps);

struct CylinderEstimate {
  double estimate = 0;
  double standard_error = 0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  double containment_rate = 1;  // samples / offset draws
};

// Frequency of u at the start of F^steps(x) for x drawn from the sampler,
// F the XOR rule (steps = 0 looks at x itself).
CylinderEstimate estimate_cylinder(const HierarchicalSampler& sampler, WordView u, std::uint64_t samples,
                                   std::uint64_t xor_steps = 0, std::uint64_t stream = 0, int jobs = 1);

}  // namespace symfreq
