#pragma once

// Counter-based random numbers.
//
// Every draw is a pure function of (seed, stream_id, index): there is no
// hidden generator state, so any partition of indices over workers yields the
// same numbers. The block cipher is Philox4x32 with 10 rounds (Salmon et al.,
// SC'11), counter = {index.lo, index.hi, stream.lo, stream.hi} and
// key = {seed.lo, seed.hi}.
//
// Normal deviates use the Box-Muller cosine branch:
//   u1 = (top 53 bits of words 0,1 + 1) * 2^-53   in (0, 1]
//   u2 = (top 53 bits of words 2,3)     * 2^-53   in [0, 1)
//   z  = sqrt(-2 ln u1) * cos(2 pi u2)
// One Philox block is consumed per normal deviate.

#include <array>
#include <cstdint>

namespace byzattack {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32-10 bijection. Matches the Random123 known-answer vectors.
PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key);

/// Reproducible source of independent draws addressed by index.
struct SampleStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  PhiloxBlock block(std::uint64_t index) const;

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t index) const;

  /// Standard normal deviate (Box-Muller, see file comment).
  double normal(std::uint64_t index) const;

  /// Deterministically derived stream sharing the seed; used to give
  /// sub-experiments (H0 vs H1 trials, selection vs value draws) disjoint
  /// counters without the caller picking ids.
  SampleStream child(std::uint64_t n) const;

  friend bool operator==(const SampleStream&, const SampleStream&) = default;
};

/// Sequential view over a SampleStream for code that wants "the next
/// uniform" (randomized instance generation). Draw n uses index n.
class UniformSequence {
 public:
  explicit UniformSequence(SampleStream stream) : stream_(stream) {}

  double next() { return stream_.uniform(index_++); }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }
  std::uint64_t consumed() const { return index_; }

 private:
  SampleStream stream_;
  std::uint64_t index_ = 0;
};

/// SplitMix64 finalizer; used for stream derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace byzattack
