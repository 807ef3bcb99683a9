#include "byzattack/random.hpp"

#include <cmath>
#include <numbers>

namespace byzattack {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
constexpr int kPhiloxRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline PhiloxBlock philox_round(const PhiloxBlock& ctr, const PhiloxKey& key) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
  mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
  return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline std::uint64_t top53(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t word = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return word >> 11;
}

constexpr double kTwoPowMinus53 = 1.0 / 9007199254740992.0;

}  // namespace

PhiloxBlock philox4x32(PhiloxBlock counter, PhiloxKey key) {
  for (int round = 0; round < kPhiloxRounds; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    counter = philox_round(counter, key);
  }
  return counter;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

PhiloxBlock SampleStream::block(std::uint64_t index) const {
  const PhiloxBlock counter = {
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  const PhiloxKey key = {static_cast<std::uint32_t>(seed),
                         static_cast<std::uint32_t>(seed >> 32)};
  return philox4x32(counter, key);
}

double SampleStream::uniform(std::uint64_t index) const {
  const PhiloxBlock words = block(index);
  return static_cast<double>(top53(words[0], words[1])) * kTwoPowMinus53;
}

double SampleStream::normal(std::uint64_t index) const {
  const PhiloxBlock words = block(index);
  const double u1 = static_cast<double>(top53(words[0], words[1]) + 1) * kTwoPowMinus53;
  const double u2 = static_cast<double>(top53(words[2], words[3])) * kTwoPowMinus53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

SampleStream SampleStream::child(std::uint64_t n) const {
  return {seed, mix64(stream_id ^ mix64(n + 0x632BE59BD9B4E019ull))};
}

}  // namespace byzattack
