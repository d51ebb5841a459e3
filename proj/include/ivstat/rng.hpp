#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ivstat {

namespace detail {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo32(kMul0, ctr[0], hi0, lo0);
    mulhilo32(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Counter-based random stream.
///
/// A stream is identified by (seed, stream id). The seed is the Philox key and
/// the stream id occupies the upper half of the 128-bit counter, so distinct
/// ids never overlap. The output sequence depends only on integer arithmetic
/// and is identical on every platform.
///
/// Satisfies UniformRandomBitGenerator, so it can drive Boost.Random
/// distributions. Not thread-safe; give each worker its own stream via
/// derive().
class RngStream {
 public:
  using result_type = std::uint32_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (buffered_ == 0) refill();
    return buffer_[4 - buffered_--];
  }

  /// Uniform double in the open interval (0, 1) with 53 random bits.
  double uniform01() {
    const std::uint64_t hi = (*this)() >> 5;  // 27 bits
    const std::uint64_t lo = (*this)() >> 6;  // 26 bits
    const double u = static_cast<double>((hi << 26) | lo) * 0x1.0p-53;
    return u == 0.0 ? 0x1.0p-54 : u;
  }

  /// Independent child stream keyed by `index`; does not advance this stream.
  [[nodiscard]] RngStream derive(std::uint64_t index) const {
    const std::uint64_t child = detail::splitmix64(detail::splitmix64(stream_) ^ detail::splitmix64(~index));
    return RngStream(seed_, child);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill() {
    const detail::PhiloxCounter ctr = {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const detail::PhiloxKey key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    buffer_ = detail::philox4x32_10(ctr, key);
    buffered_ = 4;
    ++block_;
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  detail::PhiloxCounter buffer_{};
  int buffered_ = 0;
};

}  // namespace ivstat
