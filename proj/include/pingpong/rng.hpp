#pragma once

#include <cstdint>

namespace pingpong {

// Counter-based stream: the i-th draw is a pure function of (key, i), so a
// stream can be rebuilt from its seed and position alone. The mixing function
// is the SplitMix64 finalizer.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  // Independent stream for e.g. trial `index` of an experiment seeded by `seed`.
  static RngStream derive(std::uint64_t seed, std::uint64_t index) { return RngStream(seed, index); }

  std::uint64_t next_u64();
  // Uniform in [0, 1), 53 bits.
  double uniform();
  // Uniform in {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via Box-Muller.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace pingpong
