#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dchain {

// Philox4x32-10 counter-based generator (Salmon et al. construction).
// The 64-bit key is the seed; the 128-bit counter is (block index, stream).
// Each block yields four 32-bit words.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1): never returns 0 (safe for logs).
  double uniform_open();
  // Uniform integer in [0, bound), bound > 0 (rejection, unbiased).
  std::uint64_t below(std::uint64_t bound);

  // The raw bijection, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);
// Seed of replicate `rep` under master `seed`:
//   splitmix64(seed ^ splitmix64(rep + 0x9E3779B97F4A7C15)).
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t rep);

}  // namespace dchain
