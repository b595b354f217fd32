#include "dchain/rng.hpp"

namespace dchain {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> c,
                                               std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

void Philox4x32::refill() {
  buf_ = block(ctr_, key_);
  pos_ = 0;
  if (++ctr_[0] == 0) ++ctr_[1];
}

Philox4x32::result_type Philox4x32::operator()() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

std::uint64_t Philox4x32::next_u64() {
  const std::uint64_t hi = (*this)();
  const std::uint64_t lo = (*this)();
  return (hi << 32) | lo;
}

double Philox4x32::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Philox4x32::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t Philox4x32::below(std::uint64_t bound) {
  // reject the lowest 2^64 mod bound values so the rest splits evenly
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < threshold);
  return x % bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t rep) {
  return splitmix64(seed ^ splitmix64(rep + 0x9E3779B97F4A7C15ull));
}

}  // namespace dchain
