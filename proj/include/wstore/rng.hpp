#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace wstore::rng {

// Counter-based generation (Philox 4x32-10): every output is a pure function
// of (key, counter), so any trial index can be sampled directly, in any order,
// from any number of workers, with bit-identical results.

using Block = std::array<uint32_t, 4>;
using Key = std::array<uint32_t, 2>;

namespace detail {

constexpr uint32_t kMult0 = 0xD2511F53u;
constexpr uint32_t kMult1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mul_hi_lo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

}  // namespace detail

inline Block philox4x32(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    detail::mul_hi_lo(detail::kMult0, ctr[0], hi0, lo0);
    detail::mul_hi_lo(detail::kMult1, ctr[2], hi1, lo1);
    ctr = Block{hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += detail::kWeyl0;
    key[1] += detail::kWeyl1;
  }
  return ctr;
}

// 53-bit uniform in [0, 1). 1.0 is unreachable, so -log1p(-u) stays finite.
inline double uniform53(uint32_t hi, uint32_t lo) {
  const uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// A stream of doubles addressed by (seed, trial, domain). The low counter
// word indexes 128-bit blocks; each block yields two doubles.
class Stream {
 public:
  Stream(uint64_t seed, uint64_t trial, uint32_t domain)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        base_{0u, static_cast<uint32_t>(trial),
              static_cast<uint32_t>(trial >> 32), domain} {}

  void fill_uniform(std::span<double> out) const {
    size_t i = 0;
    Block ctr = base_;
    for (uint32_t block = 0; i < out.size(); ++block) {
      ctr[0] = block;
      const Block w = philox4x32(ctr, key_);
      out[i++] = uniform53(w[0], w[1]);
      if (i < out.size()) out[i++] = uniform53(w[2], w[3]);
    }
  }

  // Unit-mean exponential variates via the inverse CDF, -ln(1 - u).
  void fill_exponential(std::span<double> out) const {
    fill_uniform(out);
    for (double& v : out) v = -std::log1p(-v);
  }

 private:
  Key key_;
  Block base_;
};

// Stream domains; keeps independent consumers off each other's counters.
inline constexpr uint32_t kDomainChannel = 0;
inline constexpr uint32_t kDomainConditioned = 1;

// splitmix64 finalizer, used to derive independent sub-stream seeds.
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t salt) {
  return mix64(seed ^ mix64(salt));
}

}  // namespace wstore::rng
