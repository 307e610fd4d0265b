#pragma once

// Keyed, counter-based random streams.
//
// Every random draw in the system comes from a stream addressed by
// (master seed, purpose tag, up to three entity keys). Streams are stateless
// to construct, so adding threads or reordering work never changes any draw:
// the draw for (seed, "sdl_prod", employer 17) is the same no matter who asks
// for it or when.

#include <cstdint>
#include <string_view>

namespace jobtab {

// FNV-1a, used to fold purpose tags and config text into 64-bit keys.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// SplitMix64 output function; full-period, passes the usual batteries for the
// statistical workloads here.
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::string_view tag, std::uint64_t k1 = 0,
           std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
    state_ = absorb(seed, fnv1a64(tag));
    state_ = absorb(state_, k1);
    state_ = absorb(state_, k2);
    state_ = absorb(state_, k3);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform on [0, 1), 53-bit resolution.
  double next_u01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Multiply-shift; the negligible modulo bias is
  // irrelevant for the category counts used here (n << 2^32).
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>((next_u64() >> 32) * std::uint64_t(n) >> 32);
  }

  bool next_bernoulli(double p) { return next_u01() < p; }

  double next_normal();

 private:
  static std::uint64_t absorb(std::uint64_t acc, std::uint64_t v) {
    std::uint64_t s = acc ^ (v + 0x9e3779b97f4a7c15ULL + (acc << 6) + (acc >> 2));
    return splitmix64(s);
  }

  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace jobtab
