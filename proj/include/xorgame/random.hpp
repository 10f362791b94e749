#pragma once

// Counter-based random numbers. Every Monte Carlo trial owns an independent
// stream keyed by (seed, n, m, trial), so results do not depend on how trials
// are scheduled across threads.

#include <cstdint>
#include <limits>

namespace xorgame {

__extension__ using uint128 = unsigned __int128;
__extension__ using int128 = __int128;

constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream key for one trial of one grid cell.
constexpr std::uint64_t trial_key(std::uint64_t seed, std::uint64_t n, std::uint64_t m, std::uint64_t trial) noexcept {
  std::uint64_t k = splitmix64_mix(seed + 0x9e3779b97f4a7c15ULL);
  k = splitmix64_mix(k ^ (n * 0xd1b54a32d192ed03ULL));
  k = splitmix64_mix(k ^ (m * 0xaef17502108ef2d9ULL));
  return splitmix64_mix(k ^ (trial * 0xf1357aea2e62a9c5ULL));
}

// SplitMix64: output i is mix(key + i * gamma). Satisfies
// UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }

  // Uniform in [0, bound), bound > 0 (Lemire's multiply-and-reject).
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    uint128 prod = static_cast<uint128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = static_cast<uint128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  // Uniform double in [0, 1).
  constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace xorgame
