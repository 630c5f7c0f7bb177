#pragma once

#include <cstdint>
#include <limits>

namespace matchwalk {

/// Counter-based generator: the n-th output is splitmix64(key + n * gamma).
/// Streams derived with `split` are independent of the parent's position,
/// so (seed, trial index) -> trial stream is a pure function.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (counter_++) * kGamma); }

  CounterRng split(std::uint64_t index) const {
    CounterRng child;
    child.key_ = mix(key_ ^ mix(index + 0x243f6a8885a308d3ULL));
    return child;
  }

  /// Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    u128 prod = static_cast<u128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < bound) {
      std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        prod = static_cast<u128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t position() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace matchwalk
