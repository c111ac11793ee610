#pragma once

#include <cstdint>

namespace yaoyao {

/// Counter-based generator: draw j of stream s under seed k is
/// splitmix64_mix(key(k, s) + (j + 1) * golden_gamma), where
/// key(k, s) = splitmix64_mix(k ^ splitmix64_mix(s + golden_gamma)).
///
/// Every value depends only on (seed, stream, counter), so any subset of
/// draws can be reproduced independently of evaluation order. Streams used
/// by the library: sampling uses stream = point index; verification checks
/// use stream = trial index offset by a per-check tag.
class CounterRng {
 public:
  static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double next_uniform();
  /// Standard normal via the Box-Muller transform; values come in pairs.
  double next_normal();

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace yaoyao
