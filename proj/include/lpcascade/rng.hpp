#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lpcascade {

/// SplitMix64 used as a counter-based generator: draw k (0-based) is
/// mix(seed + (k + 1) * 0x9E3779B97F4A7C15), where mix is the SplitMix64
/// finalizer. Uniform doubles take the top 53 bits; normals use Box-Muller on
/// two consecutive uniforms (cosine branch first, sine branch cached). Every
/// step is plain integer/IEEE arithmetic, so streams are portable.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept;

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound); bound > 0. Uses rejection to avoid bias.
  std::uint64_t below(std::uint64_t bound) noexcept;

  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

  /// `count` distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a base seed and a stream label.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace lpcascade
