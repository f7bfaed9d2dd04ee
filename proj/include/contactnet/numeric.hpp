#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace contactnet {

/// Neumaier-compensated summation; order-dependent but reproducible.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + carry_; }

 private:
  double sum_{0.0};
  double carry_{0.0};
};

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for substream `index` of `seed`, optionally namespaced by `tag`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    std::uint64_t tag = 0) noexcept {
  return mix_seed(mix_seed(seed ^ mix_seed(tag)) + index);
}

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound) by rejection; identical across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace contactnet
