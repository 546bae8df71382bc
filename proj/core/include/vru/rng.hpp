#pragma once

#include <cstdint>
#include <string_view>

namespace vru {

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Derives an independent stream key from a parent seed and a label, so that
// every stage and every block draws from its own stream regardless of the
// order in which stages run.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Counter-based generator: the n-th output is mix64(key + n * golden), so a
// stream can be positioned anywhere without replaying it.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  std::uint64_t next() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Uniform integer on the closed range [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept;
  // Standard normal via Box-Muller (two uniforms per call).
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace vru
