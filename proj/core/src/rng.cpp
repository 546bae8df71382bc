#include "vru/rng.hpp"

#include <cmath>
#include <numbers>

namespace vru {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept {
  // FNV-1a over the label, then mixed with the parent seed.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return mix64(mix64(seed + kGolden) ^ h);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed + kGolden) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

std::uint64_t CounterRng::next() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

__extension__ typedef unsigned __int128 u128;

std::int64_t CounterRng::uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
  const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
  if (range == 0) return static_cast<std::int64_t>(next());
  // Lemire's multiply-shift with rejection of the biased low region.
  const std::uint64_t threshold = (0 - range) % range;
  while (true) {
    const u128 m = static_cast<u128>(next()) * static_cast<u128>(range);
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return lo + static_cast<std::int64_t>(m >> 64);
    }
  }
}

double CounterRng::normal() noexcept {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace vru
