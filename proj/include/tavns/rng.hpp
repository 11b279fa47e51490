#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tavns {

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based standard normal stream.
///
/// Every draw is a pure function of (seed, stream, counter), so a path's
/// increments do not depend on which worker computes them or in which order.
/// Draws use Box-Muller on two hashed uniforms; the result is bit-identical
/// across platforms with IEEE doubles and a correctly rounded libm.
class NormalStream {
 public:
  constexpr NormalStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix64(seed ^ mix64(stream ^ 0x5851f42d4c957f2dULL))) {}

  double operator()(std::uint64_t counter) const noexcept {
    const std::uint64_t b1 = mix64(key_ ^ mix64(2 * counter));
    const std::uint64_t b2 = mix64(key_ ^ mix64(2 * counter + 1));
    // (0,1): never exactly zero, so the log is finite.
    const double u1 = (static_cast<double>(b1 >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(b2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
};

}  // namespace tavns
