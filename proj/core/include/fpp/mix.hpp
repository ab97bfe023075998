#pragma once

#include <cstdint>

namespace fpp {

/// SplitMix64 finalizer (Stafford "Mix13"). This exact function defines every
/// random quantity in the library; changing it changes all outputs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// replica_seed = mix64(master_seed XOR replica_index * kGoldenGamma).
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return mix64(master_seed ^ (index * kGoldenGamma));
}

/// Maps 64 random bits to a double strictly inside (0, 1).
constexpr double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based SplitMix64 stream. Used for sampling and bootstrap so that
/// results do not depend on the standard library's distribution algorithms.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform integer in [0, bound) by 128-bit multiply-shift.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  double uniform() noexcept { return open_unit(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace fpp
