#pragma once

// Deterministic random streams.
//
// Generator: xoshiro256** 1.0 (Blackman & Vigna), state seeded with four
// successive SplitMix64 outputs starting at the stream seed. Child seeds are
// derived from a master seed and an index path with derive_seed(); both
// procedures are bit-exact and documented in README.md.

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string_view>

namespace rmhc {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 output function (Stafford mix13). A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state;

  constexpr std::uint64_t next() noexcept {
    state += kGoldenGamma;
    return mix64(state);
  }
};

/// Derives a child seed from `master` and an index path, e.g.
/// derive_seed(master, {n, r, trial}).
///
///   h = master
///   for c in path: h = mix64(h + kGoldenGamma) ^ c
///   return mix64(h + kGoldenGamma)
///
/// For a fixed prefix the map from the last component to the result is a
/// bijection, so sibling streams (consecutive trial indices) never collide.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = master;
  for (std::uint64_t c : path) h = mix64(h + kGoldenGamma) ^ c;
  return mix64(h + kGoldenGamma);
}

/// Single-owner pseudo-random stream. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view algorithm_id = "xoshiro256**";

  explicit RngStream(std::uint64_t seed) noexcept : seed_(seed) {
    SplitMix64 sm{seed};
    for (auto& word : state_) word = sm.next();
  }

  /// Independent child stream for `index`, seeded with derive_seed(seed, {index}).
  [[nodiscard]] RngStream child(std::uint64_t index) const noexcept {
    return RngStream(derive_seed(seed_, {index}));
  }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, bound). Lemire's multiply-and-reject.
  std::uint64_t uniform_index(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: bound must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal draw, Marsaglia polar method. The second variate of each
  /// accepted pair is cached and returned by the next call.
  double standard_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Gaussian draw with the given mean and standard deviation. sigma == 0
/// returns `mean` exactly and consumes no randomness.
inline double sample_gaussian(double mean, double sigma, RngStream& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("sample_gaussian: sigma must be non-negative");
  if (sigma == 0.0) return mean;
  return mean + sigma * rng.standard_normal();
}

}  // namespace rmhc
