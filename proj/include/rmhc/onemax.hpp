#pragma once

// Bit-string genomes and the (noisy) OneMax fitness.
//
// Bit positions are 0-based inside Genome. Mutation reports the flipped
// position 1-based (k in {1, ..., n}), which is the convention used by the
// CLI and in RunResult diagnostics.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmhc/rng.hpp"

namespace rmhc {

class Genome {
 public:
  /// All-zeros genome of length n.
  explicit Genome(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {
    if (n == 0) throw std::invalid_argument("Genome: length must be positive");
  }

  static Genome zeros(std::size_t n) { return Genome(n); }

  static Genome ones(std::size_t n) {
    Genome g(n);
    for (std::size_t i = 0; i < n; ++i) g.set(i, true);
    return g;
  }

  /// Parses a string of '0'/'1' characters; character i becomes bit i.
  static Genome from_string(std::string_view bits) {
    Genome g(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1') {
        g.set(i, true);
      } else if (bits[i] != '0') {
        throw std::invalid_argument("Genome: expected only '0' and '1' characters");
      }
    }
    return g;
  }

  /// Each bit independently 0 or 1 with probability 1/2.
  static Genome random(std::size_t n, RngStream& rng) {
    Genome g(n);
    for (auto& word : g.words_) word = rng.next_u64();
    g.clear_padding();
    g.recount();
    return g;
  }

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t count_ones() const noexcept { return ones_; }

  [[nodiscard]] bool bit(std::size_t i) const {
    check_index(i);
    return (words_[i / 64] >> (i % 64)) & 1U;
  }

  void set(std::size_t i, bool value) {
    if (bit(i) != value) flip(i);
  }

  /// Inverts bit i (0-based) and updates the cached one-count.
  void flip(std::size_t i) {
    check_index(i);
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    std::uint64_t& word = words_[i / 64];
    word ^= mask;
    if (word & mask) {
      ++ones_;
    } else {
      --ones_;
    }
  }

  [[nodiscard]] std::string to_string() const {
    std::string out(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
      if (bit(i)) out[i] = '1';
    }
    return out;
  }

  friend bool operator==(const Genome& a, const Genome& b) noexcept {
    return a.n_ == b.n_ && a.words_ == b.words_;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= n_) throw std::out_of_range("Genome: bit index out of range");
  }

  void clear_padding() noexcept {
    if (const std::size_t tail = n_ % 64; tail != 0) {
      words_.back() &= (std::uint64_t{1} << tail) - 1;
    }
  }

  void recount() noexcept {
    ones_ = 0;
    for (std::uint64_t w : words_) ones_ += static_cast<std::size_t>(std::popcount(w));
  }

  std::size_t n_;
  std::vector<std::uint64_t> words_;
  std::size_t ones_ = 0;
};

struct NoiseModel {
  double sigma = 1.0;

  void validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("NoiseModel: sigma must be finite and non-negative");
    }
  }
};

/// Noise-free OneMax: number of 1-bits.
inline std::size_t true_fitness(const Genome& g) noexcept { return g.count_ones(); }

/// true_fitness(g) plus a fresh N(0, sigma^2) draw.
inline double noisy_fitness(const Genome& g, const NoiseModel& noise, RngStream& rng) {
  return sample_gaussian(static_cast<double>(true_fitness(g)), noise.sigma, rng);
}

struct Mutation {
  Genome child;
  std::size_t k;  // 1-based flipped position
};

/// Copy of g with the 1-based bit k inverted.
inline Genome flip_bit(const Genome& g, std::size_t k) {
  if (k < 1 || k > g.size()) throw std::out_of_range("flip_bit: k must be in [1, n]");
  Genome child = g;
  child.flip(k - 1);
  return child;
}

/// Flips one uniformly chosen bit of a copy of g.
inline Mutation mutate_one_bit(const Genome& g, RngStream& rng) {
  const std::size_t k = static_cast<std::size_t>(rng.uniform_index(g.size())) + 1;
  return {flip_bit(g, k), k};
}

}  // namespace rmhc
