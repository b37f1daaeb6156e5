#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nichelab/random.hpp"

namespace nichelab {

// Fixed-length bitstring packed into 64-bit words. Bit i lives in word i/64
// at position i%64; bits past the length are always zero. Text form lists
// bit 0 first, so "0110" has bits 1 and 2 set.
class Genome {
public:
  /// All-zero genome of length n (n >= 1).
  explicit Genome(std::size_t n);

  static Genome zeros(std::size_t n) { return Genome{n}; }
  static Genome ones(std::size_t n);
  static Genome from_string(std::string_view bits);

  std::size_t size() const noexcept { return n_; }

  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value) noexcept;
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  void flip_all(std::span<const std::size_t> positions) noexcept;

  std::size_t ones_count() const noexcept;
  bool all_zeros() const noexcept;
  bool all_ones() const noexcept;

  Genome complement() const;
  std::string to_string() const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  friend bool operator==(const Genome&, const Genome&) = default;

private:
  void clear_tail() noexcept;

  std::size_t n_;
  std::vector<std::uint64_t> words_;
};

/// Number of positions at which a and b differ. Throws std::logic_error on
/// length mismatch.
std::size_t hamming_distance(const Genome& a, const Genome& b);

/// |ones(a) - ones(b)|. Throws std::logic_error on length mismatch.
std::size_t phenotypic_distance(const Genome& a, const Genome& b);

/// Each bit independently 1 with probability 1/2.
Genome uniform_random_genome(std::size_t n, RandomStream& rng);

} // namespace nichelab
