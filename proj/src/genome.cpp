#include "nichelab/genome.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace nichelab {

namespace {

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

std::uint64_t tail_mask(std::size_t n) {
  const std::size_t used = n & 63;
  return used == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << used) - 1;
}

void require_same_length(const Genome& a, const Genome& b, const char* what) {
  if (a.size() != b.size()) {
    throw std::logic_error(std::string(what) + ": genome length mismatch (" +
                           std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

} // namespace

Genome::Genome(std::size_t n) : n_{n}, words_(word_count(n), 0) {
  if (n == 0) {
    throw std::invalid_argument("Genome: length must be positive");
  }
}

Genome Genome::ones(std::size_t n) {
  Genome g{n};
  std::ranges::fill(g.words_, ~std::uint64_t{0});
  g.clear_tail();
  return g;
}

Genome Genome::from_string(std::string_view bits) {
  Genome g{bits.size()};
  for (std::size_t i = 0; i < bits.size(); ++i) {
    switch (bits[i]) {
    case '0':
      break;
    case '1':
      g.flip(i);
      break;
    default:
      throw std::invalid_argument("Genome::from_string: expected only '0' and '1'");
    }
  }
  return g;
}

void Genome::set(std::size_t i, bool value) noexcept {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

void Genome::flip_all(std::span<const std::size_t> positions) noexcept {
  for (auto i : positions) {
    flip(i);
  }
}

std::size_t Genome::ones_count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) {
    total += static_cast<std::size_t>(std::popcount(w));
  }
  return total;
}

bool Genome::all_zeros() const noexcept {
  return std::ranges::all_of(words_, [](std::uint64_t w) { return w == 0; });
}

bool Genome::all_ones() const noexcept { return ones_count() == n_; }

Genome Genome::complement() const {
  Genome g{*this};
  for (auto& w : g.words_) {
    w = ~w;
  }
  g.clear_tail();
  return g;
}

std::string Genome::to_string() const {
  std::string out(n_, '0');
  for (std::size_t i = 0; i < n_; ++i) {
    if (get(i)) {
      out[i] = '1';
    }
  }
  return out;
}

void Genome::clear_tail() noexcept { words_.back() &= tail_mask(n_); }

std::size_t hamming_distance(const Genome& a, const Genome& b) {
  require_same_length(a, b, "hamming_distance");
  const auto wa = a.words();
  const auto wb = b.words();
  std::size_t total = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    total += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return total;
}

std::size_t phenotypic_distance(const Genome& a, const Genome& b) {
  require_same_length(a, b, "phenotypic_distance");
  const auto oa = a.ones_count();
  const auto ob = b.ones_count();
  return oa > ob ? oa - ob : ob - oa;
}

Genome uniform_random_genome(std::size_t n, RandomStream& rng) {
  Genome g{n};
  for (auto& w : g.words()) {
    w = rng.next_u64();
  }
  g.words().back() &= tail_mask(n);
  return g;
}

} // namespace nichelab
