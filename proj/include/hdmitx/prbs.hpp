#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hdmitx/error.hpp"
#include "hdmitx/word.hpp"

namespace hdmitx {

enum class PrbsKind { Prbs7, Prbs10 };

// Fibonacci LFSR. PRBS7: x^7 + x^6 + 1. PRBS10: x^10 + x^7 + 1.
class Lfsr {
 public:
  Lfsr(PrbsKind kind, std::uint32_t seed) {
    if (kind == PrbsKind::Prbs7) {
      order_ = 7;
      tap_ = 6;
    } else {
      order_ = 10;
      tap_ = 7;
    }
    mask_ = (1U << order_) - 1U;
    state_ = seed & mask_;
    if (state_ == 0) throw InvalidSeedError("LFSR seed must have a nonzero low " + std::to_string(order_) + " bits");
  }

  int order() const { return order_; }
  std::uint32_t period() const { return mask_; }

  int next() {
    const std::uint32_t b = ((state_ >> (order_ - 1)) ^ (state_ >> (tap_ - 1))) & 1U;
    state_ = ((state_ << 1) | b) & mask_;
    return static_cast<int>(b);
  }

 private:
  int order_ = 7;
  int tap_ = 6;
  std::uint32_t mask_ = 0x7F;
  std::uint32_t state_ = 1;
};

// Packs the sequence into words, first bit into D0.
inline std::vector<Word> gen_prbs(PrbsKind kind, std::size_t n_words, std::uint32_t seed, int width = 10) {
  Lfsr lfsr(kind, seed);
  std::vector<Word> out;
  out.reserve(n_words);
  for (std::size_t w = 0; w < n_words; ++w) {
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint32_t>(lfsr.next()) << i;
    out.emplace_back(v, width);
  }
  return out;
}

// Uniform words from mt19937_64 raw output (no distribution objects, so the
// sequence is identical across standard libraries).
inline std::vector<Word> random_words(std::size_t n_words, std::uint64_t seed, int width = 10) {
  std::mt19937_64 rng(seed);
  std::vector<Word> out;
  out.reserve(n_words);
  const std::uint64_t mask = (std::uint64_t{1} << width) - 1;
  for (std::size_t i = 0; i < n_words; ++i) out.emplace_back(static_cast<std::uint32_t>(rng() & mask), width);
  return out;
}

}  // namespace hdmitx
