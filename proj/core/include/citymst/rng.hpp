#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace citymst {

// Philox4x32-10 counter-based generator. The 64-bit key selects a stream;
// the 128-bit counter walks it. Satisfies UniformRandomBitGenerator so it can
// drive <random> distributions.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t key, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        counter_{0, 0, static_cast<std::uint32_t>(stream),
                 static_cast<std::uint32_t>(stream >> 32)} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (next_word_ >= 4) refill();
    const std::uint64_t lo = buffer_[next_word_];
    const std::uint64_t hi = buffer_[next_word_ + 1];
    next_word_ += 2;
    return lo | (hi << 32);
  }

  // Uniform double on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // The raw ten-round bijection, exposed for known-answer tests.
  static Block block(Block counter, Key key);

 private:
  void refill();

  Key key_;
  Block counter_;
  Block buffer_{};
  unsigned next_word_ = 4;
};

// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

// Substream seed for (master, path...). Distinct paths give unrelated
// seeds; the same path always gives the same seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Stable 64-bit tag for a string label (FNV-1a).
std::uint64_t label_hash(const char* label);

}  // namespace citymst
