#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace predreg {

//! SplitMix64 finalizer; used to hash seeds and stream indices into keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Derive an independent stream key from a parent key and an index.
constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t a,
                                      std::uint64_t b) noexcept {
  return derive_stream(derive_stream(parent, a), b);
}

/*!
 * Philox4x32-10 counter-based generator.
 *
 * The 64-bit key selects the stream; the 128-bit counter walks it. Any
 * (key, counter) pair maps to the same output on every platform, which is
 * what makes replication results independent of thread scheduling.
 */
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  explicit Philox4x32(std::uint64_t key) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;
  std::uint64_t next_u64() noexcept;

  //! Skip ahead by `blocks` 128-bit output blocks.
  void discard_blocks(std::uint64_t blocks) noexcept;

  //! Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_{};
  std::array<std::uint32_t, 4> buffer_{};
  unsigned index_ = 4;
};

//! Variate generation on top of a Philox stream.
class Rng {
 public:
  explicit Rng(std::uint64_t key) noexcept : engine_(key) {}

  //! Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  //! Standard normal via Box-Muller (both variates of each pair are used).
  double normal() noexcept;

  Philox4x32& engine() noexcept { return engine_; }

 private:
  Philox4x32 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace predreg
