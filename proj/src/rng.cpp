#include "predreg/rng.hpp"

#include <cmath>
#include <numbers>

namespace predreg {

namespace {

constexpr std::uint32_t kW0 = 0x9E3779B9U;
constexpr std::uint32_t kW1 = 0xBB67AE85U;
constexpr std::uint32_t kM0 = 0xD2511F53U;
constexpr std::uint32_t kM1 = 0xCD9E8D57U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t key) noexcept
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

void Philox4x32::refill() noexcept {
  buffer_ = block(counter_, key_);
  index_ = 0;
  // 128-bit increment
  for (auto& word : counter_) {
    if (++word != 0) break;
  }
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
  if (index_ == 4) refill();
  return buffer_[index_++];
}

std::uint64_t Philox4x32::next_u64() noexcept {
  const std::uint64_t lo = (*this)();
  const std::uint64_t hi = (*this)();
  return (hi << 32) | lo;
}

void Philox4x32::discard_blocks(std::uint64_t blocks) noexcept {
  std::uint64_t low = (static_cast<std::uint64_t>(counter_[1]) << 32) | counter_[0];
  const std::uint64_t sum = low + blocks;
  if (sum < low) {
    if (++counter_[2] == 0) ++counter_[3];
  }
  counter_[0] = static_cast<std::uint32_t>(sum);
  counter_[1] = static_cast<std::uint32_t>(sum >> 32);
  index_ = 4;
}

double Rng::uniform() noexcept {
  const std::uint64_t bits = engine_.next_u64() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

}  // namespace predreg
