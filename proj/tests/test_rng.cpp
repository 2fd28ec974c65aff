#include <doctest.h>

#include <cmath>
#include <set>

#include "predreg/rng.hpp"

using namespace predreg;

TEST_CASE("philox4x32-10 known answers") {
  using B = std::array<std::uint32_t, 4>;
  CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("engine stream starts at counter zero") {
  Philox4x32 g(0);
  const auto b = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) CHECK(g() == b[i]);
}

TEST_CASE("discard_blocks skips whole blocks") {
  Philox4x32 a(42), b(42);
  for (int i = 0; i < 4 * 7; ++i) a();
  b.discard_blocks(7);
  for (int i = 0; i < 16; ++i) CHECK(a() == b());
}

TEST_CASE("derived streams are distinct and deterministic") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_stream(1, i));
  CHECK(seen.size() == 1000);
  CHECK(derive_stream(7, 3, 4) == derive_stream(derive_stream(7, 3), 4));
  CHECK(derive_stream(7, 3, 4) != derive_stream(7, 4, 3));
  static_assert(derive_stream(1, 2) == derive_stream(1, 2));
}

TEST_CASE("uniform lies in the open unit interval with the right moments") {
  Rng rng(123);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum2 / n - mean * mean - 1.0 / 12.0) < 0.002);
}

TEST_CASE("normal draws have unit variance and no skew") {
  Rng rng(9);
  const int n = 200000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s3 / n) < 4.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 4.0 * std::sqrt(96.0 / n));
}

TEST_CASE("same key reproduces the same sequence") {
  Rng a(77), b(77), c(78);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs |= (x != c.normal());
  }
  CHECK(differs);
}
