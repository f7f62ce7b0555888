#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "sssm/rng.hpp"

using namespace sssm;

// Known-answer vectors generated with numpy:
//   np.random.Generator(np.random.Philox(counter=..., key=...)).bit_generator.random_raw(8)
TEST_CASE("raw stream matches numpy for key (0,0)") {
  const std::array<uint64_t, 8> want = {
      0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL,
      0x907d7a052fd5b4dcULL, 0x809bf322883987c3ULL, 0x471128b9e807f7ddULL,
      0xf250ba0dbec065b7ULL, 0xfc6ed66767a457bcULL};
  PhiloxRng rng(0, 0);
  for (uint64_t w : want) CHECK(rng.next_u64() == w);
}

TEST_CASE("raw stream matches numpy for key (0xdeadbeef, 0xcafef00d)") {
  const std::array<uint64_t, 8> want = {
      0x2efbea9056208111ULL, 0x32bb8ca912a6bd47ULL, 0x78cd0b669d6a23fbULL,
      0x4a9a089e67c68c3aULL, 0xa7d5f73a4449f427ULL, 0xbbd012cc3b2d698bULL,
      0x0ebd8ed7314a20c3ULL, 0x1c3692f8d6f6657aULL};
  PhiloxRng rng(0xdeadbeefULL, 0xcafef00dULL);
  for (uint64_t w : want) CHECK(rng.next_u64() == w);
}

TEST_CASE("raw stream matches numpy for key (1,2), counter (3,4,5,6)") {
  const std::array<uint64_t, 8> want = {
      0x8070e5788d05927eULL, 0x1c5aef1cb5451508ULL, 0xd04b22ec4863e2a0ULL,
      0xd67cc7da10e919ceULL, 0x00a7b5fae736fabfULL, 0x832df5ec2023505bULL,
      0xf40f1906a82eedc2ULL, 0xab5e719edeec3829ULL};
  PhiloxRng rng;
  PhiloxRng::State s;
  s.counter = {3, 4, 5, 6};
  s.key = {1, 2};
  s.pos = 4;  // buffer exhausted: next call steps to (4,4,5,6) and generates
  rng.restore(s);
  for (uint64_t w : want) CHECK(rng.next_u64() == w);
}

TEST_CASE("counter carry propagates through all four words") {
  const uint64_t ones = ~0ULL;
  const std::array<uint64_t, 8> want = {
      0x44b7493d1acfc229ULL, 0x6636af8e997921ddULL, 0x3f73e132b5b3780eULL,
      0x605644dde03b01b1ULL, 0x6d46cc0e71f0be7eULL, 0x924ea1693f9a8bc0ULL,
      0xfdc35f0198c91181ULL, 0xb4a311f17aa6568dULL};
  PhiloxRng rng;
  PhiloxRng::State s;
  s.counter = {ones, ones, ones, ones};
  s.key = {ones, ones};
  s.pos = 4;
  rng.restore(s);
  for (uint64_t w : want) CHECK(rng.next_u64() == w);
  // stepping the all-ones counter wraps it to zero through every word, so
  // the first block drawn is block((0,0,0,0)) and the next is ((1,0,0,0))
  CHECK(PhiloxRng::block({0, 0, 0, 0}, {ones, ones})[0] == want[0]);
  CHECK(PhiloxRng::block({1, 0, 0, 0}, {ones, ones})[0] == want[4]);
}

TEST_CASE("block function is pure") {
  auto a = PhiloxRng::block({1, 2, 3, 4}, {5, 6});
  auto b = PhiloxRng::block({1, 2, 3, 4}, {5, 6});
  CHECK(a == b);
  auto c = PhiloxRng::block({2, 2, 3, 4}, {5, 6});
  CHECK(a != c);
}

TEST_CASE("save/restore resumes mid-block") {
  PhiloxRng rng(42, 7);
  rng.next_u64();
  rng.next_u64();  // leave two words in the current block
  PhiloxRng::State s = rng.save();
  const uint64_t a1 = rng.next_u64(), a2 = rng.next_u64(), a3 = rng.next_u64();
  rng.restore(s);
  CHECK(rng.next_u64() == a1);
  CHECK(rng.next_u64() == a2);
  CHECK(rng.next_u64() == a3);
}

TEST_CASE("uniform lies in [0,1) and uses 53-bit resolution") {
  PhiloxRng rng(1, 0);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
  // structural property: uniform() = (next_u64() >> 11) * 2^-53, exactly
  PhiloxRng r3(9, 9), r4(9, 9);
  for (int i = 0; i < 16; ++i) CHECK(r3.uniform() == double(r4.next_u64() >> 11) * 0x1p-53);
}

TEST_CASE("uniform(lo,hi) stays in range") {
  PhiloxRng rng(2, 0);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform(-3.0, 5.0);
    CHECK(u >= -3.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("uniform_int covers [0,n) without bias toward missing values") {
  PhiloxRng rng(4, 0);
  std::array<int, 7> counts{};
  for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_int(7)];
  for (int c : counts) CHECK(c > 700);  // each bin near 1000
}

TEST_CASE("uniform_int(1) is always zero") {
  PhiloxRng rng(5, 0);
  for (int i = 0; i < 100; ++i) CHECK(rng.uniform_int(1) == 0);
}

TEST_CASE("bernoulli endpoints") {
  PhiloxRng rng(6, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(rng.bernoulli(0.0));
    CHECK(rng.bernoulli(1.0));
  }
}

TEST_CASE("normal moments are sane") {
  PhiloxRng rng(7, 0);
  const int n = 20000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
  CHECK(rng.normal(10.0, 0.0) == 10.0);
}

TEST_CASE("stream derivation separates and reproduces") {
  PhiloxRng a = stream_rng(123, 0);
  PhiloxRng b = stream_rng(123, 1);
  PhiloxRng a2 = stream_rng(123, 0);
  CHECK(a.next_u64() != b.next_u64());
  PhiloxRng a3 = stream_rng(123, 0);
  CHECK(a3.next_u64() == a2.next_u64());
  // different seeds diverge too
  CHECK(stream_rng(124, 0).next_u64() != stream_rng(123, 0).next_u64());
}

TEST_CASE("splitmix64 reference values") {
  // reference implementation's published sequence
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(1234567) == 6457827717110365317ULL);
}
