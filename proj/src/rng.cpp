#include "sssm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sssm {

namespace {

constexpr uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<uint64_t>(p >> 64);
  lo = static_cast<uint64_t>(p);
}

inline void counter_increment(std::array<uint64_t, 4>& c) {
  for (int i = 0; i < 4; ++i) {
    if (++c[i] != 0) break;
  }
}

}  // namespace

std::array<uint64_t, 4> PhiloxRng::block(const std::array<uint64_t, 4>& counter,
                                         const std::array<uint64_t, 2>& key) {
  std::array<uint64_t, 4> x = counter;
  uint64_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x[0], hi0, lo0);
    mulhilo(kMul1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

// numpy's ordering: step the counter first, then generate, so the block at
// the all-zero counter is never emitted and streams match random_raw().
uint64_t PhiloxRng::next_u64() {
  if (pos_ >= 4) {
    counter_increment(counter_);
    buf_ = block(counter_, key_);
    pos_ = 0;
  }
  return buf_[pos_++];
}

double PhiloxRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

uint64_t PhiloxRng::uniform_int(uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be >= 1");
  const uint64_t rem = static_cast<uint64_t>(-n) % n;  // 2^64 mod n
  uint64_t x;
  do {
    x = next_u64();
  } while (x < rem);
  return x % n;
}

double PhiloxRng::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

PhiloxRng::State PhiloxRng::save() const {
  return State{counter_, key_, pos_};
}

void PhiloxRng::restore(const State& s) {
  counter_ = s.counter;
  key_ = s.key;
  pos_ = s.pos;
  if (pos_ < 4) buf_ = block(counter_, key_);  // counter names the current block
}

PhiloxRng stream_rng(uint64_t seed, uint64_t stream) {
  return PhiloxRng(seed, splitmix64(stream));
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace sssm
