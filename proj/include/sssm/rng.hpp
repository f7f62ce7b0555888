#pragma once

#include <array>
#include <cstdint>

namespace sssm {

// Philox4x64-10 counter-based generator, the variant behind NumPy's
// np.random.Philox. Output blocks are a pure function of (counter, key), so
// state is 6 words, streams fork cheaply and serialization is trivial.
// Known-answer tests pin the output stream against NumPy's random_raw.
class PhiloxRng {
 public:
  PhiloxRng() : PhiloxRng(0, 0) {}
  PhiloxRng(uint64_t key0, uint64_t key1) : key_{key0, key1} {}

  uint64_t next_u64();

  // uniform double in [0, 1) with 53-bit resolution
  double uniform();
  double uniform(double lo, double hi);
  // unbiased integer in [0, n), n >= 1
  uint64_t uniform_int(uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Box-Muller; draws two uniforms per call, keeps no cached half
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  struct State {
    std::array<uint64_t, 4> counter{};  // block most recently generated
    std::array<uint64_t, 2> key{};
    uint32_t pos = 4;  // consumed outputs of the current block
  };
  State save() const;
  void restore(const State& s);

  // raw block function, exposed for the known-answer tests
  static std::array<uint64_t, 4> block(const std::array<uint64_t, 4>& counter,
                                       const std::array<uint64_t, 2>& key);

 private:
  std::array<uint64_t, 4> counter_{};  // stepped before each block, numpy-style
  std::array<uint64_t, 2> key_{};
  std::array<uint64_t, 4> buf_{};
  uint32_t pos_ = 4;
};

// Deterministic sub-stream derivation: distinct (seed, stream) pairs give
// independent Philox keys. Stream ids are documented at their call sites.
PhiloxRng stream_rng(uint64_t seed, uint64_t stream);

uint64_t splitmix64(uint64_t x);

}  // namespace sssm
