#pragma once

#include <cstdint>

namespace discround {

// Counter-based generator (SplitMix64 finalizer over key+counter).  Streams
// derived from the same seed are independent, and a (seed, stream) pair fully
// determines the sequence regardless of call interleaving elsewhere -- which
// is what makes whole-run reports byte-reproducible.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) {
    key_ = mix(seed + 0x9e3779b97f4a7c15ull * (stream + 1), 0x1234567899abcdefull);
  }

  uint64_t next_u64() { return mix(key_, counter_++); }

  // one Rademacher sign; draws a fresh 64-bit word every 64 calls
  double next_sign() {
    if (bits_left_ == 0) {
      bit_word_ = next_u64();
      bits_left_ = 64;
    }
    double s = (bit_word_ & 1u) ? 1.0 : -1.0;
    bit_word_ >>= 1;
    --bits_left_;
    return s;
  }

  // uniform in [0,1)
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  uint64_t next_below(uint64_t n) {
    // 64-bit multiply-shift; bias is negligible for the n used here
    return static_cast<uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  static uint64_t mix(uint64_t key, uint64_t ctr) {
    uint64_t z = key + ctr * 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t key_ = 0;
  uint64_t counter_ = 0;
  uint64_t bit_word_ = 0;
  int bits_left_ = 0;
};

}  // namespace discround
